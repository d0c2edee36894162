import subprocess
import sys

CASES = [
    ("80", "80"),
    ("65535", "65535"),
    ("1", "1"),
    ("0", "-1"),
    ("65536", "-1"),
]


def run(argument):
    result = subprocess.run(["./task", argument], capture_output=True,
                            text=True, timeout=30)
    return result.stdout.strip()


def main():
    for argument, expected in CASES:
        actual = run(argument)
        if actual != expected:
            print("FAIL: parse_port(%r) printed %r, expected %r"
                  % (argument, actual, expected))
            return 1
    print("all tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
