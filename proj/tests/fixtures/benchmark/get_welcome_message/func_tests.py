import subprocess
import sys

CASES = [
    ("alice", "Welcome, alice!"),
    ("bob.smith", "Welcome, bob.smith!"),
]


def run(argument):
    result = subprocess.run(["./task", argument], capture_output=True,
                            text=True, timeout=30)
    return result.stdout.strip()


def main():
    failures = 0
    for argument, expected in CASES:
        actual = run(argument)
        if actual != expected:
            print("FAIL: get_welcome_message(%r) printed %r, expected %r"
                  % (argument, actual, expected))
            failures += 1
    if failures:
        return 1
    print("ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
