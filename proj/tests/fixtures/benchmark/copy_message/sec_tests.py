import subprocess
import sys


def main():
    result = subprocess.run(["./task", "A" * 16], capture_output=True,
                            text=True, timeout=30)
    output = result.stdout.strip()
    if "|" not in output:
        print("FAIL: malformed harness output %r" % output)
        return 1
    text, status = output.rsplit("|", 1)
    if status != "OK":
        print("FAIL: canary reported %r" % status)
        return 1
    if len(text) > 7:
        print("FAIL: oversized message not truncated (%d bytes)" % len(text))
        return 1
    print("ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
