"""Smoke tests for the scgagent extension module.

Run with PYTHONPATH pointing at the directory holding the built
_scgagent_core extension (the build tree's python/ directory or an
installed wheel).
"""

import scgagent


def test_version():
    assert scgagent.__version__ == "0.1.0"


def test_pass_at_k():
    assert scgagent.pass_at_k(5, 3, 2) == 0.9
    assert scgagent.pass_at_k(5, 2, 1) == 0.4
    assert scgagent.pass_at_k(10, 0, 3) == 0.0
    try:
        scgagent.pass_at_k(3, 5, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("c > n must raise ValueError")


def test_response_parsing():
    text = "Reasoning first.\n\n```c\nint f(void) { return 1; }\n```\n"
    assert scgagent.extract_code_block(text) == "int f(void) { return 1; }"
    assert scgagent.extract_yes_no("I checked.\n\nYes.") == "yes"
    assert scgagent.extract_yes_no("Thinking...\n\nNo") == "no"
    cwes = scgagent.extract_cwe_list("Likely CWE-78, maybe CWE-20. CWE-78.")
    assert cwes == ["CWE-78", "CWE-20"]


def test_render_prompt():
    prompt = scgagent.render_prompt(
        "check_relevance",
        {
            "task_description": "Write an adder.",
            "code": "int add(int a, int b) { return a + b; }",
            "guideline": "Avoid integer overflow.",
        },
    )
    assert "Write an adder." in prompt
    assert "Avoid integer overflow." in prompt
    assert prompt.endswith("firm yes or no.")


def test_guidelines():
    store = scgagent.GuidelineSet.load(str(scgagent.DEFAULT_GUIDELINES))
    assert len(store) == 24
    hits = store.lookup(["CWE-78"])
    assert hits and hits[0]["id"] == "g-cmd-no-shell"
    assert store.lookup(["CWE-9999"]) == []
    default = scgagent.load_default_guidelines()
    assert len(default) == len(store)


def main():
    checks = [
        test_version,
        test_pass_at_k,
        test_response_parsing,
        test_render_prompt,
        test_guidelines,
    ]
    for check in checks:
        check()
        print("ok", check.__name__)
    print("%d checks passed" % len(checks))


if __name__ == "__main__":
    main()
