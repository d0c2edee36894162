"""Python surface for the secure code generation workflow library.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it and adds a default guideline database path.
"""

from pathlib import Path

from ._core import (
    ConfigError,
    GuidelineSet,
    ParseError,
    __version__,
    cwe_with_description,
    extract_code_block,
    extract_cwe_list,
    extract_yes_no,
    pass_at_k,
    render_prompt,
)

DEFAULT_GUIDELINES = Path(__file__).parent / "data" / "guidelines.json"


def load_default_guidelines() -> GuidelineSet:
    """The guideline database shipped with the package."""
    return GuidelineSet.load(str(DEFAULT_GUIDELINES))


__all__ = [
    "ConfigError",
    "DEFAULT_GUIDELINES",
    "GuidelineSet",
    "ParseError",
    "__version__",
    "cwe_with_description",
    "extract_code_block",
    "extract_cwe_list",
    "extract_yes_no",
    "load_default_guidelines",
    "pass_at_k",
    "render_prompt",
]
