import functools

import pytest

from nullplane.algebras import builtin_text, load, parse_presentation

QUANTUM = ("poincare-1+1-quantum", "sl2-nonstandard", "so22-conformal",
           "poincare-2+1-quantum", "poincare-3+1-quantum")
WITH_R = ("poincare-1+1-quantum", "poincare-2+1-quantum", "poincare-3+1-quantum")


@functools.lru_cache(maxsize=None)
def cached(name: str, order: int):
    return load(name, order)


def mutated(name: str, old: str, new: str, order: int = 3):
    """Built-in presentation with one textual replacement applied."""
    text = builtin_text(name)
    assert old in text, f"mutation anchor missing from {name}"
    return parse_presentation(text.replace(old, new), order, source=f"{name} (mutated)")


# the three negative controls shared by several test modules
FLIP_R_FACTOR = ("(scal -2 (z^ 1 (tensor (gen P+) (gen K))))", "(scal 2 (z^ 1 (tensor (gen P+) (gen K))))")
DROP_EXP_LEG = ("(tensor (gen P-) (exp (scal 2 (z^ 1 (gen P+))))))", "(tensor (gen P-) (one)))")
WRONG_R_TEXT = "(scal 2 (z^ 1 (wedge (gen K) (gen P-))))"


@pytest.fixture
def p11():
    return cached("poincare-1+1-quantum", 4)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE
    except ImportError:
        return
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
