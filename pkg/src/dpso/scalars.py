"""Scalar mode handling shared by the exact and floating-point code paths.

Exact mode computes in `fractions.Fraction`; float mode in machine floats.
Fraction construction is exact for ints, Fractions, floats (binary
expansion), and strings like "1/3" or "0.25", so user-facing parameters are
accepted in any of those forms.
"""

from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

MODES = (EXACT, FLOAT)


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def convert(value, mode):
    """Coerce value into the arithmetic domain of the given mode."""
    check_mode(mode)
    if mode == EXACT:
        return Fraction(value)
    return float(Fraction(value)) if isinstance(value, str) else float(value)


def render(value):
    """Serialize a scalar for CSV/JSON output.

    Exact rationals print as "num/den" (integers as "13/1" so the reader can
    tell exact from float); floats print with repr round-trip precision.
    """
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    return repr(float(value))
