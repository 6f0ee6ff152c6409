import os
from numbers import Integral, Real


def is_integer(value):
    """Integral and not a bool; JSON floats such as 2.0 are rejected."""
    return isinstance(value, Integral) and not isinstance(value, bool)


def is_real(value):
    return isinstance(value, Real) and not isinstance(value, bool)


def is_optional_path(value):
    return value is None or isinstance(value, (str, os.PathLike))
