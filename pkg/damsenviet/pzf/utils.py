from typing import (
    TypeVar,
    Any,
    Callable,
    Iterable,
    List,
    Dict,
)
from fractions import Fraction
from functools import wraps
from mpmath import mp
import numpy as np
from typeguard import typechecked
from .exceptions import IllegalValueException

__all__ = [
    "engine_version",
    "graph_stream",
    "trial_stream",
    "topup_stream",
    "sets_stream",
    "start_stream",
    "autorepr",
    "with_precision",
    "expect",
    "mix64",
    "derive_seed",
    "make_rng",
    "fraction_str",
    "to_bitmask",
    "from_bitmask",
]

T = TypeVar("T")

engine_version = "0.1.0"

# 64-bit mask for the seed mixer
mask64 = 0xFFFFFFFFFFFFFFFF

# salts separating the random streams drawn from one seed
graph_stream = 0x6772617068
trial_stream = 0x747269616C
topup_stream = 0x746F707570
sets_stream = 0x73657473
start_stream = 0x7374617274


def autorepr(self: Any, attributes: Dict[str, Any]):
    key_eq_val_strs: List[str] = []
    for key, value in attributes.items():
        key_eq_val_strs.append(f"{key}={repr(value)}")
    serial: str = ", ".join(key_eq_val_strs)
    return f"{self.__class__.__name__}({serial})"


@typechecked
def with_precision(precision: int):
    """Temporarily modifies the precision of mpmath.

    :param precision: the mpf decimal precision
    :type precision: int
    :return: wrapped function
    :rtype: Callable
    """

    def decorator(function):
        @wraps(function)
        def wrapped(*args, **kwargs):
            # mp.dps is decimal significant places
            # mp.prec is the number of precision bits
            old_precision = mp.dps
            mp.dps = precision
            try:
                return function(*args, **kwargs)
            finally:
                mp.dps = old_precision

        return wrapped

    return decorator


def expect(
    value_name: str,
    value: T,
    condition_description: str,
    condition: Callable[[T], bool],
) -> None:
    """Throws an exception if value does not meet the condition.

    :param value_name: value name
    :type value_name: str
    :param value: any value
    :type value: T
    :param condition_description: a description of condition
    :type condition_description: str
    :param condition: a callback that returns a boolean value
    :type condition: Callable[[T], bool]
    :return: None
    :rtype: None
    """
    message = f"expected {value_name} {repr(value)} to {condition_description}"
    if not condition(value):
        raise IllegalValueException(message, value)


def mix64(value: int) -> int:
    """SplitMix64 finaliser.

    :param value: any integer, reduced modulo 2^64
    :type value: int
    :return: the mixed 64-bit value
    :rtype: int
    """
    z = (value + 0x9E3779B97F4A7C15) & mask64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derives a child seed by folding each path component through the mixer.

    ``derive_seed(master, k)`` is the seed of trial ``k``; salts such as
    ``trial_stream`` separate independent streams drawn from one seed.

    :param seed: the parent seed
    :type seed: int
    :return: a 64-bit child seed
    :rtype: int
    """
    state = seed & mask64
    for component in path:
        state = mix64(state ^ mix64(component & mask64))
    return state


def make_rng(seed: int) -> np.random.Generator:
    """Returns a PCG64 generator seeded from a 64-bit seed.

    :param seed: 64-bit seed
    :type seed: int
    :return: generator
    :rtype: np.random.Generator
    """
    return np.random.Generator(np.random.PCG64(seed & mask64))


def fraction_str(value: Fraction) -> str:
    """Serialises a rational as ``numerator/denominator``.

    :param value: a rational
    :type value: Fraction
    :return: the string form, denominator always present
    :rtype: str
    """
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def to_bitmask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def from_bitmask(mask: int) -> frozenset:
    vertices = []
    v = 0
    while mask:
        if mask & 1:
            vertices.append(v)
        mask >>= 1
        v += 1
    return frozenset(vertices)
