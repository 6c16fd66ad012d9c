"""Compensated summation helpers.

The exponential sums accumulate thousands of unit-magnitude terms whose
total is often orders of magnitude smaller than the term count, so plain
left-to-right addition loses digits to cancellation.  The accumulators here
implement Kahan summation with Neumaier's branch, which tracks a running
compensation term and also reports it, so callers can surface how much
cancellation a sum absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["NeumaierSum", "compensated_sum", "compensated_complex_sum"]


class NeumaierSum:
    """Scalar Kahan-Neumaier accumulator.

    `add` folds one term in; `value` returns the compensated total and
    `residual` the magnitude of the final carry (a cheap diagnostic of how
    much cancellation occurred; 0.0 means plain addition would have given
    the same result).
    """

    __slots__ = ("_s", "_c")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            # low-order digits of x are lost in t; recover them
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c

    @property
    def residual(self) -> float:
        return abs(self._c)


def compensated_sum(values: np.ndarray) -> tuple[float, float]:
    """Sum a 1-D float array term by term with Neumaier compensation.

    Returns (total, residual).  Order matters and is preserved; callers
    feed terms in ascending-p order so the carry tracks the physically
    meaningful cancellation.
    """
    acc = NeumaierSum()
    for x in np.asarray(values, dtype=np.float64).ravel().tolist():
        acc.add(x)
    return acc.value, acc.residual


def compensated_complex_sum(values: np.ndarray) -> tuple[complex, float]:
    """Sum a 1-D complex array; returns (total, residual).

    Real and imaginary parts run through independent accumulators; the
    residual is the larger of the two carries.
    """
    values = np.asarray(values, dtype=np.complex128).ravel()
    re, rre = compensated_sum(values.real)
    im, rim = compensated_sum(values.imag)
    return complex(re, im), max(rre, rim)


@dataclass(frozen=True)
class SumResult:
    """Value of a compensated exponential sum plus bookkeeping.

    value: the compensated complex total.
    term_count: number of primes that contributed.
    compensation_residual: magnitude of the final Neumaier carry.
    """

    value: complex
    term_count: int
    compensation_residual: float


__all__.append("SumResult")
