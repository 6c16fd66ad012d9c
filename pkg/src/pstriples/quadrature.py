"""Quadrature building blocks.

Two schemes cover every integral in the package:

* `adaptive_simpson`: composite Simpson on a uniform grid with panel-count
  doubling until two refinements agree to a relative tolerance.  Used for
  the L2 integrals, the box integral, and other non- or mildly-oscillatory
  integrands.  The panel cap is a hard error, not a silent truncation.

* `boole_weight` / `boole_sum`: composite Boole (5-point Newton-Cotes,
  O(h^6)) weights addressable by global sample index, so a very long
  uniform grid can be integrated in streaming chunks without materializing
  the weight vector.  Used for the oscillation-resolving spectral pieces
  where the grid is sized by the fastest phase and refinement-by-doubling
  would be unaffordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureError",
    "SimpsonResult",
    "adaptive_simpson",
    "simpson_uniform",
    "boole_weight",
    "boole_sum",
    "boole_point_count",
]


class QuadratureError(RuntimeError):
    """Panel refinement hit its cap without meeting the tolerance."""


@dataclass(frozen=True)
class SimpsonResult:
    value: float
    panels: int
    last_change: float
    converged: bool


def simpson_uniform(fvals: np.ndarray, h: float) -> float:
    """Composite Simpson over 2m+1 uniform samples with spacing h."""
    fvals = np.asarray(fvals, dtype=np.float64)
    n = fvals.size
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson needs an odd sample count >= 3")
    s = fvals[0] + fvals[-1] + 4.0 * fvals[1:-1:2].sum() + 2.0 * fvals[2:-1:2].sum()
    return float(s * h / 3.0)


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    initial_panels: int = 64,
    rel_tol: float = 1e-6,
    max_panels: int = 2**22,
    abs_floor: float = 0.0,
) -> SimpsonResult:
    """Integrate vectorized f over [a, b], doubling panels until stable.

    Convergence: |I_2n - I_n| <= rel_tol * |I_2n| (or <= abs_floor, for
    integrals whose true value is ~0).  Raises QuadratureError when the
    panel cap is exceeded; callers map this to the non-convergence exit
    path rather than accepting an unconverged value.
    """
    if not b > a:
        raise ValueError("empty or inverted interval")
    panels = max(2, int(initial_panels))
    if panels % 2:
        panels += 1

    def run(n_panels: int) -> float:
        x = np.linspace(a, b, n_panels + 1)
        return simpson_uniform(f(x), (b - a) / n_panels)

    prev = run(panels)
    while True:
        if panels * 2 > max_panels:
            raise QuadratureError(
                f"no convergence below {rel_tol:g} within {max_panels} panels"
            )
        panels *= 2
        cur = run(panels)
        change = abs(cur - prev)
        if change <= rel_tol * abs(cur) or change <= abs_floor:
            return SimpsonResult(cur, panels, change, True)
        prev = cur


# Composite Boole on N = 4m+1 samples: weights (2h/45) * [7, 32, 12, 32,
# 14, 32, 12, 32, ..., 14, 32, 12, 32, 7]; interior panel joints carry 14.


def boole_point_count(n_panels: int) -> int:
    """Samples needed for n_panels Boole panels (each panel spans 4 steps)."""
    if n_panels < 1:
        raise ValueError("need at least one panel")
    return 4 * n_panels + 1


def boole_weight(indices: np.ndarray, n_points: int) -> np.ndarray:
    """Unnormalized Boole weights for global sample indices.

    Multiply the weighted sum by 2h/45.  `n_points` must be 4m+1; indices
    may be any subset, enabling chunked accumulation over huge grids.
    """
    if n_points < 5 or (n_points - 1) % 4:
        raise ValueError("Boole grid must have 4m+1 points")
    idx = np.asarray(indices)
    w = np.empty(idx.shape, dtype=np.float64)
    r = idx % 4
    w[r == 1] = 32.0
    w[r == 3] = 32.0
    w[r == 2] = 12.0
    joint = r == 0
    w[joint] = 14.0
    w[idx == 0] = 7.0
    w[idx == n_points - 1] = 7.0
    return w


def boole_sum(fvals: np.ndarray, h: float) -> float:
    """Composite Boole over 4m+1 uniform real samples with spacing h."""
    fvals = np.asarray(fvals, dtype=np.float64)
    w = boole_weight(np.arange(fvals.size), fvals.size)
    return float((2.0 * h / 45.0) * np.dot(w, fvals))
