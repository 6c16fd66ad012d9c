"""Weighted prime-triple counts and their frequency-side decomposition.

The central object is the weighted number of triples (p1, p2, p3) of
floor-power primes in a window (lambda0*X, X] whose linear form
l1*p1 + l2*p2 + l3*p3 + eta lands within a search width eps of zero,
each triple weighted by theta(form) * (p1*p2*p3)^(1-gamma) * log p1 *
log p2 * log p3.  Expanding theta through its transform turns that count
into an integral of Theta(t) times three exponential sums and a unit
phase, which splits into three bands: |t| < Delta (main term),
Delta <= |t| <= H (oscillatory middle), and |t| > H (far tail).

This module computes both sides at desk scale: the count directly by a
sorted meet-in-the-middle sweep, the three band integrals by
oscillation-resolving Boole quadrature on uniform grids, the main-term
box integral and its remainder majorant, the closed-form far-tail bound,
and the middle-band majorant chain.  Band grids are processed in
fixed-size chunks accumulated in index order, so totals are
deterministic and independent of the evaluation schedule.

The triple weight carries the factor (p1*p2*p3)^(1-gamma): the
exponential sums are weighted by p^(1-gamma) * log p, so the transform
identity closes only with that factor present on the direct side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import SmoothingKernel, make_kernel, theta, theta_transform, transform_bound
from .params import Coefficients, ParameterError, RunParameters, feasible_box_check
from .primes import PSPrimeSet, ps_indicator
from .quadrature import QuadratureError, adaptive_simpson, boole_weight
from .summation import NeumaierSum

__all__ = [
    "TripleRecord",
    "TripleSumResult",
    "MiddleBand",
    "Gamma2Majorant",
    "BoxIntegral",
    "PhiBound",
    "TailBound3",
    "DecompositionResult",
    "big_gamma_direct",
    "triple_sum_bruteforce",
    "find_triples",
    "triple_threshold",
    "threshold_vacuous",
    "gamma_piece",
    "piece3_truncation",
    "middle_band_sweep",
    "gamma2_majorant",
    "integral_J",
    "box_integral_B",
    "phi_bound",
    "tail_bound_gamma3",
    "far_tail_majorant",
    "decompose",
]

# Uniform band grids are evaluated in fixed chunks; changing this would
# regroup the partial sums and perturb totals at the compensated-sum
# noise floor, so it is a module constant rather than a parameter.
_CHUNK = 1 << 21

# Hard cap on band grid sizes; beyond this the quadrature is declared
# non-convergent rather than attempted.
_MAX_BAND_POINTS = 1 << 31

_BRUTE_LIMIT = 512


def _check_set(params: RunParameters, pset: PSPrimeSet) -> None:
    """The prime set must cover exactly the window (lambda0*X, X]."""
    if not math.isclose(pset.gamma.value, params.gamma.value, rel_tol=1e-15):
        raise ParameterError(
            f"prime set gamma {pset.gamma.value!r} does not match "
            f"instance gamma {params.gamma.value!r}"
        )
    lo = params.lambda0 * params.X
    tol = 1e-9 * params.X
    if abs(pset.lo - lo) > tol or abs(pset.hi - params.X) > tol:
        raise ParameterError(
            f"prime set window ({pset.lo}, {pset.hi}] does not match "
            f"instance window ({lo}, {params.X}]"
        )


def _full_weights(pset: PSPrimeSet) -> np.ndarray:
    # p^(1-gamma) * log p, the per-prime factor of the triple weight
    return pset.weight_w * pset.weight_log


@dataclass(frozen=True)
class TripleRecord:
    """One verified triple with its form value and weight."""

    p1: int
    p2: int
    p3: int
    form_value: float
    weight: float
    threshold_value: float
    within_threshold: bool


@dataclass(frozen=True)
class TripleSumResult:
    value: float
    triples_found: int
    empty_set: bool


def _matched_sweep(
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    pset: PSPrimeSet,
    eps_search: float,
    collect: bool,
):
    """Meet-in-the-middle sweep over sorted l3*p3 values.

    For each (p1, p2) the admissible p3 lie in an interval of the sorted
    array, found by two binary searches; the open window |form| < eps
    exactly matches the kernel support, on whose boundary theta
    vanishes, so no weight is lost at the edges.  Returns the
    compensated weighted total, the window population, and (optionally)
    the raw matched triples.
    """
    lam1, lam2, lam3 = coeffs.lambdas
    p_int = pset.primes
    p = p_int.astype(np.float64)
    w = _full_weights(pset)
    z3 = lam3 * p
    order = np.argsort(z3, kind="stable")
    z3s = z3[order]
    w3s = w[order]
    p3s = p_int[order]

    acc = NeumaierSum()
    found = 0
    raw: list[tuple[int, int, int, float, float]] = []
    n = p.size
    for i in range(n):
        targets = (lam1 * p[i] + coeffs.eta) + lam2 * p
        lo = np.searchsorted(z3s, -targets - eps_search, side="right")
        hi = np.searchsorted(z3s, -targets + eps_search, side="left")
        for j in np.nonzero(hi > lo)[0]:
            sl = slice(int(lo[j]), int(hi[j]))
            forms = targets[j] + z3s[sl]
            weights = (w[i] * w[j]) * (w3s[sl] * theta(kernel, forms))
            found += forms.size
            for v in weights:
                acc.add(float(v))
            if collect:
                pi = int(p_int[i])
                pj = int(p_int[j])
                for p3v, fv, wv in zip(p3s[sl], forms, weights):
                    raw.append((pi, pj, int(p3v), float(fv), float(wv)))
    return acc.value, found, raw


def big_gamma_direct(
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    pset: PSPrimeSet,
    eps_search: float,
) -> TripleSumResult:
    """Weighted triple count by meet-in-the-middle over sorted l3*p3.

    O(n^2 log n) instead of the cubic triple loop; deterministic, with
    per-triple weights accumulated compensated so the total is
    insensitive to enumeration order at the 1e-10 level.  The window
    population triples_found is boundary-sensitive: a form landing
    within rounding of the search width may count or not depending on
    association order, but carries zero weight either way.
    """
    _check_set(params, pset)
    if not eps_search > 0.0:
        raise ParameterError(f"eps_search must be positive, got {eps_search}")
    if not math.isclose(kernel.epsilon, eps_search, rel_tol=1e-12):
        raise ParameterError(
            f"kernel width {kernel.epsilon!r} does not match "
            f"search width {eps_search!r}"
        )
    if pset.count == 0:
        return TripleSumResult(0.0, 0, True)
    value, found, _ = _matched_sweep(coeffs, kernel, pset, eps_search, False)
    return TripleSumResult(value, found, False)


def triple_sum_bruteforce(
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    pset: PSPrimeSet,
    eps_search: float,
) -> TripleSumResult:
    """Cubic reference enumeration; oracle for the sweep on small sets."""
    _check_set(params, pset)
    if not eps_search > 0.0:
        raise ParameterError(f"eps_search must be positive, got {eps_search}")
    if pset.count == 0:
        return TripleSumResult(0.0, 0, True)
    if pset.count > _BRUTE_LIMIT:
        raise ParameterError(
            f"brute force capped at {_BRUTE_LIMIT} primes, got {pset.count}"
        )
    lam1, lam2, lam3 = coeffs.lambdas
    p = pset.primes.astype(np.float64)
    w = _full_weights(pset)
    forms = (
        lam1 * p[:, None, None]
        + lam2 * p[None, :, None]
        + lam3 * p[None, None, :]
        + coeffs.eta
    )
    mask = np.abs(forms) < eps_search
    found = int(mask.sum())
    if found == 0:
        return TripleSumResult(0.0, 0, False)
    wprod = w[:, None, None] * w[None, :, None] * w[None, None, :]
    vals = wprod[mask] * theta(kernel, forms[mask])
    acc = NeumaierSum()
    for v in vals:
        acc.add(float(v))
    return TripleSumResult(acc.value, found, False)


def triple_threshold(gamma: float, p_max: int) -> float:
    """Admissibility width at the largest prime of a triple:
    p^((37-38*gamma)/26) * (log p)^10."""
    if p_max < 2:
        raise ParameterError(f"p_max must be a prime >= 2, got {p_max}")
    lp = math.log(p_max)
    return math.exp((37.0 - 38.0 * gamma) / 26.0 * lp) * lp**10


def threshold_vacuous(params: RunParameters, coeffs: Coefficients) -> bool:
    """True when the formula width exceeds every attainable |form| on the
    window, so the per-triple threshold check cannot fail.  Desk-scale
    instances are in this regime: the tenth log power dominates."""
    reach = sum(abs(l) for l in coeffs.lambdas) * params.X + abs(coeffs.eta)
    return params.epsilon > reach


def find_triples(
    params: RunParameters,
    coeffs: Coefficients,
    pset: PSPrimeSet,
    eps_search: float,
    max_results: int = 1000,
) -> list[TripleRecord]:
    """Explicit triples with |form| < eps_search, nearest-to-zero first.

    Each emitted record is re-verified from scratch: both floor-power
    membership checks and the form evaluation are redone outside the
    sweep.  Sets with fewer than three primes are degenerate and yield
    no triples.  The threshold fields compare |form| against the
    admissibility width at the triple's largest prime.
    """
    _check_set(params, pset)
    if not eps_search > 0.0:
        raise ParameterError(f"eps_search must be positive, got {eps_search}")
    if max_results < 1:
        raise ParameterError(f"max_results must be >= 1, got {max_results}")
    if pset.count < 3:
        return []
    k = max(1, math.floor(params.log_X))
    kern = make_kernel(eps_search, k)
    _, _, raw = _matched_sweep(coeffs, kern, pset, eps_search, True)
    raw.sort(key=lambda r: (abs(r[3]), r[0], r[1], r[2]))
    gamma = params.gamma.value
    lam1, lam2, lam3 = coeffs.lambdas
    # Recomputing the form associates the additions differently from the
    # sweep, so agreement is only up to rounding at the form's dynamic
    # range, not at the search width.
    reach = sum(abs(l) for l in coeffs.lambdas) * params.X + abs(coeffs.eta)
    tol = 1e-12 * max(1.0, reach)
    out: list[TripleRecord] = []
    for p1, p2, p3, form, weight in raw[:max_results]:
        for q in (p1, p2, p3):
            if ps_indicator(q, gamma) != 1:
                raise RuntimeError(
                    f"re-verification failed: {q} is not a floor-power prime"
                )
        check = lam1 * p1 + lam2 * p2 + lam3 * p3 + coeffs.eta
        if not (abs(check) < eps_search + tol and abs(check - form) <= tol):
            raise RuntimeError(
                f"re-verification failed: form of ({p1},{p2},{p3}) "
                f"recomputes to {check!r}, sweep gave {form!r}"
            )
        thr = triple_threshold(gamma, max(p1, p2, p3))
        out.append(
            TripleRecord(p1, p2, p3, form, weight, thr, abs(form) < thr)
        )
    return out


# ---------------------------------------------------------------------------
# band quadrature


def _band_grid(
    t_lo: float, t_hi: float, coeffs: Coefficients, params: RunParameters,
    points_per_period: int,
) -> tuple[int, float]:
    """Uniform grid resolving the fastest phase on the band.

    The integrand's modes oscillate at frequencies up to
    max|l_i| * X + |eta| independent of t, so a uniform spacing of
    points_per_period samples per extreme period resolves the whole
    band; point counts are rounded up to the 4m+1 a Boole rule needs.
    """
    if not t_hi > t_lo:
        raise ParameterError(f"empty band [{t_lo}, {t_hi}]")
    if points_per_period < 6:
        raise ParameterError(
            f"points_per_period must be >= 6, got {points_per_period}"
        )
    nu = max(abs(l) for l in coeffs.lambdas) * params.X + abs(coeffs.eta)
    span = t_hi - t_lo
    m = max(2, math.ceil(span * points_per_period * nu / 4.0))
    n_points = 4 * m + 1
    if n_points > _MAX_BAND_POINTS:
        raise QuadratureError(
            f"band [{t_lo:.6g}, {t_hi:.6g}] needs {n_points} grid points, "
            f"beyond the {_MAX_BAND_POINTS} cap"
        )
    return n_points, span / (4 * m)


def _band_quadrature(
    params: RunParameters,
    coeffs: Coefficients,
    pset: PSPrimeSet,
    kernel: SmoothingKernel | None,
    t_lo: float,
    t_hi: float,
    points_per_period: int,
    collect: bool,
):
    """Boole quadrature of Theta * S1 * S2 * S3 * e(eta t) over [t_lo, t_hi].

    Chunked over the grid in index order; each chunk's three exponential
    sums come from the gridded evaluator.  With collect the sweep also
    accumulates the squared-modulus integrals, the pointwise minimum of
    the first two moduli (its supremum and two weighted integrals), all
    Boole-weighted over the same grid.  With kernel None only the
    statistics are computed.
    """
    from .expsums import ps_sum_grid

    n_points, h = _band_grid(t_lo, t_hi, coeffs, params, points_per_period)
    lam = coeffs.lambdas
    eta = coeffs.eta
    re_acc = NeumaierSum()
    im_acc = NeumaierSum()
    t_acc = [NeumaierSum(), NeumaierSum(), NeumaierSum()]
    cross_acc = NeumaierSum()
    sq_acc = NeumaierSum()
    sup = 0.0
    for start in range(0, n_points, _CHUNK):
        count = min(_CHUNK, n_points - start)
        t0 = t_lo + start * h
        wq = boole_weight(np.arange(start, start + count), n_points)
        sums = [ps_sum_grid(pset, l, t0, h, count) for l in lam]
        if kernel is not None:
            t_grid = t0 + h * np.arange(count)
            integ = theta_transform(kernel, t_grid) * (sums[0] * sums[1] * sums[2])
            if eta != 0.0:
                integ = integ * np.exp(
                    (2j * np.pi) * np.mod(eta * t_grid, 1.0)
                )
            re_acc.add(float(np.dot(wq, integ.real)))
            im_acc.add(float(np.dot(wq, integ.imag)))
        if collect:
            a = [np.abs(s) for s in sums]
            small = np.minimum(a[0], a[1])
            sup = max(sup, float(small.max()))
            for kk in range(3):
                t_acc[kk].add(float(np.dot(wq, a[kk] * a[kk])))
            cross_acc.add(float(np.dot(wq, small * (a[2] * (a[0] + a[1])))))
            sq_acc.add(
                float(np.dot(wq, small * (a[0] ** 2 + a[1] ** 2 + a[2] ** 2)))
            )
    scale = 2.0 * h / 45.0
    value = None
    if kernel is not None:
        value = complex(re_acc.value * scale, im_acc.value * scale)
    stats = None
    if collect:
        stats = (
            tuple(acc.value * scale for acc in t_acc),
            sup,
            cross_acc.value * scale,
            sq_acc.value * scale,
        )
    return value, stats, n_points, h


def piece3_truncation(params: RunParameters, kernel: SmoothingKernel) -> float:
    """Point past which the transform's decay branch drops below
    1e-12 * X^(3-3*gamma); quadrature beyond it is pure noise against
    the analytic tail bound.  May land at or below the band start, in
    which case the far band contributes only its bound."""
    k = kernel.k
    g = params.gamma.value
    log_c = math.log(4.0 * k / (math.pi * kernel.epsilon))
    log_tol = math.log(1e-12) + (3.0 - 3.0 * g) * params.log_X
    return math.exp((k * log_c - math.log(math.pi) - log_tol) / (k + 1))


def gamma_piece(
    piece: int,
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    pset: PSPrimeSet,
    points_per_period: int = 12,
) -> complex:
    """One band of the transform-side integral, as a complex number.

    Piece 1 covers |t| < Delta on a symmetric grid, so its imaginary
    part is a quadrature diagnostic (zero up to grid noise when eta =
    0).  Pieces 2 and 3 pair t with -t analytically: the integrand at
    -t is the conjugate of the integrand at t, so each equals twice the
    real part of its one-sided integral and carries imaginary part
    exactly zero.  Piece 3 is truncated where the transform's decay
    branch is negligible; the remainder is covered by the analytic
    bound, never by quadrature.

    For the standard decomposition the kernel should be built with the
    search width and k = floor(log X).
    """
    if piece not in (1, 2, 3):
        raise ParameterError(f"piece must be 1, 2, or 3, got {piece!r}")
    _check_set(params, pset)
    delta = params.Delta
    h_eff = params.H_effective
    if piece == 1:
        value, _, _, _ = _band_quadrature(
            params, coeffs, pset, kernel, -delta, delta, points_per_period, False
        )
        return value
    if piece == 2:
        value, _, _, _ = _band_quadrature(
            params, coeffs, pset, kernel, delta, h_eff, points_per_period, False
        )
        return complex(2.0 * value.real, 0.0)
    t_cut = piece3_truncation(params, kernel)
    if t_cut <= h_eff:
        return complex(0.0, 0.0)
    value, _, _, _ = _band_quadrature(
        params, coeffs, pset, kernel, h_eff, t_cut, points_per_period, False
    )
    return complex(2.0 * value.real, 0.0)


@dataclass(frozen=True)
class MiddleBand:
    """One-sided sweep of [Delta, H] with its byproduct statistics.

    half_integral is the one-sided integral of Theta * S1 * S2 * S3 *
    e(eta t) (None when no kernel was supplied); t_integrals are the
    one-sided integrals of |S(l_k t)|^2; sup_small_pair is the supremum
    of min(|S1|, |S2|); cross_integral and squares_integral are the
    weighted integrals of that minimum against |S3|(|S1|+|S2|) and
    |S1|^2+|S2|^2+|S3|^2.
    """

    half_integral: "complex | None"
    t_integrals: tuple[float, float, float]
    sup_small_pair: float
    cross_integral: float
    squares_integral: float
    n_points: int
    spacing: float

    @property
    def gamma2(self) -> "complex | None":
        if self.half_integral is None:
            return None
        return complex(2.0 * self.half_integral.real, 0.0)


def middle_band_sweep(
    params: RunParameters,
    coeffs: Coefficients,
    pset: PSPrimeSet,
    kernel: SmoothingKernel | None = None,
    points_per_period: int = 12,
) -> MiddleBand:
    """Single pass over [Delta, H] collecting the middle-band integral
    (when a kernel is given) together with everything the majorant
    chain needs, so the expensive sweep is never run twice."""
    _check_set(params, pset)
    value, stats, n_points, h = _band_quadrature(
        params,
        coeffs,
        pset,
        kernel,
        params.Delta,
        params.H_effective,
        points_per_period,
        True,
    )
    t_ints, sup, cross, squares = stats
    return MiddleBand(value, t_ints, sup, cross, squares, n_points, h)


@dataclass(frozen=True)
class Gamma2Majorant:
    """Majorant chain for the middle band, loosest to tightest reversed.

    Writing F = min(|S1|, |S2|), the three bounds are

        bound_cross   = (7 eps / 2) * int F * |S3| (|S1| + |S2|)
        bound_squares = (7 eps / 2) * int F * (|S1|^2 + |S2|^2 + |S3|^2)
        bound_factored= (7 eps / 2) * sup F * (T1 + T2 + T3)

    each an upper bound for |middle band| (the product of three moduli
    is at most F times |S3|(|S1|+|S2|), pointwise), and each at most the
    next.  value is bound_squares.  The shape ratios compare sup F
    against X^((37-12 gamma)/26) * log^5 X and each T_k against
    H * X^(2-gamma) * log^2 X.
    """

    value: float
    bound_cross: float
    bound_squares: float
    bound_factored: float
    prefactor: float
    t_integrals: tuple[float, float, float]
    sup_small_pair: float
    sup_shape_ratio: float
    t_shape_ratios: tuple[float, float, float]


def gamma2_majorant(
    params: RunParameters,
    coeffs: Coefficients,
    pset: PSPrimeSet,
    points_per_period: int = 12,
    band: "MiddleBand | None" = None,
) -> Gamma2Majorant:
    """Assemble the middle-band majorant chain from a sweep's statistics.

    Uses the plateau bound 7*eps/4 on |Theta| with the instance's
    effective width (the canonical kernel width), and a factor 2 folding
    the band's negative half onto the positive one.
    """
    if band is None:
        band = middle_band_sweep(
            params, coeffs, pset, None, points_per_period
        )
    eps = params.epsilon_effective
    pref = 2.0 * (7.0 * eps / 4.0)
    cross = pref * band.cross_integral
    squares = pref * band.squares_integral
    t1, t2, t3 = band.t_integrals
    factored = pref * band.sup_small_pair * (t1 + t2 + t3)
    g = params.gamma.value
    lx = params.log_X
    sup_shape = math.exp((37.0 - 12.0 * g) / 26.0 * lx) * lx**5
    t_shape = params.H_effective * math.exp((2.0 - g) * lx) * lx**2
    return Gamma2Majorant(
        value=squares,
        bound_cross=cross,
        bound_squares=squares,
        bound_factored=factored,
        prefactor=pref,
        t_integrals=band.t_integrals,
        sup_small_pair=band.sup_small_pair,
        sup_shape_ratio=band.sup_small_pair / sup_shape,
        t_shape_ratios=(t1 / t_shape, t2 / t_shape, t3 / t_shape),
    )


# ---------------------------------------------------------------------------
# main term


def _interval_product(
    t_grid: np.ndarray, params: RunParameters, coeffs: Coefficients
) -> np.ndarray:
    """Product over i of gamma * L * sinc(l_i t L) * e(l_i t mid), the
    window integral of gamma * e(alpha y) at alpha = l_i t."""
    g = params.gamma.value
    length = (1.0 - params.lambda0) * params.X
    mid = 0.5 * (params.lambda0 * params.X + params.X)
    out = np.ones(t_grid.shape, dtype=np.complex128)
    for l in coeffs.lambdas:
        alpha = l * t_grid
        out = out * (
            g
            * length
            * np.sinc(alpha * length)
            * np.exp((2j * np.pi) * np.mod(alpha * mid, 1.0))
        )
    return out


def integral_J(
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    points_per_period: int = 12,
) -> float:
    """Main-band integral with the exponential sums replaced by their
    window integrals; real by conjugate symmetry, computed on the full
    symmetric grid with the imaginary residue checked against an
    absolute scale set by the integrand's supremum."""
    delta = params.Delta
    n_points, h = _band_grid(-delta, delta, coeffs, params, points_per_period)
    t_grid = -delta + h * np.arange(n_points)
    integ = theta_transform(kernel, t_grid) * _interval_product(
        t_grid, params, coeffs
    )
    if coeffs.eta != 0.0:
        integ = integ * np.exp((2j * np.pi) * np.mod(coeffs.eta * t_grid, 1.0))
    wq = boole_weight(np.arange(n_points), n_points)
    scale = 2.0 * h / 45.0
    value = complex(
        float(np.dot(wq, integ.real)) * scale,
        float(np.dot(wq, integ.imag)) * scale,
    )
    g = params.gamma.value
    sup_scale = (g * (1.0 - params.lambda0) * params.X) ** 3 * 2.0 * delta
    if abs(value.imag) > 1e-9 * sup_scale:
        raise QuadratureError(
            f"main-band integral has imaginary residue {value.imag!r} "
            f"beyond the symmetry tolerance"
        )
    return value.real


@dataclass(frozen=True)
class BoxIntegral:
    value: float
    feasible: bool
    ratio_eps_x2: float
    panels: int
    converged: bool


def box_integral_B(
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    rel_tol: float = 1e-5,
    initial_panels: int = 64,
    max_panels: int = 4096,
) -> BoxIntegral:
    """Main term: theta(form) integrated over the cube (lambda0*X, X]^3.

    For fixed (y1, y2) the inner integral is the theta antiderivative
    evaluated across an interval of length |l3| * (1 - lambda0) * X and
    divided by |l3|; the antiderivative is exact for the mesh-linear
    theta, so only the outer double integral needs composite Simpson,
    refined by doubling until stable.  Infeasible instances return zero
    with the flag down.
    """
    feasible = feasible_box_check(
        coeffs, params.lambda0, params.X, kernel.epsilon
    )
    if not feasible:
        return BoxIntegral(0.0, False, 0.0, 0, True)
    lam1, lam2, lam3 = coeffs.lambdas
    x = params.X
    lo_edge = params.lambda0 * x
    mesh = kernel.mesh_y
    dy = mesh[1] - mesh[0]
    grid = kernel.grid
    cdf = np.concatenate(
        ([0.0], np.cumsum(0.5 * (grid[1:] + grid[:-1]) * dy))
    )
    shift_a = lam3 * x
    shift_b = lam3 * lo_edge

    def outer(n_panels: int) -> float:
        nodes = np.linspace(lo_edge, x, n_panels + 1)
        h = (x - lo_edge) / n_panels
        w1d = np.ones(n_panels + 1)
        w1d[1:-1:2] = 4.0
        w1d[2:-1:2] = 2.0
        w1d *= h / 3.0
        total = 0.0
        block = max(1, (1 << 22) // (n_panels + 1))
        base_cols = lam2 * nodes + coeffs.eta
        for s in range(0, n_panels + 1, block):
            rows = nodes[s : s + block]
            base = lam1 * rows[:, None] + base_cols[None, :]
            ua = base + shift_a
            ub = base + shift_b
            hi = np.maximum(ua, ub)
            lo = np.minimum(ua, ub)
            inner = (np.interp(hi, mesh, cdf) - np.interp(lo, mesh, cdf)) / abs(
                lam3
            )
            total += float(np.dot(w1d[s : s + block], inner @ w1d))
        return total

    panels = max(4, int(initial_panels))
    if panels % 2:
        panels += 1
    prev = outer(panels)
    converged = False
    while panels < max_panels:
        panels *= 2
        cur = outer(panels)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            prev = cur
            converged = True
            break
        prev = cur
    g = params.gamma.value
    value = g**3 * prev
    ratio = value / (kernel.epsilon * x * x)
    return BoxIntegral(value, True, ratio, panels, converged)


@dataclass(frozen=True)
class PhiBound:
    value: float
    shape_ratio: float
    cutoff: float
    tail_part: float


def phi_bound(
    params: RunParameters,
    kernel: SmoothingKernel,
    coeffs: Coefficients,
    rel_tol: float = 1e-7,
) -> PhiBound:
    """Majorant for the difference between the main-band integral and
    the box term: both half-lines |t| > Delta of |Theta| times the
    product of min(plateau, decay) window-integral bounds, by adaptive
    quadrature to a cutoff plus a closed-form remainder.

    The shape ratio records value / (eps / Delta^2).
    """
    g = params.gamma.value
    plateau = g * (1.0 - params.lambda0) * params.X
    lams = coeffs.lambdas
    delta = params.Delta
    k = kernel.k
    eps = kernel.epsilon

    def f(t: np.ndarray) -> np.ndarray:
        out = transform_bound(kernel, t)
        for l in lams:
            out = out * np.minimum(plateau, 1.0 / (np.pi * abs(l) * t))
        return out

    # the envelope spans many decades of t and decays like a power, so
    # integrate in u = log t where it is a mild exponential profile
    def f_log(u: np.ndarray) -> np.ndarray:
        t = np.exp(u)
        return f(t) * t

    decay_corner = 4.0 * k / (math.pi * eps)
    arm_corner = max(1.0 / (math.pi * abs(l) * plateau) for l in lams)
    cutoff = max(2.0 * delta, 1.25 * decay_corner, 1.25 * arm_corner)
    main = adaptive_simpson(
        f_log, math.log(delta), math.log(cutoff), initial_panels=256,
        rel_tol=rel_tol, max_panels=1 << 22,
    ).value
    # Beyond the cutoff every min picks its decay arm and |Theta| its
    # k-th power branch, so the remainder integrates in closed form.
    prod_l = abs(lams[0] * lams[1] * lams[2])
    log_tail = (
        math.log(2.0)
        + k * math.log(decay_corner)
        - math.log(math.pi**4 * prod_l * (k + 3))
        - (k + 3) * math.log(cutoff)
    )
    tail = math.exp(log_tail)
    value = 2.0 * main + tail
    shape = kernel.epsilon / (delta * delta)
    return PhiBound(value, value / shape, cutoff, tail)


# ---------------------------------------------------------------------------
# far tail


@dataclass(frozen=True)
class TailBound3:
    value: float
    base: float
    below_one: bool
    k: int
    log_value: float


def tail_bound_gamma3(
    params: RunParameters, kernel: SmoothingKernel
) -> TailBound3:
    """Closed-form far-band bound X^(3-3*gamma)/k * (4k/(pi eps H))^k.

    Evaluated in log space; with the formula width and band edge the
    base collapses to 4k/(pi log^2 X), below one for large X, so the
    k-th power drives the bound toward zero.  The flag reports whether
    the bound itself is at most one.  Finite for any k >= 1.
    """
    k = kernel.k
    g = params.gamma.value
    base = 4.0 * k / (math.pi * kernel.epsilon * params.H_effective)
    log_value = (
        (3.0 - 3.0 * g) * params.log_X
        - math.log(k)
        + k * math.log(base)
    )
    value = math.exp(log_value) if log_value < 700.0 else math.inf
    return TailBound3(value, base, value <= 1.0, k, log_value)


def far_tail_majorant(
    params: RunParameters,
    coeffs: Coefficients,
    kernel: SmoothingKernel,
    pset: PSPrimeSet,
) -> float:
    """Rigorous envelope for the whole far band |t| > H: the transform's
    decay branch integrates to (2/(pi k)) * (4k/(pi eps H))^k against
    the exact supremum S(0)^3 of the three-sum product.  Unlike the
    closed-form bound above, this uses the window's true sum at zero
    rather than a scale shape, so it majorizes the truncated quadrature
    on any instance."""
    _check_set(params, pset)
    s0 = float(np.dot(pset.weight_w, pset.weight_log))
    if s0 == 0.0:
        return 0.0
    k = kernel.k
    base = 4.0 * k / (math.pi * kernel.epsilon * params.H_effective)
    log_value = (
        math.log(2.0)
        - math.log(math.pi * k)
        + 3.0 * math.log(s0)
        + k * math.log(base)
    )
    return math.exp(log_value) if log_value < 700.0 else math.inf


# ---------------------------------------------------------------------------
# orchestration


@dataclass(frozen=True)
class DecompositionResult:
    """Both sides of the transform identity with every bound attached.

    gamma1..3 are the three band integrals (piece 2 and 3 real by
    construction), gamma_total their sum; direct_value and triples_found
    come from the meet-in-the-middle count when requested, with
    closure_error the relative gap between the two sides.  The scale
    ratio reports Re(gamma_total) / (eps X^2) without asserting any
    constant."""

    gamma1: complex
    gamma2: complex
    gamma3: complex
    gamma_total: complex
    j_integral: float
    box_integral: float
    phi_bound_value: float
    tail_bound_value: float
    direct_value: "float | None"
    triples_found: "int | None"
    closure_error: "float | None"
    scale_ratio: float
    piece3_cut: float
    truncation_empty: bool
    middle: MiddleBand
    majorant: Gamma2Majorant
    box: BoxIntegral
    phi: PhiBound
    tail: TailBound3


def decompose(
    params: RunParameters,
    coeffs: Coefficients,
    pset: PSPrimeSet,
    kernel: SmoothingKernel | None = None,
    points_per_period: int = 12,
    with_direct: bool = True,
) -> DecompositionResult:
    """Full desk-scale decomposition of the weighted triple count.

    Builds the canonical kernel (effective width, k = floor(log X))
    unless one is supplied, evaluates the three band integrals sharing
    a single middle-band sweep, the main term and its remainder bound,
    the far-tail bounds, and (by default) the direct count closing the
    transform identity.
    """
    _check_set(params, pset)
    if kernel is None:
        k = max(1, math.floor(params.log_X))
        kernel = make_kernel(params.epsilon_effective, k)
    delta = params.Delta
    h_eff = params.H_effective

    g1, _, _, _ = _band_quadrature(
        params, coeffs, pset, kernel, -delta, delta, points_per_period, False
    )
    band = middle_band_sweep(params, coeffs, pset, kernel, points_per_period)
    g2 = band.gamma2

    t_cut = piece3_truncation(params, kernel)
    truncation_empty = t_cut <= h_eff
    if truncation_empty:
        g3 = complex(0.0, 0.0)
    else:
        v3, _, _, _ = _band_quadrature(
            params, coeffs, pset, kernel, h_eff, t_cut, points_per_period, False
        )
        g3 = complex(2.0 * v3.real, 0.0)

    total = g1 + g2 + g3

    direct_value = None
    found = None
    closure = None
    if with_direct:
        direct = big_gamma_direct(params, coeffs, kernel, pset, kernel.epsilon)
        direct_value = direct.value
        found = direct.triples_found
        if direct_value != 0.0:
            closure = abs(total.real - direct_value) / abs(direct_value)

    j_val = integral_J(params, coeffs, kernel, points_per_period)
    box = box_integral_B(params, coeffs, kernel)
    phi = phi_bound(params, kernel, coeffs)
    tail = tail_bound_gamma3(params, kernel)
    majorant = gamma2_majorant(params, coeffs, pset, band=band)
    eps = params.epsilon_effective
    scale_ratio = total.real / (eps * params.X * params.X)
    return DecompositionResult(
        gamma1=g1,
        gamma2=g2,
        gamma3=g3,
        gamma_total=total,
        j_integral=j_val,
        box_integral=box.value,
        phi_bound_value=phi.value,
        tail_bound_value=tail.value,
        direct_value=direct_value,
        triples_found=found,
        closure_error=closure,
        scale_ratio=scale_ratio,
        piece3_cut=t_cut,
        truncation_empty=truncation_empty,
        middle=band,
        majorant=majorant,
        box=box,
        phi=phi,
        tail=tail,
    )
