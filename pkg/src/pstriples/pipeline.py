"""End-to-end runs: stages, deterministic reports, manifest.

A run takes a validated RunConfig, executes a subset of named stages in
dependency order, and leaves every artifact in one output directory
together with a JSON manifest: the config echo, the derived parameters,
per-stage wall times, the operations each stage called, and a sha256
digest of every file written.  All report files are plain CSV with `.`
decimal and 17 significant digits, so identical inputs reproduce
identical bytes; the manifest's wall times are the only run-to-run
variation.

Stages that need primes, a kernel, or the window set build them on
demand and share them; requesting only a late stage does not emit the
earlier stages' files.  The prime cache honors the PSD_CACHE_DIR
environment variable.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .approx import continued_fraction, dichotomy_probe
from .config import RunConfig
from .expsums import decomposition_residual, ps_exp_sum
from .kernel import make_kernel, theta, theta_transform, transform_bound, verify_bounds
from .params import Coefficients, ParameterError
from .primes import (
    CacheFormatError,
    PrimeTable,
    PSPrimeSet,
    cache_load,
    cache_store,
    ps_primes_in,
    sieve_primes,
)
from .triplesum import decompose, find_triples, threshold_vacuous

__all__ = [
    "STAGES",
    "OutputRecord",
    "StageRecord",
    "RunManifest",
    "PipelineError",
    "run_pipeline",
    "cache_dir",
    "params_dict",
    "decomp_values",
    "dichotomy_orientation",
]

# canonical execution order; dependencies only ever point left
STAGES = ("primes", "kernel", "sums", "dichotomy", "decomp", "triples")

_SUMS_ALPHA_POINTS = 65
_DICHOTOMY_POINTS = 257


class PipelineError(RuntimeError):
    """A stage failed; the partial manifest has already been written."""


@dataclass(frozen=True)
class OutputRecord:
    file: str
    sha256: str
    size: int


@dataclass(frozen=True)
class StageRecord:
    name: str
    wall_time_s: float
    ops: "tuple[str, ...]"
    outputs: "tuple[OutputRecord, ...]"
    values: "dict[str, object]"


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to audit or reproduce a run.

    Re-running with the same config and stages reproduces every output
    file byte for byte; wall times differ, digests do not.
    """

    tool_version: str
    config_path: str
    config_sha256: str
    config_echo: "dict[str, str]"
    parameters: "dict[str, object]"
    warnings: "tuple[str, ...]"
    stages: "tuple[StageRecord, ...]"
    threads_requested: int
    workers_used: int
    complete: bool
    failure: "dict[str, str] | None"

    def to_dict(self) -> dict:
        return asdict(self)


def cache_dir() -> "Path | None":
    """Prime cache directory from PSD_CACHE_DIR, or None when unset."""
    env = os.environ.get("PSD_CACHE_DIR")
    if not env:
        return None
    path = Path(env)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _digest(path: Path) -> OutputRecord:
    blob = path.read_bytes()
    return OutputRecord(path.name, hashlib.sha256(blob).hexdigest(), len(blob))


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def _fmt(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: Path, header: "list[str]", rows) -> OutputRecord:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return _digest(path)


def params_dict(cfg: RunConfig) -> "dict[str, object]":
    p = cfg.params
    c = cfg.coeffs
    return {
        "q0": p.q0,
        "gamma": p.gamma.value,
        "gamma_in_theorem_range": p.gamma.theorem_range,
        "lambda0": p.lambda0,
        "X": p.X,
        "Delta": p.Delta,
        "epsilon_formula": p.epsilon,
        "H_formula": p.H,
        "epsilon_user": p.epsilon_user,
        "epsilon_effective": p.epsilon_effective,
        "H_effective": p.H_effective,
        "log_X": p.log_X,
        "lambda1": c.lambda1,
        "lambda2": c.lambda2,
        "lambda3": c.lambda3,
        "eta": c.eta,
    }


class _Context:
    """Lazily built shared inputs; each is constructed at most once."""

    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg
        self.limit = int(math.ceil(cfg.params.X)) + 1
        self._table: PrimeTable | None = None
        self._full: PSPrimeSet | None = None
        self._window: PSPrimeSet | None = None
        self._kernel = None

    @property
    def table(self) -> PrimeTable:
        if self._table is None:
            self._table = sieve_primes(self.limit)
        return self._table

    @property
    def full_set(self) -> PSPrimeSet:
        """PS primes in (0, limit]; cached on disk when PSD_CACHE_DIR is set."""
        if self._full is not None:
            return self._full
        g = self.cfg.params.gamma.value
        cdir = cache_dir()
        path = None
        if cdir is not None:
            path = cdir / f"ps_g{g!r}_L{self.limit}.psp"
            try:
                self._full = cache_load(path, g)
                return self._full
            except (FileNotFoundError, CacheFormatError):
                pass
        self._full = ps_primes_in(0, self.limit, g, self.table)
        if path is not None:
            cache_store(self._full, path)
        return self._full

    @property
    def window_set(self) -> PSPrimeSet:
        if self._window is None:
            p = self.cfg.params
            self._window = ps_primes_in(
                p.lambda0 * p.X, p.X, p.gamma.value, self.table
            )
        return self._window

    @property
    def kernel(self):
        if self._kernel is None:
            p = self.cfg.params
            self._kernel = make_kernel(
                p.epsilon_effective, max(1, math.floor(p.log_X))
            )
        return self._kernel


def _stage_primes(ctx: _Context, out: Path):
    pset = ctx.window_set
    rows = zip(pset.primes.tolist(), pset.weight_w, pset.weight_log)
    rec = _write_csv(out / "primes.csv", ["p", "weight_w", "weight_log"], rows)
    cache_path = out / "psprimes.psp"
    cache_store(ctx.full_set, cache_path)
    values = {
        "window_lo": pset.lo,
        "window_hi": pset.hi,
        "window_count": pset.count,
        "full_count": ctx.full_set.count,
        "sieve_limit": ctx.limit,
    }
    ops = ("sieve_primes", "ps_primes_in", "cache_store")
    return ops, (rec, _digest(cache_path)), values


def _stage_kernel(ctx: _Context, out: Path):
    kern = ctx.kernel
    mesh = kern.mesh_y
    rec_theta = _write_csv(
        out / "kernel_theta.csv", ["y", "theta"],
        zip(mesh.tolist(), theta(kern, mesh).tolist()),
    )
    x = np.geomspace(1e-3 / kern.epsilon, 1e3 / kern.epsilon, 513)
    rec_tr = _write_csv(
        out / "kernel_transform.csv", ["x", "transform", "bound"],
        zip(x.tolist(), theta_transform(kern, x).tolist(),
            transform_bound(kern, x).tolist()),
    )
    report = verify_bounds(kern, x)
    values = {
        "epsilon": kern.epsilon,
        "k": kern.k,
        "mass": float(theta_transform(kern, 0.0)),
        "bound_checked": report.checked,
        "bound_violations": report.violations,
        "bound_min_slack": report.min_slack,
    }
    ops = ("make_kernel", "theta", "theta_transform", "transform_bound",
           "verify_bounds")
    return ops, (rec_theta, rec_tr), values


def _stage_sums(ctx: _Context, out: Path):
    params = ctx.cfg.params
    pset = ctx.window_set
    table = ctx.table
    alphas = np.linspace(0.0, 1.0, _SUMS_ALPHA_POINTS)
    rows = []
    res_rows = []
    worst = 0.0
    for a in alphas.tolist():
        s = ps_exp_sum(a, params, pset).value
        rows.append((a, s.real, s.imag, abs(s)))
        r = decomposition_residual(a, params, table)
        res_rows.append((a, r.identity_residual, r.sigma_gap))
        worst = max(worst, r.identity_residual)
    rec_s = _write_csv(out / "sums.csv", ["alpha", "re", "im", "abs"], rows)
    rec_r = _write_csv(
        out / "sums_residual.csv",
        ["alpha", "identity_residual", "sigma_gap"], res_rows,
    )
    values = {
        "alpha_points": int(alphas.size),
        "term_count": pset.count,
        "max_identity_residual": worst,
    }
    ops = ("ps_exp_sum", "decomposition_residual")
    return ops, (rec_s, rec_r), values


def dichotomy_orientation(cfg: RunConfig):
    """Canonical coefficients oriented so q0 is a convergent denominator.

    The two-scale probe references the ratio of the positive leads;
    which of them is written first is a labeling choice, so both
    orientations are tried before giving up.  Returns (coeffs, conv).
    """
    c = cfg.canonical
    swapped = Coefficients(
        c.lambda2, c.lambda1, c.lambda3, c.eta,
        irrationality_asserted=c.irrationality_asserted,
    )
    for cand in (c, swapped):
        seq = continued_fraction(cand.lambda1 / cand.lambda2, 64)
        conv = next(
            (r for r in seq.convergents if r.q == cfg.params.q0), None
        )
        if conv is not None:
            return cand, conv
    raise ParameterError(
        f"q0={cfg.params.q0} is not a convergent denominator of "
        f"lambda1/lambda2 in either orientation"
    )


def _stage_dichotomy(ctx: _Context, out: Path):
    cfg = ctx.cfg
    params = cfg.params
    c, conv = dichotomy_orientation(cfg)
    ts = np.geomspace(params.Delta, params.H_effective, _DICHOTOMY_POINTS)
    rows = []
    cases: dict[str, int] = {}
    unexplained = 0
    for t in ts.tolist():
        rep = dichotomy_probe(c, conv, params, t)
        rows.append((rep.t, rep.a1, rep.q1, rep.a2, rep.q2,
                     rep.class1, rep.class2, rep.case))
        cases[rep.case] = cases.get(rep.case, 0) + 1
        if not rep.explained:
            unexplained += 1
    path = out / "dichotomy.csv"
    lines = [",".join(["t", "a1", "q1", "a2", "q2", "class1", "class2", "case"])]
    for row in rows:
        lines.append(",".join(
            _fmt(v) if isinstance(v, (int, float)) else str(v) for v in row
        ))
    path.write_text("\n".join(lines) + "\n")
    values = {
        "convergent": f"{conv.a}/{conv.q}",
        "t_points": int(ts.size),
        "case_counts": dict(sorted(cases.items())),
        "unexplained": unexplained,
    }
    ops = ("continued_fraction", "dichotomy_probe")
    return ops, (_digest(path),), values


def _complex_pair(z: complex) -> "list[float]":
    return [z.real, z.imag]


def decomp_values(res) -> "dict[str, object]":
    """Flatten a decomposition result for the manifest (bounds, ratios)."""
    m = res.middle
    mj = res.majorant
    return {
        "gamma1": _complex_pair(res.gamma1),
        "gamma2": _complex_pair(res.gamma2),
        "gamma3": _complex_pair(res.gamma3),
        "gamma_total": _complex_pair(res.gamma_total),
        "direct_value": res.direct_value,
        "triples_found": res.triples_found,
        "closure_error": res.closure_error,
        "scale_ratio": res.scale_ratio,
        "j_integral": res.j_integral,
        "box_integral": res.box_integral,
        "box_converged": res.box.converged,
        "box_feasible": res.box.feasible,
        "box_ratio_eps_x2": res.box.ratio_eps_x2,
        "phi_bound": res.phi_bound_value,
        "phi_shape_ratio": res.phi.shape_ratio,
        "phi_cutoff": res.phi.cutoff,
        "tail_bound": res.tail_bound_value,
        "tail_base": res.tail.base,
        "tail_below_one": res.tail.below_one,
        "piece3_cut": res.piece3_cut,
        "truncation_empty": res.truncation_empty,
        "middle_points": m.n_points,
        "middle_spacing": m.spacing,
        "majorant_cross": mj.bound_cross,
        "majorant_squares": mj.bound_squares,
        "majorant_factored": mj.bound_factored,
        "majorant_sup_shape_ratio": mj.sup_shape_ratio,
        "majorant_t_shape_ratios": list(mj.t_shape_ratios),
    }


def _stage_decomp(ctx: _Context, out: Path):
    cfg = ctx.cfg
    res = decompose(cfg.params, cfg.coeffs, ctx.window_set, kernel=ctx.kernel)
    values = decomp_values(res)
    path = out / "decomp.json"
    path.write_text(json.dumps(values, indent=1, default=_json_default) + "\n")
    ops = ("decompose", "big_gamma_direct", "gamma_piece", "integral_J",
           "box_integral_B", "phi_bound", "tail_bound_gamma3",
           "gamma2_majorant")
    return ops, (_digest(path),), values


def _stage_triples(ctx: _Context, out: Path):
    cfg = ctx.cfg
    params = cfg.params
    eps = params.epsilon_effective
    records = find_triples(params, cfg.coeffs, ctx.window_set, eps)
    rec = _write_csv(
        out / "triples.csv", ["p1", "p2", "p3", "form_value", "weight"],
        ((r.p1, r.p2, r.p3, r.form_value, r.weight) for r in records),
    )
    values = {
        "eps_search": eps,
        "found": len(records),
        "formula_eps_vacuous": threshold_vacuous(params, cfg.coeffs),
    }
    ops = ("find_triples", "triple_threshold", "threshold_vacuous")
    return ops, (rec,), values


_STAGE_FUNCS = {
    "primes": _stage_primes,
    "kernel": _stage_kernel,
    "sums": _stage_sums,
    "dichotomy": _stage_dichotomy,
    "decomp": _stage_decomp,
    "triples": _stage_triples,
}


def _write_manifest(out: Path, manifest: RunManifest) -> None:
    (out / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=1, default=_json_default) + "\n"
    )


def run_pipeline(
    cfg: RunConfig,
    stages: "tuple[str, ...] | list[str] | set[str]" = STAGES,
    out_dir: "str | Path" = "pstriples_run",
    threads: int = 1,
) -> RunManifest:
    """Execute the requested stages and write the manifest.

    stages must be a subset of STAGES; they run in canonical order
    regardless of the order given.  A stage failure writes the partial
    manifest flagged incomplete, then re-raises the stage's exception.
    threads is recorded in the manifest; every stage runs sequential
    deterministic reductions, so workers_used is always 1.
    """
    wanted = set(stages)
    unknown = wanted - set(STAGES)
    if unknown:
        raise ValueError(
            f"unknown stage(s) {sorted(unknown)}; valid: {list(STAGES)}"
        )
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ctx = _Context(cfg)
    done: list[StageRecord] = []
    base = dict(
        tool_version=__version__,
        config_path=cfg.path,
        config_sha256=hashlib.sha256(cfg.source_text.encode()).hexdigest(),
        config_echo=dict(cfg.echo),
        parameters=params_dict(cfg),
        warnings=cfg.warnings,
        threads_requested=threads,
        workers_used=1,
    )
    for name in STAGES:
        if name not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            ops, outputs, values = _STAGE_FUNCS[name](ctx, out)
        except Exception as exc:
            manifest = RunManifest(
                **base, stages=tuple(done), complete=False,
                failure={"stage": name, "error": f"{type(exc).__name__}: {exc}"},
            )
            _write_manifest(out, manifest)
            raise
        done.append(StageRecord(
            name=name,
            wall_time_s=time.perf_counter() - t0,
            ops=ops,
            outputs=tuple(outputs),
            values=values,
        ))
    manifest = RunManifest(
        **base, stages=tuple(done), complete=True, failure=None,
    )
    _write_manifest(out, manifest)
    return manifest
