"""Experiment drivers behind the command-line interface.

Every driver takes an :class:`ExperimentConfig` and returns plain records
that the CLI serialises.  Floats are written with 17 significant digits and
rows come out in a fixed order, so reruns with the same configuration give
byte-identical CSV.  Wall times are kept out of CSV unless asked for.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from .bounds import (
    hakopian_pair_norms,
    hst_bounds_all,
    kergin_pair_norms,
    lagrange_lebesgue,
    outer_product_residual,
    pair_geometry_residual,
    pair_norms,
)
from .functions import REGISTRY
from .geometry import DEFAULT_ANGULAR, DEFAULT_RADIAL, make_disk_grid, random_disk_points
from .interpolants import (
    NodeConfiguration,
    affine_invariance_check,
    eval_pair_polys,
    hakopian,
    interpolant_to_json,
    kergin,
    newton_term,
    pairs,
    verify_mean_value_conditions,
)
from .leja import (
    LejaSection,
    canonical_leja,
    node_products,
    roots_of_unity_match,
    sampled_maximality,
    section_from_thetas,
)
from .mean_value import QuadratureRule, ScalarField, gauss_legendre_01
from .polys import BivariatePoly

DEFAULT_DEGREES = (2, 4, 5, 8, 13, 16, 32)
DERIVATIVE_ALPHAS = ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

# empirical calibration, not a theoretical rate
DECREASE_FACTOR = 1e-3
PROJECTOR_RTOL = 1e-8


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


@dataclass
class ExperimentConfig:
    """All parameters of a run; echoed into every output."""

    command: str
    degrees: tuple = DEFAULT_DEGREES
    function: str = "smooth-expcos"
    kind: str = "kergin"
    grid_radial: int = DEFAULT_RADIAL
    grid_angular: int = DEFAULT_ANGULAR
    quad_nodes: int = 32
    seed: int = 0
    out: str = "-"
    fmt: str = "csv"
    perturb: float = 0.0
    timing: bool = False

    def grid(self):
        return make_disk_grid(self.grid_radial, self.grid_angular)

    def rule(self) -> QuadratureRule:
        return QuadratureRule(self.quad_nodes)

    def to_json(self) -> dict:
        out = asdict(self)
        out["degrees"] = list(self.degrees)
        return out


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    """One row of a convergence table."""

    d: int
    r: int
    kind: str
    function: str
    grid_radial: int
    grid_angular: int
    quad_nodes: int
    sup_error: float
    err_d10: float
    err_d01: float
    err_d20: float
    err_d11: float
    err_d02: float
    lebesgue_lagrange: float
    lebesgue_pairs: float
    wall_time: float = field(default=0.0, compare=False)

    @classmethod
    def columns(cls, timing: bool = False) -> list[str]:
        names = [f.name for f in fields(cls)]
        return names if timing else [n for n in names if n != "wall_time"]

    def row(self, timing: bool = False) -> list[str]:
        out = []
        for name in self.columns(timing):
            v = getattr(self, name)
            out.append(fmt_float(v) if isinstance(v, float) else str(v))
        return out


def interpolate(kind: str, f: ScalarField, nodes, rule: QuadratureRule):
    if kind == "kergin":
        return kergin(f, nodes, rule)
    if kind == "hakopian":
        return hakopian(f, nodes, rule)
    raise ValueError(f"kind must be 'kergin' or 'hakopian', got {kind!r}")


def interpolation_errors(interp, f: ScalarField, points, alphas=((0, 0),) + DERIVATIVE_ALPHAS) -> dict:
    """``{alpha: max |D^alpha (f - interp)|}`` over ``points``."""
    vals = interp.evaluate_many(points, alphas)
    out = {}
    for alpha in alphas:
        fa = np.asarray(f.derivative(alpha)(points), dtype=float)
        out[tuple(alpha)] = float(np.max(np.abs(fa - vals[tuple(alpha)])))
    return out


def convergence_record(cfg: ExperimentConfig, d: int, grid=None, with_lebesgue: bool = True) -> ExperimentRecord:
    grid = cfg.grid() if grid is None else grid
    f = REGISTRY.get(cfg.function, d=d, seed=cfg.seed)
    sec = canonical_leja(d)
    t0 = time.perf_counter()
    interp = interpolate(cfg.kind, f, sec, cfg.rule())
    alphas = ((0, 0),) + DERIVATIVE_ALPHAS
    if f.max_order < 2:
        alphas = alphas[:3]
    err = interpolation_errors(interp, f, grid.points, alphas)
    lam = lagrange_lebesgue(sec, grid) if with_lebesgue else math.nan
    pair_lam = math.nan
    if with_lebesgue and d >= 2:
        pair_lam = float(pair_norms(sec, "P" if cfg.kind == "kergin" else "Q", grid).sum())
    wall = time.perf_counter() - t0
    return ExperimentRecord(
        d, sec.r, cfg.kind, cfg.function, grid.radial_count, grid.angular_count, cfg.quad_nodes,
        err[(0, 0)], err[(1, 0)], err[(0, 1)], err.get((2, 0), math.nan), err.get((1, 1), math.nan),
        err.get((0, 2), math.nan), lam, pair_lam, wall)


@dataclass
class ConvergenceResult:
    config: ExperimentConfig
    records: list
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())


def run_converge(cfg: ExperimentConfig, progress: Callable[[str], None] | None = None) -> ConvergenceResult:
    if cfg.function not in REGISTRY:
        raise KeyError(f"unknown test function {cfg.function!r}")
    grid = cfg.grid()
    degrees = sorted(set(cfg.degrees))
    if cfg.kind == "hakopian" and degrees and degrees[0] < 2:
        raise ValueError("Hakopian interpolation needs d >= 2")
    records = []
    for d in degrees:
        rec = convergence_record(cfg, d, grid)
        records.append(rec)
        if progress:
            progress(f"{cfg.kind} {cfg.function} d={d} sup_error={rec.sup_error:.3e} ({rec.wall_time:.1f}s)")
    return ConvergenceResult(cfg, records, convergence_checks(cfg, records))


def convergence_checks(cfg: ExperimentConfig, records: Sequence[ExperimentRecord]) -> dict:
    """Pass/fail checks attached to a convergence table.

    Smooth functions: when both ``d = 4`` and ``d = 32`` are present, the
    sup error at 32 is below ``DECREASE_FACTOR`` times the one at 4.
    Projector families: the relative sup error is at most ``PROJECTOR_RTOL``.
    """
    smooth = REGISTRY.smoothness(cfg.function)
    checks = {}
    if smooth == "polynomial":
        projector = (cfg.function == "poly-d-1") or (cfg.function == "poly-d-2" and cfg.kind == "hakopian")
        if projector:
            grid = cfg.grid()
            worst = 0.0
            for rec in records:
                f = REGISTRY.get(cfg.function, d=rec.d, seed=cfg.seed)
                scale = max(1.0, float(np.max(np.abs(f(grid.points)))))
                worst = max(worst, rec.sup_error / scale)
            checks["projector"] = {"value": worst, "tol": PROJECTOR_RTOL, "pass": worst <= PROJECTOR_RTOL}
    elif smooth == "Cinf":
        by_d = {r.d: r for r in records}
        if 4 in by_d and 32 in by_d:
            lo, hi = by_d[4].sup_error, by_d[32].sup_error
            ratio = hi / lo if lo > 0 else 0.0
            checks["decrease"] = {"value": ratio, "tol": DECREASE_FACTOR,
                                  "pass": ratio < DECREASE_FACTOR, "empirical": True}
    return checks


def records_to_csv(records: Iterable[ExperimentRecord], timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ExperimentRecord.columns(timing))
    for rec in records:
        w.writerow(rec.row(timing))
    return buf.getvalue()


def _json_record(rec: ExperimentRecord, timing: bool) -> dict:
    out = {}
    for name in ExperimentRecord.columns(timing):
        v = getattr(rec, name)
        out[name] = None if isinstance(v, float) and math.isnan(v) else v
    return out


def convergence_to_json(result: ConvergenceResult) -> dict:
    timing = result.config.timing
    return {"config": result.config.to_json(),
            "records": [_json_record(r, timing) for r in result.records],
            "checks": result.checks, "passed": result.passed}


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

@dataclass
class BoundsResult:
    config: ExperimentConfig
    reports: list       # BoundsReport objects, three per degree
    table: list         # one summary dict per degree

    @property
    def passed(self) -> bool:
        return all(row["pass"] for row in self.table)


def run_bounds(cfg: ExperimentConfig, progress=None) -> BoundsResult:
    grid = cfg.grid()
    reports, table = [], []
    for d in sorted(set(cfg.degrees)):
        if d < 2:
            raise ValueError("bounds need d >= 2")
        sec = canonical_leja(d)
        P = pair_norms(sec, "P", grid)
        Q = pair_norms(sec, "Q", grid)
        kp = kergin_pair_norms(sec, grid, norms=P)
        hq = hakopian_pair_norms(sec, grid, norms=Q)
        hs = hst_bounds_all(sec, grid, P_norms=P, Q_norms=Q)
        reports += [kp, hq, hs]
        hst_ok = hs.passed or not hs.asserted
        row = {
            "d": d, "r": sec.r, "grid_radial": grid.radial_count, "grid_angular": grid.angular_count,
            "kergin_max_ratio": kp.max_ratio, "kergin_total": kp.summary["total"],
            "kergin_total_bound": kp.summary["total_bound"],
            "hakopian_max_ratio": hq.max_ratio, "hakopian_total": hq.summary["total"],
            "hakopian_total_bound": hq.summary["total_bound"],
            "lagrange_lebesgue": lagrange_lebesgue(sec, grid),
            "hst_pass": hs.passed, "hst_asserted": hs.asserted,
            "chain_residual": hs.summary["max_chain_residual"],
            "pass": kp.passed and hq.passed and hst_ok,
        }
        table.append(row)
        if progress:
            progress(f"bounds d={d}: kergin ratio {kp.max_ratio:.3e}, hakopian ratio {hq.max_ratio:.3e}")
    return BoundsResult(cfg, reports, table)


PAIR_COLUMNS = ("beta", "log_hprime_node", "log_lower", "log_sup_h", "log_h_upper",
                "log_sup_hprime", "log_hprime_upper", "chain_residual")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)


def bounds_to_csv(result: BoundsResult, per_pair: bool = False) -> str:
    """Summary CSV (one row per degree) or, with ``per_pair``, one row per pair."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cfg = result.config
    if per_pair:
        w.writerow(["d", "r", "s", "t", "P_norm", "P_bound", "Q_norm", "Q_bound", *PAIR_COLUMNS,
                    "pass", "grid_radial", "grid_angular", "quad_nodes"])
        for kp, hq, hs in zip(*[iter(result.reports)] * 3):
            for rp, rq, rh in zip(kp.rows, hq.rows, hs.rows):
                ok = rp["pass"] and rq["pass"] and (rh["pass"] or not hs.asserted)
                w.writerow([kp.d, kp.r, rp["s"], rp["t"],
                            *map(_cell, (rp["norm"], rp["bound"], rq["norm"], rq["bound"])),
                            *(_cell(rh[k]) for k in PAIR_COLUMNS),
                            _cell(ok), cfg.grid_radial, cfg.grid_angular, cfg.quad_nodes])
        return buf.getvalue()
    keys = list(result.table[0]) if result.table else []
    w.writerow(keys + ["quad_nodes"])
    for row in result.table:
        w.writerow([_cell(row[k]) for k in keys] + [cfg.quad_nodes])
    return buf.getvalue()


def bounds_to_json(result: BoundsResult) -> dict:
    return {"config": result.config.to_json(), "table": result.table,
            "reports": [rep.to_json() for rep in result.reports], "passed": result.passed}


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""


def perturbed_section(section: LejaSection, eps: float, index: int | None = None) -> LejaSection:
    """Copy of ``section`` with one node pushed radially off the circle by ``1 + eps``."""
    idx = section.d - 1 if index is None else index
    nodes = np.array(section.nodes)
    nodes[idx] *= 1.0 + eps
    return section_from_thetas(section.thetas, nodes=nodes)


def _rel_sup(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


def run_verify(cfg: ExperimentConfig, d: int) -> list[CheckResult]:
    """Oracle suite for one degree; seeded by ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    sec = canonical_leja(d)
    if cfg.perturb:
        sec = perturbed_section(sec, cfg.perturb)
    checks: list[CheckResult] = []

    def add(name, value, tol, passed=None, detail=""):
        ok = bool(value <= tol) if passed is None else bool(passed)
        checks.append(CheckResult(name, float(value), float(tol), ok, detail))

    # Leja structure
    radius_dev = float(np.max(np.abs(np.abs(sec.z) - 1.0)))
    add("leja.on_circle", radius_dev, 1e-12)
    roots = roots_of_unity_match(sec)
    add("leja.roots_of_unity", max(roots.values()), 1e-12)
    if d >= 2:
        ratios = sampled_maximality(sec, 4096)
        add("leja.maximality", float(np.max(np.abs(ratios - 1.0))), 1e-6)
        rep = node_products(sec)
        add("leja.node_products", max(0.0, rep.lower_bound - rep.minimum), 1e-12 * rep.lower_bound,
            detail=f"min {rep.minimum:.6g} vs 2^r = {rep.lower_bound:g}")
        add("bounds.pair_geometry", pair_geometry_residual(sec), 1e-12)
        if d >= 3:
            add("bounds.outer_product", outer_product_residual(sec), 1e-12)

    cfgn = NodeConfiguration(sec.nodes, label=f"d={d}")
    gp = cfgn.general_position_flag
    add("nodes.general_position", 0.0 if gp else 1.0, 0.0, passed=gp,
        detail=f"min triple cross {cfgn.min_triple_cross:.3e}")
    if not gp:
        return checks

    x = random_disk_points(rng, 400)
    a = cfgn.points
    rule = cfg.rule()
    # projectors
    p = BivariatePoly.random(rng, d - 1)
    add("projector.kergin", _rel_sup(kergin(p, cfgn, rule)(x), p(x)), PROJECTOR_RTOL)
    if d >= 2:
        q = BivariatePoly.random(rng, d - 2)
        add("projector.hakopian", _rel_sup(hakopian(q, cfgn, rule)(x), q(x)), PROJECTOR_RTOL)

        # Kronecker integrals of Q_st over the chords
        plist = pairs(d)
        worst = 0.0
        w, wt = gauss_legendre_01(max(rule.node_count, d))
        for i, (u, v) in enumerate(plist):
            seg = a[u] + w[:, None] * (a[v] - a[u])
            vals = eval_pair_polys(cfgn, seg, "Q")[0]    # (pairs, nodes)
            ints = vals @ wt
            target = np.zeros(len(plist))
            target[i] = 1.0
            worst = max(worst, float(np.max(np.abs(ints - target))))
        add("hakopian.kronecker", worst, 1e-9)

    # mean-value conditions (simplex dimension grows with d)
    if d <= 6:
        f = ScalarField.from_poly(BivariatePoly.random(rng, d + 1))
        mv_rule = QuadratureRule(max(1, math.ceil((d + 2) / 2)))
        rk = verify_mean_value_conditions(kergin(f, cfgn, rule), f, a, 0, mv_rule)
        add("mean_value.kergin", rk.max_residual, 1e-9)
        if d >= 2:
            rh = verify_mean_value_conditions(hakopian(f, cfgn, rule), f, a, 1, mv_rule)
            add("mean_value.hakopian", rh.max_residual, 1e-9)

    # Newton term between consecutive sections
    m = min(d - 1, 4)
    if m >= 1:
        f = ScalarField.from_poly(BivariatePoly.random(rng, 4))
        sub_hi = NodeConfiguration(a[: m + 1])
        sub_lo = NodeConfiguration(a[:m])
        diff = kergin(f, sub_hi, rule)(x) - kergin(f, sub_lo, rule)(x)
        term = newton_term(f, a[: m + 1], m, QuadratureRule(4))(x)
        add("newton.kergin", float(np.max(np.abs(diff - term))), 1e-8, detail=f"degree {m}")

    # affine invariance
    A = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    b = rng.standard_normal(2)
    f = ScalarField.from_poly(BivariatePoly.random(rng, d + 1))
    ok = affine_invariance_check(f, cfgn, A, b, seed=cfg.seed)
    add("affine.kergin", 0.0 if ok else 1.0, 0.0, passed=ok)
    return checks


def checks_to_csv(d: int, checks: Sequence[CheckResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "check", "value", "tol", "pass", "detail"])
    for c in checks:
        w.writerow([d, c.name, fmt_float(c.value), fmt_float(c.tol), str(c.passed).lower(), c.detail])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# single interpolant
# ---------------------------------------------------------------------------

def run_interp(cfg: ExperimentConfig, d: int) -> dict:
    f = REGISTRY.get(cfg.function, d=d, seed=cfg.seed)
    sec = canonical_leja(d)
    interp = interpolate(cfg.kind, f, sec, cfg.rule())
    grid = cfg.grid()
    err = interpolation_errors(interp, f, grid.points, ((0, 0), (1, 0), (0, 1)))
    out = interpolant_to_json(interp, f"leja:d={d}")
    out.update({"function": cfg.function, "r": sec.r,
                "sup_error": err[(0, 0)], "err_d10": err[(1, 0)], "err_d01": err[(0, 1)],
                "config": cfg.to_json()})
    return out


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys, repr floats)."""
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
