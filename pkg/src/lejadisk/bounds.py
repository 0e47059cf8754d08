"""Norm estimates for the cardinal polynomials at Leja sections.

Every inequality here compares a grid estimate of a sup norm with a closed
form bound.  Grid sup norms can only under-estimate the true norm, so all
upper-bound checks use the multiplicative slack ``NORM_SLACK``.  Quantities
built from long products (``h_st``, ``h'_st``) are compared in log space.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import NORM_SLACK, DiskGrid, make_disk_grid
from .interpolants import (
    NodeConfiguration,
    eval_P_j,
    eval_pair_polys,
    hakopian,
    kergin,
    pair_data,
    pairs,
)
from .leja import LejaSection
from .mean_value import ScalarField
from .polys import BivariatePoly, log_abs_product

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# pair geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairGeometry:
    """``alpha_st = exp(i (theta_s + theta_t)/2)`` and ``beta_st = -2 sin((theta_s - theta_t)/2)``.

    With these, ``perp(e_s - e_t) = alpha_st * beta_st`` as complex numbers.
    """

    s: int
    t: int
    alpha: complex
    beta: float

    @classmethod
    def of(cls, section: LejaSection, s: int, t: int) -> "PairGeometry":
        th = section.theta_radians
        return cls(s, t, complex(np.exp(0.5j * (th[s] + th[t]))),
                   float(-2.0 * math.sin(0.5 * (th[s] - th[t]))))

    def perp_residual(self, section: LejaSection) -> float:
        """Worst residual of ``perp(e_s - e_t) = alpha*beta`` and ``|e_s - e_t| = |beta|``."""
        z = section.z
        chord = 1j * (z[self.s] - z[self.t])
        r1 = abs(chord - self.alpha * self.beta)
        r2 = abs(abs(z[self.s] - z[self.t]) - abs(self.beta))
        return max(r1, r2)


def pair_geometry_residual(section: LejaSection) -> float:
    """Largest residual of the ``alpha * beta`` identity over all pairs."""
    out = 0.0
    for s, t in pairs(section.d):
        out = max(out, PairGeometry.of(section, s, t).perp_residual(section))
    return out


def outer_product_residual(section: LejaSection) -> float:
    """Max over triples of ``| |<alpha_st, (e_s - e_m)/(-beta_sm)>| - |e_t - e_m|/2 |``.

    The pairing ``<.,.>`` is the real scalar product of plane vectors.
    """
    z = section.z
    th = section.theta_radians
    worst = 0.0
    for s in range(section.d):
        for t in range(section.d):
            if t == s:
                continue
            alpha = np.exp(0.5j * (th[s] + th[t]))
            for m in range(section.d):
                if m in (s, t):
                    continue
                beta_sm = -2.0 * math.sin(0.5 * (th[s] - th[m]))
                u = (z[s] - z[m]) / (-beta_sm)
                lhs = abs(alpha.real * u.real + alpha.imag * u.imag)
                worst = max(worst, abs(lhs - abs(z[t] - z[m]) / 2))
    return worst


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class BoundsReport:
    """Per-pair values, their bounds and pass flags.

    ``rows`` holds one dict per pair; ``summary`` aggregates.  ``asserted``
    is False when the checks are only reported (small ``d`` edge cases).
    """

    d: int
    r: int
    kind: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    asserted: bool = True

    @property
    def passed(self) -> bool:
        return all(row["pass"] for row in self.rows) and self.summary.get("total_pass", True)

    @property
    def max_ratio(self) -> float:
        ratios = [row["ratio"] for row in self.rows if "ratio" in row]
        return max(ratios) if ratios else 0.0

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        keys = ["kind", "d", "r"] + [k for k in self.rows[0]]
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({"kind": self.kind, "d": self.d, "r": self.r,
                             **{k: _fmt(v) for k, v in row.items()}})
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"kind": self.kind, "d": self.d, "r": self.r, "asserted": self.asserted,
                "passed": self.passed, "max_ratio": self.max_ratio,
                **{k: _jsonable(v) for k, v in self.summary.items()}}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if not math.isfinite(v) else f"{float(v):.17g}"
    return v


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _grid(grid: DiskGrid | None) -> DiskGrid:
    return make_disk_grid() if grid is None else grid


def lagrange_norms(section, grid: DiskGrid | None = None) -> np.ndarray:
    """Grid estimates of ``||P_j||_D`` for ``j = 0..d-1``."""
    g = _grid(grid)
    cfg = NodeConfiguration.from_section(section) if isinstance(section, LejaSection) else section
    out = np.empty(cfg.d)
    step = 16
    for start in range(0, cfg.d, step):
        which = range(start, min(cfg.d, start + step))
        vals = eval_P_j(cfg, g.points, which=which, dtype=np.float64)[0]
        out[start: start + len(which)] = np.abs(vals).max(axis=-1)
    return out


def lagrange_lebesgue(section, grid: DiskGrid | None = None) -> float:
    """Grid estimate of ``sum_j ||P_j||_D``."""
    return float(lagrange_norms(section, grid).sum())


def pair_norms(section, kind: str, grid: DiskGrid | None = None) -> np.ndarray:
    """Grid estimates of ``||P_st||_D`` (``kind='P'``) or ``||Q_st||_D`` (``'Q'``), in ``pairs(d)`` order."""
    g = _grid(grid)
    return eval_pair_polys(section, g.points, kind, dtype=np.float64, absmax=True)[0]


def _norm_report(section: LejaSection, kind: str, grid, per_pair_bound: float,
                 total_bound: float, norms=None) -> BoundsReport:
    d = section.d
    if d < 2:
        raise ValueError("pair norms need d >= 2")
    norms = pair_norms(section, kind, grid) if norms is None else norms
    limit = per_pair_bound * (1.0 + NORM_SLACK)
    rows = [{"s": s, "t": t, "norm": float(n), "bound": per_pair_bound,
             "ratio": float(n) / per_pair_bound, "pass": bool(n <= limit)}
            for (s, t), n in zip(pairs(d), norms)]
    total = float(np.sum(norms))
    summary = {"total": total, "total_bound": total_bound,
               "total_pass": bool(total <= total_bound * (1.0 + NORM_SLACK)),
               "slack": NORM_SLACK}
    return BoundsReport(d, section.r, "kergin-pairs" if kind == "P" else "hakopian-pairs", rows, summary)


def kergin_pair_norms(section: LejaSection, grid: DiskGrid | None = None, norms=None) -> BoundsReport:
    """Check ``||P_st|| <= 2d`` per pair and ``sum ||P_st|| <= d^2 (d-1)``."""
    d = section.d
    return _norm_report(section, "P", grid, 2.0 * d, float(d * d * (d - 1)), norms)


def hakopian_pair_norms(section: LejaSection, grid: DiskGrid | None = None, norms=None) -> BoundsReport:
    """Check ``||Q_st|| <= 4 d^3`` per pair and ``sum ||Q_st|| <= 2 d^4 (d-1)``."""
    d = section.d
    return _norm_report(section, "Q", grid, 4.0 * d ** 3, float(2 * d ** 4 * (d - 1)), norms)


# ---------------------------------------------------------------------------
# h_st magnitudes
# ---------------------------------------------------------------------------

def _log_bounds(d: int, r: int, beta: float) -> tuple[float, float, float]:
    lb = math.log(abs(beta))
    lower = 2 * r * LOG2 + (d - 4) * lb - (d - 2) * LOG2
    h_upper = (2 * r + 1) * LOG2 + math.log(d) + (d - 2) * lb - (d - 2) * LOG2
    hp_upper = (2 * r + 1) * LOG2 + 3 * math.log(d) + (d - 3) * lb - (d - 2) * LOG2
    return lower, h_upper, hp_upper


def _hst_row(section: LejaSection, s: int, t: int, log_P: float, log_Q: float,
             node_logs: np.ndarray) -> dict:
    d, r = section.d, section.r
    pd = pair_data(section, s, t)
    beta = PairGeometry.of(section, s, t).beta
    log_C = pd.denominator.log_abs
    # h = |v|^2 C P_st and h' = C Q_st along the ridge w = <v, x>
    log_h = math.log(pd.v_norm2) + log_C + log_P
    log_hp = log_C + log_Q
    lower, h_up, hp_up = _log_bounds(d, r, beta)
    chain = (d - 4) * math.log(abs(beta)) - (d - 2) * LOG2 + node_logs[s] + node_logs[t]
    slack = math.log1p(NORM_SLACK)
    ok = (log_C >= lower - 1e-12) and (log_h <= h_up + slack) and (log_hp <= hp_up + slack)
    return {
        "s": s, "t": t, "beta": beta,
        "log_hprime_node": log_C, "log_lower": lower,
        "log_sup_h": log_h, "log_h_upper": h_up,
        "log_sup_hprime": log_hp, "log_hprime_upper": hp_up,
        "chain_residual": abs(log_C - chain),
        "pass": bool(ok),
    }


def _node_logs(section: LejaSection) -> np.ndarray:
    z = section.z
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    return log_abs_product(diff)


def hst_magnitude_bounds(section: LejaSection, s: int, t: int,
                         grid: DiskGrid | None = None) -> BoundsReport:
    """Lower bound on ``|h'_st|`` at the node and upper bounds on ``sup |h_st|``, ``sup |h'_st|``.

    All comparisons are made on logarithms.  The lower bound carries the
    exponent ``d - 4``; for ``d < 4`` the result is reported with
    ``asserted=False``.
    """
    if not 0 <= s < t < section.d:
        raise ValueError("need 0 <= s < t < d")
    g = _grid(grid)
    P = eval_pair_polys(section, g.points, "P", plist=[(s, t)], dtype=np.float64, absmax=True)[0, 0]
    Q = eval_pair_polys(section, g.points, "Q", plist=[(s, t)], dtype=np.float64, absmax=True)[0, 0]
    row = _hst_row(section, s, t, math.log(P), math.log(Q), _node_logs(section))
    return BoundsReport(section.d, section.r, "hst", [row],
                        {"max_chain_residual": row["chain_residual"]}, asserted=section.d >= 4)


def hst_bounds_all(section: LejaSection, grid: DiskGrid | None = None,
                   P_norms=None, Q_norms=None) -> BoundsReport:
    """:func:`hst_magnitude_bounds` for every pair, reusing pair norms when given."""
    plist = pairs(section.d)
    P_norms = pair_norms(section, "P", grid) if P_norms is None else P_norms
    Q_norms = pair_norms(section, "Q", grid) if Q_norms is None else Q_norms
    logs = _node_logs(section)
    rows = [_hst_row(section, s, t, math.log(p), math.log(q), logs)
            for (s, t), p, q in zip(plist, P_norms, Q_norms)]
    chain = max((row["chain_residual"] for row in rows), default=0.0)
    return BoundsReport(section.d, section.r, "hst", rows, {"max_chain_residual": chain},
                        asserted=section.d >= 4)


# ---------------------------------------------------------------------------
# Lebesgue inequalities
# ---------------------------------------------------------------------------

DISK_DIAMETER = 2.0


@dataclass(frozen=True)
class LebesgueSides:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + NORM_SLACK) + 1e-12


def lebesgue_inequality_sides(f: ScalarField, Q: BivariatePoly, section, grid: DiskGrid | None = None,
                              kind: str = "kergin", interpolant=None) -> LebesgueSides:
    """Both sides of the Lebesgue inequality for a comparison polynomial ``Q``.

    Kergin: ``(1 + sum ||P_j||) ||f - Q|| + diam * sum ||P_st|| * ||grad(f - Q)||``.
    Hakopian: ``(1 + sum ||Q_st||) ||f - Q||``.  Norms of ``f - Q`` and of
    the gradient difference (Euclidean length) are grid maxima.
    """
    g = _grid(grid)
    d = section.d
    x = g.points
    fQ = np.max(np.abs(f(x) - Q(x)))
    if kind == "kergin":
        if Q.degree() > d - 1:
            raise ValueError("Q must have degree <= d - 1")
        interp = kergin(f, section) if interpolant is None else interpolant
        lhs = float(np.max(np.abs(f(x) - interp(x))))
        lam = lagrange_lebesgue(section, g)
        pair_sum = float(pair_norms(section, "P", g).sum()) if d >= 2 else 0.0
        gq = np.stack([Q.partial(1)(x), Q.partial(2)(x)], axis=-1)
        dfQ = float(np.max(np.linalg.norm(f.grad(x) - gq, axis=-1)))
        rhs = (1.0 + lam) * fQ + DISK_DIAMETER * pair_sum * dfQ
    elif kind == "hakopian":
        if Q.degree() > d - 2:
            raise ValueError("Q must have degree <= d - 2")
        interp = hakopian(f, section) if interpolant is None else interpolant
        lhs = float(np.max(np.abs(f(x) - interp(x))))
        rhs = (1.0 + float(pair_norms(section, "Q", g).sum())) * fQ
    else:
        raise ValueError(f"kind must be 'kergin' or 'hakopian', got {kind!r}")
    return LebesgueSides(lhs, float(rhs))


def taylor_polynomial(f: ScalarField, degree: int) -> BivariatePoly:
    """Bivariate Taylor polynomial of ``f`` at the origin (needs ``higher_derivatives``)."""
    c = np.zeros((degree + 1, degree + 1))
    origin = np.zeros((1, 2))
    for n in range(degree + 1):
        for b in range(n + 1):
            a = n - b
            val = float(np.asarray(f.derivative((a, b))(origin)).reshape(-1)[0])
            c[a, b] = val / (math.factorial(a) * math.factorial(b))
    return BivariatePoly(c)


def norm_ratio_table(degrees: Sequence[int], grid: DiskGrid | None = None) -> list[dict]:
    """``max ||P_st||/(2d)`` and ``max ||Q_st||/(4 d^3)`` for each degree."""
    from .leja import canonical_leja

    g = _grid(grid)
    out = []
    for d in degrees:
        sec = canonical_leja(d)
        kp = kergin_pair_norms(sec, g)
        hq = hakopian_pair_norms(sec, g)
        out.append({"d": d, "r": sec.r, "kergin_max_ratio": kp.max_ratio,
                    "hakopian_max_ratio": hq.max_ratio,
                    "pass": kp.passed and hq.passed})
    return out


__all__ = [
    "BoundsReport", "DISK_DIAMETER", "LebesgueSides", "PairGeometry",
    "hakopian_pair_norms", "hst_bounds_all", "hst_magnitude_bounds",
    "kergin_pair_norms", "lagrange_lebesgue", "lagrange_norms",
    "lebesgue_inequality_sides", "norm_ratio_table", "outer_product_residual",
    "pair_geometry_residual", "pair_norms", "taylor_polynomial",
]
