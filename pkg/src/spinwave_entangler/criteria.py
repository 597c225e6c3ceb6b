"""Duan and van Loock-Furusawa variance criteria.

Quadratures follow ``x = b + b^dag``, ``p = -i(b - b^dag)``, so a vacuum mode has
unit variances and every criterion below certifies entanglement when it falls
strictly under 4.

* Duan (Stokes mode ``n`` vs spin):   ``V = Var(x_n - x_s) + Var(p_n + p_s)``
* VLF (two Stokes modes and spin)::

    V12 = Var(x_1 - x_2) + Var(p_1 + p_2 + g_s p_s)
    V1s = Var(x_1 - x_s) + Var(p_1 + g_2 p_2 + p_s)
    V2s = Var(x_2 - x_s) + Var(g_1 p_1 + p_2 + p_s)

  Each gain is the unconstrained minimizer of the momentum term it appears in,
  e.g. ``g_1 = -(Cov(p_1, p_2) + Cov(p_1, p_s)) / Var(p_1)``.  Any two of the
  three inequalities holding is sufficient for tripartite entanglement.

The threshold 4 assumes unit commutators for both partners.  The spin wave
carries ``[S, S^dag] = a``, for which the separable bound on the Duan sum is
``2(1 + a)``.  The initial value ``3 + a^2`` lies between the two, so for
``r > 0`` the ``< 4`` flag is already set at ``t = 0``; read flags near
``t = 0`` with that in mind.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DegenerateStateError, NumericalError
from .model import ModelConfig
from .moments import QuadratureCovariance, SpinInit, initial_moments, propagate, to_quadratures
from .propagator import analytic_transform, numeric_transform

__all__ = [
    "THRESHOLD",
    "GainSet",
    "CriteriaFlags",
    "CriteriaReport",
    "duan_V",
    "pairwise_duan",
    "vlf_gains",
    "vlf_correlations",
    "evaluate_point",
    "evaluate",
    "classify",
    "intervals",
    "thread_count",
]

THRESHOLD = 4.0
THREADS_ENV = "SPINWAVE_THREADS"


class GainSet(NamedTuple):
    g1: float
    g2: float
    gs: float


def duan_V(cov: QuadratureCovariance, mode: int = 0, partner: int | None = None) -> float:
    """``Var(x_mode - x_partner) + Var(p_mode + p_partner)``; the partner defaults to the spin."""
    partner = cov.spin if partner is None else partner
    if mode == partner:
        raise IndexError("Duan criterion needs two distinct modes")
    xm, pm = cov.x(mode), cov.p(mode)
    xo, po = cov.x(partner), cov.p(partner)
    return cov.variance({xm: 1.0, xo: -1.0}) + cov.variance({pm: 1.0, po: 1.0})


def pairwise_duan(cov: QuadratureCovariance) -> dict[str, float]:
    """Duan values for every mode pair, keyed ``duan_12``, ``duan_1s``, ...

    Stokes modes are numbered from 1; ``s`` is the spin wave.
    """
    labels = [str(n + 1) for n in range(cov.n_stokes)] + ["s"]
    out = {}
    for i, j in itertools.combinations(range(cov.n_stokes + 1), 2):
        out[f"duan_{labels[i]}{labels[j]}"] = duan_V(cov, i, j)
    return out


def vlf_gains(cov: QuadratureCovariance) -> GainSet:
    """Variance-minimizing gains for the three VLF combinations (modes 1, 2 and spin)."""
    if cov.n_stokes < 2:
        raise ContractError("VLF criteria need at least two Stokes modes")
    p1, p2, ps = cov.p(0), cov.p(1), cov.p(cov.spin)
    v1, v2, vs = cov.cov(p1, p1), cov.cov(p2, p2), cov.cov(ps, ps)
    if min(v1, v2, vs) <= 0.0:
        raise DegenerateStateError(f"momentum variances must be positive, got {(v1, v2, vs)}")
    c12, c1s, c2s = cov.cov(p1, p2), cov.cov(p1, ps), cov.cov(p2, ps)
    return GainSet(-(c12 + c1s) / v1, -(c12 + c2s) / v2, -(c1s + c2s) / vs)


def vlf_correlations(cov: QuadratureCovariance, gains: GainSet) -> tuple[float, float, float]:
    """``(V12, V1s, V2s)`` for the given gains."""
    if cov.n_stokes < 2:
        raise ContractError("VLF criteria need at least two Stokes modes")
    x1, x2, xs = cov.x(0), cov.x(1), cov.x(cov.spin)
    p1, p2, ps = cov.p(0), cov.p(1), cov.p(cov.spin)
    v12 = cov.variance({x1: 1, x2: -1}) + cov.variance({p1: 1, p2: 1, ps: gains.gs})
    v1s = cov.variance({x1: 1, xs: -1}) + cov.variance({p1: 1, p2: gains.g2, ps: 1})
    v2s = cov.variance({x2: 1, xs: -1}) + cov.variance({p1: gains.g1, p2: 1, ps: 1})
    return v12, v1s, v2s


def evaluate_point(cov: QuadratureCovariance) -> dict[str, float]:
    """All criteria available for this mode count at one instant."""
    row = {"V": duan_V(cov, 0)}
    if cov.n_stokes >= 2:
        g = vlf_gains(cov)
        v12, v1s, v2s = vlf_correlations(cov, g)
        row.update(V12=v12, V1s=v1s, V2s=v2s, g1=g.g1, g2=g.g2, gs=g.gs)
        row.update(pairwise_duan(cov))
    return row


class CriteriaFlags(NamedTuple):
    duan_entangled: np.ndarray
    pair_entangled: dict[str, np.ndarray]
    tripartite: np.ndarray | None


@dataclass(frozen=True)
class CriteriaReport:
    """Time series of the criteria.  Flags are derived, see :func:`classify`."""

    times: np.ndarray
    series: dict[str, np.ndarray]
    config: ModelConfig | None = None
    spin_init: str = "css"
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    @property
    def V(self) -> np.ndarray:
        return self.series["V"]

    @property
    def has_vlf(self) -> bool:
        return "V12" in self.series

    @property
    def gains(self) -> list[GainSet]:
        return [GainSet(*g) for g in zip(self["g1"], self["g2"], self["gs"])]

    @property
    def flags(self) -> CriteriaFlags:
        return classify(self)

    @classmethod
    def from_rows(cls, times: Sequence[float], rows: Iterable[dict], **kw) -> "CriteriaReport":
        rows = list(rows)
        keys = list(rows[0]) if rows else ["V"]
        series = {k: np.array([r[k] for r in rows], dtype=float) for k in keys}
        return cls(np.asarray(times, dtype=float), series, **kw)


def classify(report: CriteriaReport) -> CriteriaFlags:
    """Strict ``< 4`` comparisons; tripartite needs at least two VLF inequalities."""
    duan = report.V < THRESHOLD
    pairs = {k: report[k] < THRESHOLD for k in report.series if k.startswith("duan_")}
    trip = None
    if report.has_vlf:
        held = sum((report[k] < THRESHOLD).astype(int) for k in ("V12", "V1s", "V2s"))
        pairs.update({k: report[k] < THRESHOLD for k in ("V12", "V1s", "V2s")})
        trip = held >= 2
    return CriteriaFlags(duan, pairs, trip)


def intervals(times: np.ndarray, mask: np.ndarray) -> list[tuple[float, float]]:
    """Maximal runs of ``True`` in ``mask`` as ``(t_first, t_last)`` pairs."""
    out = []
    start = None
    for t, m in zip(times, mask):
        if m and start is None:
            start = float(t)
        if m:
            last = float(t)
        elif start is not None:
            out.append((start, last))
            start = None
    if start is not None:
        out.append((start, last))
    return out


def thread_count() -> int:
    """Worker threads for sweeps, from ``SPINWAVE_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def evaluate(
    config: ModelConfig,
    times: Sequence[float],
    spin_init: SpinInit = "css",
    method: str = "analytic",
    workers: int | None = None,
) -> CriteriaReport:
    """Criteria along a time grid.  Output order follows ``times`` regardless of ``workers``."""
    transform = {"analytic": analytic_transform, "numeric": numeric_transform}[method]
    C0 = initial_moments(config, spin_init)

    def point(t):
        with np.errstate(over="ignore", invalid="ignore"):
            cov = to_quadratures(propagate(C0, transform(config, t)))
        if not np.all(np.isfinite(cov.matrix)):
            raise NumericalError(f"second moments overflow at t = {t:g}")
        return evaluate_point(cov)

    workers = workers or thread_count()
    times = np.asarray(times, dtype=float)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(point, times))
    else:
        rows = [point(t) for t in times]
    return CriteriaReport.from_rows(times, rows, config=config, spin_init=spin_init)
