"""Acceptance criteria 1-9, each reported as one PASS/FAIL line.

The lines are printed by each test and collected again in the terminal summary
(see ``conftest.py``).  Run just this file with::

    pytest -v tests/test_acceptance.py
"""

import time

import mpmath
import numpy as np
import pytest

from spinwave_entangler.cli import FIG3_K2, FIG3_RATIO, main
from spinwave_entangler.criteria import GainSet, evaluate, intervals, vlf_correlations, vlf_gains
from spinwave_entangler.model import build_config
from spinwave_entangler.moments import (
    initial_moments,
    initial_moments_mp,
    propagate,
    to_quadratures,
    transform_mp,
)
from spinwave_entangler.oracle import (
    AGREEMENT_KEYS,
    AGREEMENT_POINTS,
    OracleConfig,
    boson_agreement,
    dicke_discrepancies,
    measure_moments,
    prepare_initial,
)
from spinwave_entangler.propagator import (
    analytic_matrix_mp,
    analytic_transform,
    commutator_gram,
    numeric_matrix_mp,
    numeric_transform,
    required_dps,
)

pytestmark = pytest.mark.acceptance

GRID = np.linspace(0.0, 5.0, 501)
SUITE_SIZE = 1000
SEED = 20261018


def report(request, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    request.node.user_properties.append(("acceptance", line))
    assert ok, line


def random_suite():
    rng = np.random.default_rng(SEED)
    for _ in range(SUITE_SIZE):
        n = int(rng.choice([1, 2, 3, 5]))
        cfg = build_config(float(rng.uniform(0, 0.5)), rng.uniform(-10, 10, n).tolist())
        yield cfg, float(rng.uniform(0, 3)), float(rng.uniform(0, 1))


def mp_gram(cfg):
    a = (1 - mpmath.mpf(cfg.pump_ratio) ** 2) / (1 + mpmath.mpf(cfg.pump_ratio) ** 2)
    K = mpmath.matrix(commutator_gram(cfg).tolist())
    d = K.rows
    K[d - 2, d - 1], K[d - 1, d - 2] = a, -a
    return K


def spans(iv):
    return "[" + ", ".join(f"{a:.2f}-{b:.2f}" for a, b in iv) + "]"


def max_abs(X):
    return max(abs(x) for x in X)


@pytest.fixture(scope="module")
def suite_results():
    """High-precision residuals for criteria 1 and 2, plus float64 diagnostics."""
    comm = analytic_num = semigroup = mpmath.mpf(0)
    rel64 = 0.0
    start = time.perf_counter()
    for cfg, t, split in random_suite():
        dps = required_dps(cfg, t)
        with mpmath.workdps(dps):
            M = analytic_matrix_mp(cfg, t, dps)
            K = mp_gram(cfg)
            comm = max(comm, mpmath.mnorm(M * K * M.T - K, "inf"))
            E = numeric_matrix_mp(cfg, t, dps)
            analytic_num = max(analytic_num, max_abs(M - E))
            t1 = mpmath.mpf(t) * mpmath.mpf(split)
            t2 = mpmath.mpf(t) - t1
            P = analytic_matrix_mp(cfg, t1, dps) * analytic_matrix_mp(cfg, t2, dps)
            semigroup = max(semigroup, max_abs(M - P))
        F = analytic_transform(cfg, t)
        scale = max(1.0, float(np.abs(F.matrix).max()))
        rel64 = max(rel64, F.commutator_residual() / scale**2)
        rel64 = max(rel64, float(np.abs(F.matrix - numeric_transform(cfg, t).matrix).max()) / scale)
    return {
        "commutator": float(comm),
        "analytic_numeric": float(analytic_num),
        "semigroup": float(semigroup),
        "float64_relative": rel64,
        "seconds": time.perf_counter() - start,
    }


def test_criterion_1_commutator_preservation(request, suite_results):
    r = suite_results
    report(request, 1, r["commutator"] <= 1e-10,
           f"max ||M K M^T - K||_inf = {r['commutator']:.2e} over {SUITE_SIZE} configs, "
           f"multiprecision; float64 relative residual {r['float64_relative']:.1e}")


def test_criterion_2_analytic_vs_numeric(request, suite_results):
    r = suite_results
    ok = r["analytic_numeric"] <= 1e-9 and r["semigroup"] <= 1e-9
    report(request, 2, ok,
           f"max |analytic - expm| = {r['analytic_numeric']:.2e}, "
           f"max |M(t1+t2) - M(t1)M(t2)| = {r['semigroup']:.2e}, {r['seconds']:.0f} s")


def test_criterion_3_bipartite_sweep(request):
    ratios = (1 / 50, 1 / 20, 1 / 10, 1 / 5)
    start_err, minima = 0.0, []
    for r in ratios:
        cfg = build_config(r, [1.0])
        V = evaluate(cfg, GRID).V
        start_err = max(start_err, abs(V[0] - (3 + cfg.boson_factor**2)))
        minima.append(float(V.min()))
    ok = start_err <= 1e-9 and minima[0] <= 0.05 and minima == sorted(minima)
    report(request, 3, ok,
           f"|V(0) - (3+a^2)| <= {start_err:.1e}; minima {', '.join(f'{m:.4g}' for m in minima)}")


def test_criterion_4_closed_form_limit(request):
    err = float(np.abs(evaluate(build_config(0, [1.0]), GRID).V - 4 * np.exp(-2 * GRID)).max())
    report(request, 4, err <= 1e-9, f"max |V - 4 exp(-2t)| = {err:.2e}")


def test_criterion_5_tripartite_sweep(request):
    cfg = build_config(FIG3_RATIO, [1.0, 1.0])
    rep = evaluate(cfg, GRID)
    diff_err = 0.0
    for t in GRID:
        cov = to_quadratures(propagate(initial_moments(cfg), analytic_transform(cfg, t)))
        diff_err = max(diff_err, abs(cov.variance({cov.x(0): 1, cov.x(1): -1}) - 2))
    v12_at_4 = float(rep["V12"][np.argmin(np.abs(GRID - 4.0))])
    all_three = (rep["V12"] < 4) & (rep["V1s"] < 4) & (rep["V2s"] < 4)

    weak = evaluate(build_config(FIG3_RATIO, [1.0, 0.1]), GRID)
    min_v1s = float(weak["V1s"].min())
    both = (weak["V12"] < 4) & (weak["V2s"] < 4)
    one = intervals(GRID, weak["V1s"] < 4)
    sub = intervals(GRID, both)
    nested = len(sub) == 1 and any(a <= sub[0][0] and sub[0][1] <= b for a, b in one)
    shorter = both.sum() < (weak["V1s"] < 4).sum()

    ok = (diff_err <= 1e-9 and 2.0 <= v12_at_4 <= 2.2 and all_three.any()
          and min_v1s <= 0.05 and nested and shorter)
    report(request, 5, ok,
           f"|Var(x1-x2) - 2| <= {diff_err:.1e}; V12(4) = {v12_at_4:.5f}; "
           f"all three < 4 on {spans(intervals(GRID, all_three))}; k2=0.1: min V1s = {min_v1s:.4f}, "
           f"V12&V2s window {spans(sub)} inside V1s window {spans(one)}")


def test_criterion_6_boson_oracle(request):
    worst, excess, tails = 0.0, [], []
    for ratio, ks, t in AGREEMENT_POINTS:
        res = boson_agreement(ratio, ks, t)
        tails.append(res["truncation"])
        allowed = max(1e-5, res["truncation"])
        for key in AGREEMENT_KEYS:
            d = res.get("d" + key)
            if d is not None:
                worst = max(worst, d)
                if d > allowed:
                    excess.append((ratio, ks, t, key, d))
    ok = not excess and max(tails) < 1e-8
    report(request, 6, ok,
           f"{len(AGREEMENT_POINTS)} points, max difference {worst:.2e}, max cutoff tail {max(tails):.1e}")


def test_criterion_7_dicke_convergence(request):
    d = dicke_discrepancies(0.0, [1.0], 0.5, (4, 8, 16, 32))
    decreasing = all(b < a for a, b in zip(d, d[1:]))
    moment_err = 0.0
    for ratio in (0.0, 1 / 20, 1 / 5):
        cfg = build_config(ratio, [1.0])
        for n_atoms in (4, 8, 16, 32):
            state = prepare_initial(OracleConfig(cfg, "dicke", n_atoms=n_atoms))
            moment_err = max(moment_err, float(np.abs(
                measure_moments(state).matrix - initial_moments(cfg).matrix).max()))
    report(request, 7, decreasing and moment_err <= 1e-10,
           f"|V_dicke - V_gauss| = {', '.join(f'{x:.4g}' for x in d)}; "
           f"t=0 moment error {moment_err:.1e}")


def _mp_cov(cfg, t):
    return to_quadratures(propagate(initial_moments_mp(cfg), transform_mp(cfg, t)))


def test_criterion_8_gain_optimality_and_symmetry(request):
    # values reach e^{100} on this grid, so the check runs in multiprecision
    worst_drop = mpmath.mpf(0)
    worst_swap = mpmath.mpf(0)
    grid = GRID[::5]
    for k2 in FIG3_K2:
        cfg = build_config(FIG3_RATIO, [1.0, k2])
        swapped = build_config(FIG3_RATIO, [k2, 1.0])
        for t in grid:
            with mpmath.workdps(required_dps(cfg, t, target_digits=20)):
                cov = _mp_cov(cfg, t)
                g = vlf_gains(cov)
                base = vlf_correlations(cov, g)
                for slot, which in ((2, 0), (1, 1), (0, 2)):
                    for delta in (-0.01, 0.01):
                        gains = list(g)
                        gains[slot] += mpmath.mpf(delta)
                        moved = vlf_correlations(cov, GainSet(*gains))[which]
                        worst_drop = max(worst_drop, base[which] - moved)
                cov_s = _mp_cov(swapped, t)
                g_s = vlf_gains(cov_s)
                v_s = vlf_correlations(cov_s, g_s)
                worst_swap = max(worst_swap, abs(base[0] - v_s[0]), abs(base[1] - v_s[2]),
                                 abs(base[2] - v_s[1]), abs(g.g1 - g_s.g2), abs(g.gs - g_s.gs))
    ok = worst_drop <= 1e-12 and worst_swap <= 1e-10
    report(request, 8, ok,
           f"largest decrease under +-0.01 gain shifts {float(worst_drop):.1e}; "
           f"swap mismatch {float(worst_swap):.1e}; {len(FIG3_K2) * len(grid)} points, multiprecision")


def test_criterion_9_determinism(request, tmp_path):
    same = []
    for cmd in ("fig2", "fig3"):
        for fmt in ("csv", "json"):
            out = tmp_path / f"{cmd}.{fmt}"
            assert main([cmd, "--format", fmt, "--out", str(out)]) == 0
            first = out.read_bytes()
            assert main([cmd, "--format", fmt, "--out", str(out)]) == 0
            same.append(out.read_bytes() == first)
    report(request, 9, all(same), f"{sum(same)}/{len(same)} repeated fig2/fig3 outputs byte-identical")
