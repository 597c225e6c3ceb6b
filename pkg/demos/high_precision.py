"""
Long times and strong couplings in arbitrary precision
======================================================

Entries of the propagator grow like exp(beta t).  Criteria such as V12 are
small differences of such numbers, so float64 eventually loses them
(relative accuracy stays fine, absolute accuracy does not).  The moment
pipeline also accepts mpmath object arrays, so the same criteria code runs at
any precision.
"""

import mpmath

from spinwave_entangler import (
    build_config,
    initial_moments,
    initial_moments_mp,
    propagate,
    to_quadratures,
    transform_mp,
    vlf_correlations,
    vlf_gains,
)
from spinwave_entangler.propagator import analytic_transform, required_dps

# equal couplings: V12 tends to 2 while the moments themselves reach ~e^(2 beta t)
cfg = build_config(1 / 20, [1.0, 1.0])

for t in (4.0, 8.0, 12.0, 14.0):
    cov = to_quadratures(propagate(initial_moments(cfg), analytic_transform(cfg, t)))
    v64 = vlf_correlations(cov, vlf_gains(cov))[0]
    dps = required_dps(cfg, t)
    with mpmath.workdps(dps):
        cov = to_quadratures(propagate(initial_moments_mp(cfg), transform_mp(cfg, t)))
        vmp = vlf_correlations(cov, vlf_gains(cov))[0]
        print(f"k1 t = {t:4}:  float64 V12 = {v64:12.6f}   {dps} digits V12 = {mpmath.nstr(vmp, 12)}")
