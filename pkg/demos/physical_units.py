"""
From laboratory parameters to the dimensionless model
======================================================

The model only needs the Raman couplings k_n = g * Omega_n * sqrt(N_a) / Delta_n
and the probe/coupling Rabi ratio r.  This script turns a set of laboratory
numbers into those and reads the same setup from a config file.
"""

import warnings

from spinwave_entangler import PhysicalCoupling, coupling_from_physical
from spinwave_entangler.model import parse_config, unit_time_seconds

# two Raman channels with different detunings (frequencies in MHz)
channels = [PhysicalCoupling(g23=1e-4, omega_m=20.0, n_atoms=10**8, detuning=500.0),
            PhysicalCoupling(g23=1e-4, omega_m=20.0, n_atoms=10**8, detuning=-1000.0)]
ks = [coupling_from_physical(p) for p in channels]
print("couplings (cm^-1):", ks)
print("k1 t = 1 after", unit_time_seconds(ks[0]) * 1e12, "ps")

# a strong drive close to resonance is flagged, not rejected
close = PhysicalCoupling(g23=1e-4, omega_m=20.0, n_atoms=10**8, detuning=50.0)
print("adiabatic:", close.adiabatic, close.warnings)

# config files take either dimensionless couplings or a physical block,
# the latter normalized so that |k1| = 1
text = """
pump_ratio = 0.05
[physical]
g23 = 1e-4
omega_m = 20, 20
n_atoms = 100000000
detuning = 500, -1000
"""
with warnings.catch_warnings():
    warnings.simplefilter("error")
    cf = parse_config(text)
print(cf.config)
