"""
Bipartite entanglement of one Stokes field with the spin wave
==============================================================

A single Stokes mode is created together with a spin-wave excitation, so the
pair becomes two-mode squeezed.  The Duan sum V drops below 4 once they are
entangled.  A weaker probe (smaller ratio r) leaves more atoms in the ground
state and the spin wave behaves more like a boson.
"""

import numpy as np

from spinwave_entangler import build_config, evaluate

# normalized time k1*t on the same grid the CLI uses
t = np.linspace(0, 5, 501)

for r in (1 / 50, 1 / 20, 1 / 10, 1 / 5):
    cfg = build_config(r, [1.0])
    rep = evaluate(cfg, t)
    # the coherent spin state is not quite a vacuum, so V starts at 3 + a^2;
    # that is below 4 but above the separable bound 2(1 + a) of the rescaled spin
    bound = 2 * (1 + cfg.boson_factor)
    print(f"r = {r:<6.3g} a = {cfg.boson_factor:.5f}  V(0) = {rep.V[0]:.6f}  "
          f"min V = {rep.V.min():.5f}  below 2(1+a) for t >= {t[rep.V < bound][0]:.2f}")

# at r = 0 the pair is an ideal two-mode squeezer: V = 4 exp(-2t)
rep = evaluate(build_config(0.0, [1.0]), t)
print("max |V - 4 exp(-2t)| at r = 0:", np.abs(rep.V - 4 * np.exp(-2 * t)).max())

# optional picture
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for r in (1 / 50, 1 / 20, 1 / 10, 1 / 5):
        plt.plot(t, evaluate(build_config(r, [1.0]), t).V, label=f"r = {r:g}")
    plt.axhline(4, ls="--", c="0.5")
    plt.xlabel("k1 t")
    plt.ylabel("V")
    plt.legend()
    plt.savefig("bipartite_duan.png", dpi=120)
