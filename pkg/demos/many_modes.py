"""
More than two Stokes fields
===========================

Only the combination sum_n k_n a_n talks to the spin wave, so adding modes
splits the same squeezing among them.  There is no N-party witness here.
Instead every pair gets its own Duan value.
"""

import numpy as np

from spinwave_entangler import build_config, evaluate

t = np.linspace(0, 3, 301)
rep = evaluate(build_config(1 / 20, [1.0, 0.8, 0.5]), t)
for key in sorted(k for k in rep.series if k.startswith("duan_")):
    below = rep.flags.pair_entangled[key]
    first = t[below][0] if below.any() else None
    print(f"{key}: min {rep[key].min():9.4f}   first below 4 at {first}")
