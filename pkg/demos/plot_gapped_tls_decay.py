"""
A single TLS inside a phonon bandgap
====================================

A defect with intrinsic lifetime 1 us sits at the centre of a Lorentzian
dip in the phonon density of states.  The deeper the dip, the longer the
defect lives, and at late times the lifetime approaches ``T1 / (1 - depth)``.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tlsgap import GapSpec, SpectralDensity, gapped_decay, t1_enhancement

# %%
# Bath: flat rate 1/(1 us) minus a dip 1 GHz wide (full width) at 5 GHz.
f0 = 5e9
gamma0 = 1e6
times = np.linspace(0, 300e-6, 3001)

fig, ax = plt.subplots()
for depth in (0.0, 0.6, 0.9, 0.99):
    bath = SpectralDensity(gamma0, GapSpec(depth=depth, center=f0, width=0.5e9))
    trace = gapped_decay(bath, f0, times[-1], times=times)
    fit = trace.fit()
    print(f"depth {depth:5.2f}: T1 = {fit.t1 * 1e6:8.2f} us, predicted {t1_enhancement(depth):7.2f} us")
    ax.semilogx(times * 1e6, trace.excited_probability, label=f"depth {depth}")

# %%
# The curves are plain exponentials: the dip is a thousand times wider
# than the bare linewidth, so memory effects only matter in the first
# nanoseconds.
ax.set_xlabel("time (us)")
ax.set_ylabel("excited-state probability")
ax.legend()
fig.savefig("gapped_tls_decay.png", dpi=120)
