"""
A qubit coupled to a bath of lossy TLSs
=======================================

Two hundred defects are drawn from the standard tunneling model and coupled
to a qubit.  Scanning the minimum TLS lifetime shows three regimes: very
short-lived defects are too broad to absorb the qubit's energy, intermediate
ones act as a Markovian bath, and long-lived ones exchange energy back and
forth with the qubit.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tlsgap import EnsembleConfig, build_generator, propagate, sample_ensemble

# %%
# Sample five ensembles once; changing ``t1_min`` only rescales lifetimes,
# so the same draws are reused across the scan.
seeds = range(5)
base = [sample_ensemble(EnsembleConfig(omega_rabi_max=450e3, n_tls=200, seed=s)) for s in seeds]
t1_grid = np.logspace(-10, -4, 13)
times = np.linspace(0, 100e-6, 1001)

median = np.empty((t1_grid.size, times.size))
for i, t1_min in enumerate(t1_grid):
    traces = [propagate(build_generator(e.with_t1_min(t1_min)), times[-1], times).p_qubit for e in base]
    median[i] = np.median(traces, axis=0)
    print(f"t1_min = {t1_min:8.1e} s: median p_qubit at 100 us = {median[i, -1]:.3f}")

# %%
# The heatmap mirrors the usual presentation: t1_min on a log axis against
# time, colour giving the median qubit population.
fig, ax = plt.subplots()
mesh = ax.pcolormesh(times * 1e6, t1_grid, median, shading="auto", vmin=0, vmax=1)
ax.set_yscale("log")
ax.set_xlabel("time (us)")
ax.set_ylabel("t1_min (s)")
fig.colorbar(mesh, label="median qubit population")
fig.savefig("qubit_tls_bath.png", dpi=120)
