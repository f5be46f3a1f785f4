"""
Sanity check against a bulk-dielectric qubit
============================================

Ten thousand defects in a larger dielectric volume, with coupling strengths
typical of a bulk amorphous film, should give a qubit lifetime in the
sub-microsecond range.  The O(N) arrowhead propagator handles this in a
couple of seconds per ensemble.
"""

from tlsgap import bulk_validation_config, build_generator, propagate, quality_factor, sample_ensemble

for omega, horizon, reference in ((87e3, 3e-6, 580e-9), (870e3, 0.3e-6, 20e-9)):
    cfg = bulk_validation_config(omega_rabi_max=omega, seed=0)
    trace = propagate(build_generator(sample_ensemble(cfg)), horizon, 301)
    t1 = trace.fit().t1
    print(
        f"Omega_max {omega / 1e3:5.0f} kHz: T1 = {t1 * 1e9:6.1f} ns (reference {reference * 1e9:.0f} ns), "
        f"Q at {cfg.qubit_frequency / 1e9:g} GHz = {quality_factor(t1, cfg.qubit_frequency):.0f}"
    )
