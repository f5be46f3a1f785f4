import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from tlsgap.ensemble import TlsParams
from tlsgap.errors import DivergenceError, DomainError, PerfectGapError, StepSizeError
from tlsgap.gap import (
    GapSpec,
    SpectralDensity,
    SuppressionCurve,
    angular_average,
    angular_depth,
    effective_tls_t1,
    gapped_decay,
    isotropic_weight,
    load_suppression_curve,
    sine_weight,
    t1_enhancement,
    volterra_oracle,
)

F0 = 5e9
G0 = 1e6  # 1/(1 us)


def fig3_density(depth, width=0.5e9, center=F0):
    return SpectralDensity(G0, GapSpec(depth=depth, center=center, width=width))


def exact_amplitude(spectral, f, times):
    """Closed-form c(t) = [expm(A t)]_00 of the pseudomode system, via eigendecomposition."""
    g, lam = spectral.baseline_rate, spectral.gap.depth
    w = 2 * np.pi * spectral.gap.width
    dg = 2 * np.pi * (spectral.gap.center - f)
    a = np.array([[-g / 2, 1.0], [lam * g * w / 2, -(w + 1j * dg)]])
    vals, vecs = linalg.eig(a)
    coef = linalg.solve(vecs, np.array([1.0, 0.0]))
    return (vecs[0] * coef) @ np.exp(np.outer(vals, times))


@pytest.mark.parametrize("depth,expected", [(0.0, 1.0), (0.6, 2.5), (0.99, 100.0), (0.5, 2.0)])
def test_t1_enhancement(depth, expected):
    assert t1_enhancement(depth) == pytest.approx(expected)


def test_t1_enhancement_perfect_gap():
    with pytest.raises(PerfectGapError):
        t1_enhancement(1.0)
    with pytest.raises(DomainError):
        t1_enhancement(-0.1)


def test_spectral_density_shape():
    sd = fig3_density(0.6)
    assert sd(F0) == pytest.approx(G0 / (2 * np.pi) * 0.4)
    assert sd(F0 + 0.5e9) == pytest.approx(G0 / (2 * np.pi) * 0.7)
    assert np.all(fig3_density(1.0)(np.linspace(0, 1e10, 101)) >= 0)


def test_ungapped_is_exponential():
    tr = gapped_decay(fig3_density(0.0), F0, 5e-6, tolerance=1e-10)
    assert tr.excited_probability[0] == 1.0
    np.testing.assert_allclose(tr.excited_probability, np.exp(-G0 * tr.times), atol=1e-8)
    np.testing.assert_allclose(tr.excited_probability, np.abs(tr.amplitude) ** 2)


@pytest.mark.parametrize("depth", [0.3, 0.9])
@pytest.mark.parametrize("offset", [0.0, 0.4e9])
def test_matches_closed_form(depth, offset):
    sd = fig3_density(depth, width=20e6)
    tr = gapped_decay(sd, F0 + offset, 10e-6, tolerance=1e-10)
    ref = exact_amplitude(sd, F0 + offset, tr.times)
    np.testing.assert_allclose(tr.amplitude, ref, atol=1e-7)


def test_fig3_deep_gap_lifetime():
    tr = gapped_decay(fig3_density(0.99), F0, 150e-6)
    assert tr.fit().crossing_time > 50e-6


def test_fig3_sixty_percent():
    tr = gapped_decay(fig3_density(0.6), F0, 10e-6)
    assert 2.0e-6 <= tr.fit().crossing_time <= 2.6e-6


@pytest.mark.parametrize("depth", [0.5, 0.9, 0.99])
def test_asymptotic_rate_law(depth):
    tr = gapped_decay(fig3_density(depth), F0, 3 / (G0 * (1 - depth)))
    late = tr.times > 0.2 * tr.times[-1]
    slope = np.polyfit(tr.times[late], np.log(tr.excited_probability[late]), 1)[0]
    assert -slope == pytest.approx(G0 * (1 - depth), rel=0.02)


def test_narrow_gap_non_monotone_but_bounded():
    # narrow dip, strongly non-Markovian: revivals allowed, probabilities stay in [0, 1]
    sd = SpectralDensity(G0, GapSpec(depth=0.99, center=F0 + 2e5, width=1e5))
    tr = gapped_decay(sd, F0, 20e-6)
    p = tr.excited_probability
    assert np.all(p >= -1e-9) and np.all(p <= 1 + 1e-9)


def test_volterra_step_precondition():
    with pytest.raises(StepSizeError):
        volterra_oracle(fig3_density(0.5), F0, 1e-6, step=1e-9)


def test_volterra_ungapped_second_order():
    errs = []
    for h in (2e-9, 1e-9):
        o = volterra_oracle(SpectralDensity(G0, GapSpec(depth=0.0, center=F0, width=1e6)), F0, 3e-6, h)
        errs.append(np.max(np.abs(o.excited_probability - np.exp(-G0 * o.times))))
    assert errs[1] < 1e-6
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_volterra_matches_gapped_fig3():
    sd = fig3_density(0.99)
    w = 2 * np.pi * sd.gap.width
    o = volterra_oracle(sd, F0, 5e-6, step=0.005 / w, output_every=200)
    g = gapped_decay(sd, F0, 5e-6, times=o.times)
    assert np.max(np.abs(o.excited_probability - g.excited_probability)) < 1e-4


def test_volterra_far_detuned_gap_is_ungapped():
    w_ang, dg = 1e7, 1e9
    sd = SpectralDensity(G0, GapSpec(depth=0.99, center=F0 + dg / (2 * np.pi), width=w_ang / (2 * np.pi)))
    o = volterra_oracle(sd, F0, 3 / G0, step=0.01 / dg, output_every=100)
    assert o.excited_probability[-1] == pytest.approx(math.exp(-3), rel=0.01)


def test_angular_depth_examples():
    gap = GapSpec(depth=0.9, s_parallel=0.9, s_perpendicular=0.3)
    assert angular_depth(gap, 0.0) == pytest.approx(0.9)
    assert angular_depth(gap, np.pi / 2) == pytest.approx(0.3)
    assert angular_depth(gap, np.pi / 4) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        angular_depth(gap, 2.0)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, np.pi / 2))
def test_angular_depth_bounded(sp, sq, th):
    v = angular_depth(GapSpec(s_parallel=sp, s_perpendicular=sq), th)
    assert min(sp, sq) - 1e-12 <= v <= max(sp, sq) + 1e-12


@pytest.mark.parametrize("weight", [isotropic_weight, sine_weight])
@pytest.mark.parametrize("lam,expected", [(0.0, (0.0, 1.0, 1.0)), (0.5, (0.5, 0.5, 2.0))])
def test_angular_average_constant(weight, lam, expected):
    avg = angular_average(GapSpec(depth=lam), weight)
    assert (avg.mean_depth, avg.mean_rate_factor, avg.mean_t1_factor) == pytest.approx(expected, rel=1e-9)


def test_angular_average_closed_form():
    # isotropic weight, s_par=0.9, s_perp=0.3: mean depth = 0.9*2/3 + 0.3/3 = 0.7
    avg = angular_average(GapSpec(s_parallel=0.9, s_perpendicular=0.3), isotropic_weight)
    assert avg.mean_depth == pytest.approx(0.7, rel=1e-9)
    # int_0^{pi/2} cos t / (0.1 + 0.6 sin^2 t) dt = atan(sqrt(6)) / sqrt(0.06)
    assert avg.mean_t1_factor == pytest.approx(math.atan(math.sqrt(6)) / math.sqrt(0.06), rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.995), st.floats(0, 0.995), st.sampled_from([isotropic_weight, sine_weight]))
def test_jensen_ordering(sp, sq, weight):
    avg = angular_average(GapSpec(s_parallel=sp, s_perpendicular=sq), weight)
    assert avg.mean_t1_factor >= (1 / avg.mean_rate_factor) * (1 - 1e-9)
    assert avg.mean_depth + avg.mean_rate_factor == pytest.approx(1.0, rel=1e-9)


def test_angular_average_divergence():
    with pytest.raises(DivergenceError):
        angular_average(GapSpec(s_parallel=1.0, s_perpendicular=0.2), isotropic_weight)


def test_angular_average_rejects_unnormalised_weight():
    with pytest.raises(DomainError):
        angular_average(GapSpec(depth=0.3), lambda t: 2 * np.cos(t))


def test_suppression_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("# digitised\ntheta_radians,depth\n0,0.5\n0.7853981633974483,0.5\n1.5707963267948966,0.5\n")
    curve = load_suppression_curve(path)
    avg = angular_average(curve, sine_weight)
    assert (avg.mean_depth, avg.mean_t1_factor) == pytest.approx((0.5, 2.0), rel=1e-9)


def test_suppression_curve_piecewise_linear():
    curve = SuppressionCurve([0, np.pi / 2], [0.8, 0.0])
    # depth = 0.8 (1 - 2t/pi), isotropic weight: int cos t * depth = 0.8 (1 - 2/pi * (pi/2 - 1))
    expected = 0.8 * (1 - 2 / np.pi * (np.pi / 2 - 1))
    assert angular_average(curve, isotropic_weight).mean_depth == pytest.approx(expected, rel=1e-8)


def test_suppression_curve_validation():
    with pytest.raises(DomainError):
        SuppressionCurve([0.0, 0.0], [0.1, 0.2])
    with pytest.raises(DomainError):
        SuppressionCurve([0.0, 1.0], [0.1, 1.2])


def _tls(theta, t1=1e-6):
    return TlsParams(1.0, 1.0, theta, 0.0, t1, 1e5)


def test_effective_tls_t1():
    assert effective_tls_t1(_tls(0.3), GapSpec(depth=0.0)) == 1e-6
    assert effective_tls_t1(_tls(1.1), GapSpec(depth=0.99)) == pytest.approx(1e-4)
    assert effective_tls_t1(_tls(0.0), GapSpec(s_parallel=0.9, s_perpendicular=0.3)) == pytest.approx(1e-5)
    with pytest.raises(PerfectGapError):
        effective_tls_t1(_tls(0.0), GapSpec(s_parallel=1.0, s_perpendicular=0.3))


def test_decay_trace_csv(tmp_path):
    tr = gapped_decay(fig3_density(0.5), F0, 1e-6, n_points=11)
    path = tr.to_csv(tmp_path / "t.csv")
    arr = np.loadtxt(path, delimiter=",", skiprows=1)
    assert path.read_text().splitlines()[0] == "time_s,p_excited,re_amplitude,im_amplitude"
    np.testing.assert_array_equal(arr[:, 1], tr.excited_probability)
