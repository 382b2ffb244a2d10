import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from famedkit.angle_structures import maximize_volume
from famedkit.partition_jones import (
    APolynomial,
    ContourSpec,
    FitError,
    QuadratureError,
    aj_evaluate,
    fit_asymptotics,
    jones_function,
    parse_apolynomial,
    partition_log_modulus,
    predicted_modulus,
)
from famedkit.special_functions import log_phi_b
from famedkit.triangulation import load_preset, preset_file

# log|Z(4_1)| at the volume maximizer from a brute-force trapezoid rule on
# straight lines through the separating shift (step 0.01, 0.008 and 0.004
# for b = 0.8, 0.6 and 0.4, half-width 150)
ORACLE = {
    1.0: math.log((5 - math.sqrt(5)) / 10),
    0.8: -1.348054682626,
    0.6: -1.637780698204,
    0.4: -2.670502784027,
}

# log J(0) of 4_1; 200 and 400 nodes agree to 1e-13
JONES_AT_0 = {
    1.0: 0.8691544435674878,
    0.8: 0.5826167087696668,
    0.6: 0.00022912875462666182,
    0.4: -1.4485971858335702,
}


def trapezoid_log_z(b, h, L):
    """Separable form of the 4_1 state integral, written out from scratch."""
    a = math.pi / 3
    d = np.array([-(math.pi - a), math.pi - a]) * (1 + b * b)
    binv = np.array([[-1, -0.5], [0, 0.5]])
    G = np.diag([-1.0, 2.0])
    w0 = binv @ (math.pi * np.array([-1.0, 2.0])) - G @ np.full(2, math.pi)
    k2 = 1 / (2 * math.pi * b * b)
    lin = 1 / (2 * math.pi) + k2
    t = np.arange(-L, L + h / 2, h)
    total = 0.0
    for k, (sig, q, s) in enumerate(((-1, 1, -1), (1, -1, 1))):
        y = t + 1j * d[k]
        lv = sig * y * w0[k] * lin + 1j * q * y * y * k2 + s * log_phi_b(y / (2 * math.pi * b), b)
        m = lv.real.max()
        total += math.log(abs(np.sum(np.exp(lv - m)) * h)) + m
    return total - 2 * math.log(2 * math.pi * b)


@pytest.mark.parametrize("b", sorted(ORACLE))
def test_partition_matches_frozen_oracle(fig8, fig8_alpha, b):
    got = partition_log_modulus(fig8, fig8_alpha, b, ContourSpec(nodes=400)).log_modulus
    assert got == pytest.approx(ORACLE[b], abs=5e-11 if b >= 0.6 else 1e-9)


@pytest.mark.slow
def test_partition_matches_live_oracle(fig8, fig8_alpha):
    ref = trapezoid_log_z(0.8, 0.02, 60.0)
    assert partition_log_modulus(fig8, fig8_alpha, 0.8).log_modulus == pytest.approx(ref, abs=1e-8)


def test_node_convergence(fig8, fig8_alpha):
    lo = partition_log_modulus(fig8, fig8_alpha, 0.5, ContourSpec(nodes=200)).log_modulus
    hi = partition_log_modulus(fig8, fig8_alpha, 0.5, ContourSpec(nodes=400)).log_modulus
    assert abs(lo - hi) < 1e-10


@settings(max_examples=6)
@given(st.floats(-0.2, 0.2), st.sampled_from([0.9, 0.7]))
def test_contour_shift_invariance(delta, b):
    tri = load_preset("fig8")
    alpha = maximize_volume(tri).maximizer
    ref = partition_log_modulus(tri, alpha, b).log_modulus
    got = partition_log_modulus(tri, alpha, b, ContourSpec(delta=delta)).log_modulus
    assert got == pytest.approx(ref, abs=1e-9)


def test_rotation_does_not_matter(fig8, fig8_alpha):
    a = partition_log_modulus(fig8, fig8_alpha, 0.7, ContourSpec(rotation=0.0, nodes=300)).log_modulus
    b = partition_log_modulus(fig8, fig8_alpha, 0.7, ContourSpec(rotation=0.3)).log_modulus
    assert a == pytest.approx(b, abs=1e-10)


@pytest.mark.parametrize("name", ["twist4", "twist7"])
def test_large_n_refused(name):
    tri = load_preset(name)
    with pytest.raises(QuadratureError):
        partition_log_modulus(tri, maximize_volume(tri).maximizer, 0.9)


def test_prediction_for_fig8(fig8, fig8_alpha):
    p = predicted_modulus(fig8, fig8_alpha)
    assert p.volume == pytest.approx(2.029883212819307, abs=1e-12)
    assert p.tau == pytest.approx(3.0, abs=1e-12)
    assert p.prefactor == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert p.modulus(0.5) == pytest.approx(math.exp(-2.029883212819307 / (2 * math.pi * 0.25)) / math.sqrt(3))


# ---------------------------------------------------------------- fit


def _synthetic(bs, V=2.0, c=0.5, pert=0.0):
    return [(b, c * math.exp(-V / (2 * math.pi * b * b) + 0.3 * b * b + pert * b ** 4)) for b in bs]


def test_fit_recovers_synthetic():
    r = fit_asymptotics(_synthetic((1.0, 0.8, 0.6, 0.5, 0.4)), predicted_rate=-2.0, predicted_prefactor=0.5)
    assert r.rate_error < 1e-10 and r.prefactor_error < 1e-10


def test_fit_absorbs_higher_order():
    r = fit_asymptotics(_synthetic((1.0, 0.8, 0.6, 0.5, 0.4), pert=0.7), predicted_rate=-2.0)
    assert r.rate_error < 1e-6


def test_fit_power():
    data = [(b, v * b) for b, v in _synthetic((1.0, 0.8, 0.6, 0.5))]
    assert fit_asymptotics(data, power=1).fitted_rate == pytest.approx(-2.0, abs=1e-10)


@pytest.mark.parametrize("data", [
    [(1.0, 1.0), (0.8, 1.0), (0.6, 1.0)],
    [(1.0, 1.0), (0.8, -1.0), (0.6, 1.0), (0.5, 1.0)],
    [(1.0, 1.0), (0.8, math.nan), (0.6, 1.0), (0.5, 1.0)],
    [(1.0, 1.0), (1.0, 1.0), (0.6, 1.0), (0.5, 1.0)],
    [(0.0, 1.0), (0.8, 1.0), (0.6, 1.0), (0.5, 1.0)],
])
def test_fit_rejects_bad_samples(data):
    with pytest.raises(FitError):
        fit_asymptotics(data)


# ---------------------------------------------------------------- Jones


@pytest.mark.parametrize("b", sorted(JONES_AT_0))
def test_jones_frozen(fig8, b):
    got = jones_function(fig8, 0.0, b, log=True)
    assert got.real == pytest.approx(JONES_AT_0[b], abs=1e-10)
    assert abs(got.imag) < 1e-12


@settings(max_examples=8)
@given(st.floats(0.0, 1.5), st.sampled_from([0.9, 0.7]))
def test_jones_real_and_even_for_amphichiral_knot(x, b):
    tri = load_preset("fig8")
    plus = jones_function(tri, x, b, log=True)
    minus = jones_function(tri, -x, b, log=True)
    assert abs(plus.imag) < 1e-10
    assert plus.real == pytest.approx(minus.real, abs=1e-10)


# ---------------------------------------------------------------- A-polynomial


def test_fig8_apolynomial_vanishes(fig8):
    poly = parse_apolynomial(preset_file("fig8", ".apoly").read_text())
    worst, vals = aj_evaluate(poly, fig8, samples=10)
    assert worst < 1e-9 and len(vals) == 10


def test_apolynomial_negative_controls(fig8):
    unit = APolynomial(((0, 0, 1),))
    assert aj_evaluate(unit, fig8, samples=4)[0] == pytest.approx(1.0)
    poly = parse_apolynomial(preset_file("fig8", ".apoly").read_text())
    prod = APolynomial(((0, 1, 1), (0, 0, -1))).times(poly)
    assert aj_evaluate(prod, fig8, samples=6)[0] < 1e-9


def test_apolynomial_product():
    p = APolynomial(((1, 0, 1), (0, 1, 2)))
    q = APolynomial(((-1, 0, 1), (0, 0, -1)))
    M, L = 1.3 - 0.2j, 0.7 + 0.4j
    assert p.times(q)(M, L) == pytest.approx(p(M, L) * q(M, L))


@pytest.mark.parametrize("text", ["1 2", "x 1 2", "1 1.5 0", "1 2 3 4"])
def test_apolynomial_parse_errors(text):
    with pytest.raises(ValueError, match="line 1"):
        parse_apolynomial(text)


def test_apolynomial_comments():
    p = parse_apolynomial("# header\n\n2 1 0  # M\n-1 0 1\n")
    assert p.terms == ((1, 0, 2), (0, 1, -1))
