import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from famedkit.special_functions import (
    PoleError,
    QDilogParams,
    bloch_wigner,
    dilog,
    dilog_array,
    log_phi_b,
    phi_b,
    phi_b_semiclassical_residual,
)

import oracles

# log Phi_b from the mpmath contour integral (tests/oracles.py), frozen
PHI_REFERENCE = [
    (0.3 + 0.2j, 0.8, -0.4455731857816765 + 0.6734020128668927j),
    (-1.2 + 0.1j, 0.5, -0.004961575198042258 + 0.015397986947359285j),
    (2.0 - 0.3j, 1.0, 3.769918668778337 + 12.807227382956912j),
    (0.0, 0.7, 0.3312830824589033j),
    (0.5 + 0.25j, 0.3, -1.055630392398809 + 2.9383080055766824j),
]

finite = st.floats(-6, 6, allow_nan=False)
bs = st.floats(0.3, 1.5)


def _close_mod_2pi_i(a, b, tol):
    d = complex(a) - complex(b)
    return abs(d.real) < tol and abs((d.imag + math.pi) % (2 * math.pi) - math.pi) < tol


@pytest.mark.parametrize("z", [0.3 + 0.4j, -0.9 + 0.1j, 2.5 - 1.0j, 0.5, -3.0, 1.0 + 1e-3j, 0.999, 10 + 0.5j, -0.2j])
def test_dilog_against_mpmath(z):
    assert abs(dilog(z) - oracles.dilog(z)) < 1e-13 * max(1.0, abs(oracles.dilog(z)))


def test_dilog_special_values():
    assert dilog(1) == pytest.approx(math.pi ** 2 / 6, abs=1e-15)
    assert dilog(-1) == pytest.approx(-math.pi ** 2 / 12, abs=1e-14)
    assert dilog(0.5) == pytest.approx(math.pi ** 2 / 12 - math.log(2) ** 2 / 2, abs=1e-14)


def test_dilog_cut_raises():
    with pytest.raises(ValueError):
        dilog(2.0)


@given(finite, st.floats(0.01, 6))
def test_dilog_reflection(x, y):
    z = complex(x, y)
    lhs = dilog(z) + dilog(1 - z)
    rhs = math.pi ** 2 / 6 - cmath.log(z) * cmath.log(1 - z)
    assert abs(lhs - rhs) < 1e-11 * max(1, abs(rhs))


def test_dilog_array_shape():
    z = np.array([[0.1, 0.2j], [-1, 0.5 + 0.5j]])
    out = dilog_array(z)
    assert out.shape == (2, 2)
    assert out[1, 1] == pytest.approx(dilog(0.5 + 0.5j))


@pytest.mark.parametrize("z", [0.5 + 0.5j, cmath.exp(1j * math.pi / 3), -2 + 0.3j, 3 - 4j])
def test_bloch_wigner_against_mpmath(z):
    assert bloch_wigner(z) == pytest.approx(oracles.bloch_wigner(z), abs=1e-14)


def test_bloch_wigner_regular_tetrahedron():
    assert 2 * bloch_wigner(cmath.exp(1j * math.pi / 3)) == pytest.approx(2.029883212819307, abs=1e-14)


@given(finite, st.floats(0.01, 6))
def test_bloch_wigner_symmetries(x, y):
    z = complex(x, y)
    d = bloch_wigner(z)
    assert bloch_wigner(z.conjugate()) == pytest.approx(-d, abs=1e-12)
    assert bloch_wigner(1 - z) == pytest.approx(-d, abs=1e-11)
    assert bloch_wigner(1 / z) == pytest.approx(-d, abs=1e-11)


@given(finite)
def test_bloch_wigner_vanishes_on_reals(x):
    assert bloch_wigner(x) == 0.0


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.1, 3))
def test_bloch_wigner_five_term(a, b, c, d):
    x, y = complex(a, b), complex(c, d)
    if min(abs(1 - x * y), abs(1 - x), abs(1 - y)) < 1e-3:
        return
    s = (bloch_wigner(x) + bloch_wigner(y) + bloch_wigner((1 - x) / (1 - x * y))
         + bloch_wigner(1 - x * y) + bloch_wigner((1 - y) / (1 - x * y)))
    assert abs(s) < 1e-10


@pytest.mark.parametrize("z, b, ref", PHI_REFERENCE)
def test_phi_b_against_contour_integral(z, b, ref):
    assert _close_mod_2pi_i(log_phi_b(z, b), ref, 1e-12)


@pytest.mark.slow
def test_phi_b_oracle_live():
    z, b = 0.7 - 0.35j, 0.6
    assert _close_mod_2pi_i(log_phi_b(z, b), oracles.log_phi_b(z, b), 1e-12)


@given(finite, bs)
def test_phi_b_unitary_on_reals(x, b):
    assert abs(abs(phi_b(x, b)) - 1) < 1e-12


@given(finite, st.floats(-0.45, 0.45), bs)
def test_phi_b_inversion(x, y, b):
    z = complex(x, y * (b + 1 / b))
    s = log_phi_b(z, b) + log_phi_b(-z, b) - 1j * math.pi * z * z - 1j * math.pi * (b * b + 1 / (b * b)) / 12
    assert _close_mod_2pi_i(s, 0, 1e-9)


@given(finite, st.floats(-0.2, 0.2), bs)
def test_phi_b_functional_equation(x, y, b):
    z = complex(x, y)
    lhs = log_phi_b(z - 0.5j * b, b) - log_phi_b(z + 0.5j * b, b)
    rhs = np.log1p(np.exp(2 * math.pi * b * z))
    assert _close_mod_2pi_i(lhs, rhs, 1e-9)


@given(finite, bs)
def test_phi_b_b_duality(x, b):
    assert _close_mod_2pi_i(log_phi_b(x, b), log_phi_b(x, 1 / b), 1e-11)


def test_phi_b_far_field():
    b = 0.7
    assert abs(log_phi_b(-40.0, b)) < 1e-15
    right = log_phi_b(40.0, b) - 1j * math.pi * 1600 - 1j * math.pi * (b * b + 1 / b / b) / 12
    assert _close_mod_2pi_i(right, 0, 1e-9)


def test_phi_b_array_and_scalar():
    z = np.array([0.1, 0.2 + 0.1j, -0.3])
    out = log_phi_b(z, 0.8)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(log_phi_b(0.2 + 0.1j, 0.8))
    assert isinstance(log_phi_b(0.1, 0.8), complex)


def test_phi_b_pole_detected():
    b = 0.8
    cb = 0.5 * (b + 1 / b)
    with pytest.raises(PoleError):
        log_phi_b(1j * cb, b)


def test_params_validation():
    with pytest.raises(ValueError):
        QDilogParams(-1.0)
    p = QDilogParams(1.0)
    assert p.hbar == pytest.approx(0.25) and p.strip_halfwidth == 1.0


def test_semiclassical_order_two():
    bs_ = np.array([0.2, 0.1, 0.05])
    r = [phi_b_semiclassical_residual(0.3 + 0.2j, b) for b in bs_]
    assert np.polyfit(np.log(bs_), np.log(r), 1)[0] == pytest.approx(2.0, abs=0.05)
