import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from famedkit.geometry import (
    SolverError,
    StripError,
    complex_holonomy,
    continue_solution,
    find_critical_point,
    hyperbolic_volume,
    potential_S,
    shapes_from_y,
    solve_gluing,
    sweep_u,
)
from famedkit.kinematical import kinematical_matrices
from famedkit.nz_gluing import CONVENTIONS, nz_system
from famedkit.one_loop import (
    Flattening,
    flattening_residual,
    flattening_system,
    hessian_torsion_sides,
    normalize_sign,
    one_loop,
    one_loop_tau,
    strong_flattening,
)
from famedkit.triangulation import load_preset

from conftest import PRESETS

W = cmath.exp(1j * math.pi / 3)


def test_fig8_complete_structure(fig8):
    sol = solve_gluing(nz_system(fig8), 0.0, signs=fig8.signs)
    assert np.allclose(sol.z, W, atol=1e-13)
    assert sol.residual < 1e-12
    assert hyperbolic_volume(sol) == pytest.approx(2.029883212819307, abs=1e-12)
    for c in fig8.curves:
        assert abs(complex_holonomy(c, sol)) < 1e-12


def test_presets_geometric(preset):
    sol = solve_gluing(nz_system(preset), 0.0, signs=preset.signs)
    assert np.all(sol.z.imag > 0)
    assert abs(complex_holonomy(preset.curve("l"), sol)) < 1e-10


@pytest.mark.parametrize("name", PRESETS)
def test_dropped_edge_independence(name):
    tri = load_preset(name)
    ref = solve_gluing(nz_system(tri, drop_edge=0), 0.0, signs=tri.signs)
    for e in range(1, tri.N):
        sol = solve_gluing(nz_system(tri, drop_edge=e), 0.0, signs=tri.signs)
        assert np.max(np.abs(sol.z - ref.z)) < 1e-10


@given(st.floats(-0.3, 0.3))
def test_continuation_hits_target(theta):
    tri = load_preset("fig8")
    nz = nz_system(tri)
    sol = continue_solution(nz, 1j * theta, solve_gluing(nz, 0.0, signs=tri.signs), steps=8)
    assert complex_holonomy(tri.curve("l"), sol) == pytest.approx(1j * theta, abs=1e-10)
    assert hyperbolic_volume(sol) <= 2.029883212819307 + 1e-12


def test_sweep_is_symmetric(fig8):
    nz = nz_system(fig8)
    vols = [hyperbolic_volume(s) for s in sweep_u(nz, fig8.signs, -0.2j, 0.2j, 4)]
    assert vols == pytest.approx(vols[::-1], abs=1e-12)
    assert max(vols) == pytest.approx(vols[2])


def test_solver_failure_reported(fig8):
    with pytest.raises(SolverError):
        solve_gluing(nz_system(fig8), 0.0, signs=fig8.signs, z0=[0.3 + 2j, 3 - 0.5j], max_iter=1)


def test_strip_guard(fig8):
    nz, km = nz_system(fig8), kinematical_matrices(fig8)
    with pytest.raises(StripError):
        potential_S(np.array([0.1 + 0.5j, 0.1 - 0.5j]), 0.0, nz, km)


@pytest.mark.parametrize("name", PRESETS)
def test_gradient_matches_finite_differences(name):
    tri = load_preset(name)
    nz, km = nz_system(tri), kinematical_matrices(tri)
    sol, ev = find_critical_point(nz, km, 0.0)
    assert np.max(np.abs(ev.gradient)) < 1e-10
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(3):
        y = sol.y + 0.05 * (rng.normal(size=tri.N) + 1j * rng.normal(size=tri.N))
        e = potential_S(y, 0.1, nz, km)
        for k in range(tri.N):
            d = np.zeros(tri.N)
            d[k] = h
            fd = (potential_S(y + d, 0.1, nz, km).value - potential_S(y - d, 0.1, nz, km).value) / (2 * h)
            assert abs(fd - e.gradient[k]) < 1e-7
            fdg = (potential_S(y + d, 0.1, nz, km).gradient - potential_S(y - d, 0.1, nz, km).gradient) / (2 * h)
            assert np.max(np.abs(fdg - e.hessian[:, k])) < 1e-6


def test_critical_point_gives_shapes(fig8):
    sol, _ = find_critical_point(nz_system(fig8), kinematical_matrices(fig8), 0.0)
    assert np.allclose(shapes_from_y(sol.y, fig8.signs), sol.z)


# ---------------------------------------------------------------- 1-loop


def test_flattening_exact_on_presets(preset):
    flat = strong_flattening(preset)
    assert flat.strong and set(flat.curves) == {c.name for c in preset.curves}
    assert not np.any(flattening_residual(preset, flat))
    assert all(a + b + c == 1 for a, b, c in zip(flat.f, flat.fp, flat.fpp))


def test_trivial_flattening_check(fig8):
    flat = Flattening((0, 0), (1, 1), (0, 0), strong=False)
    res = flattening_residual(fig8, flat)
    assert np.any(res)


def _kernel(tri):
    M, _, _, _ = flattening_system(tri)
    basis = sp.Matrix(M.tolist()).nullspace()
    out = []
    for v in basis:
        den = sp.ilcm(*[x.q for x in v])
        out.append([int(x * den) for x in v])
    return out


@pytest.mark.parametrize("name", ["fig8", "twist5"])
def test_tau_independent_of_flattening(name):
    tri = load_preset(name)
    nz = nz_system(tri)
    sol = solve_gluing(nz, 0.0, signs=tri.signs)
    flat = strong_flattening(tri)
    base = one_loop_tau(nz, sol, flat).tau
    n = tri.N
    for k in _kernel(tri):
        f = tuple(a + b for a, b in zip(flat.f, k[:n]))
        fpp = tuple(a + b for a, b in zip(flat.fpp, k[n:]))
        other = Flattening(f, tuple(1 - a - c for a, c in zip(f, fpp)), fpp, strong=True)
        assert not np.any(flattening_residual(tri, other))
        tau = one_loop_tau(nz, sol, other).tau
        assert min(abs(tau - base), abs(tau + base)) < 1e-10 * abs(base)


def test_fig8_tau(fig8):
    vals = one_loop(fig8)
    assert vals[CONVENTIONS[0]].tau == pytest.approx(3.0, abs=1e-12)


def test_normalize_sign_idempotent():
    for w in (1 + 1j, -1 - 1j, -2.0, 3j, -3j):
        v = normalize_sign(w)
        assert normalize_sign(v) == v
        assert v == w or v == -w


@pytest.mark.parametrize("name", ["fig8", "twist5"])
@pytest.mark.parametrize("lam", [0.0, 0.1, -0.15])
def test_hessian_torsion_bridge(name, lam):
    tri = load_preset(name)
    nz, km = nz_system(tri), kinematical_matrices(tri)
    sol, ev = find_critical_point(nz, km, lam)
    lhs, rhs = hessian_torsion_sides(nz, ev.hessian, sol, strong_flattening(tri))
    assert min(abs(lhs - rhs), abs(lhs + rhs)) < 1e-8 * abs(rhs)
