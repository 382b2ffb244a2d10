"""Desk-scale acceptance suite A1-A7.

Each criterion returns a ``Criterion`` with a verdict and the numbers behind
it; the CLI and the test suite share these functions.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .angle_structures import AngleStructure, angle_constraints, maximize_volume
from .geometry import continue_solution, find_critical_point, hyperbolic_volume, potential_S, solve_gluing
from .kinematical import kinematical_matrices
from .nz_gluing import famed_check, nz_system
from .one_loop import flattening_residual, hessian_torsion_sides, strong_flattening
from .partition_jones import (
    DEFAULT_SWEEP,
    ContourSpec,
    fit_asymptotics,
    jones_function,
    jones_reconstruction,
    partition_log_modulus,
    predicted_modulus,
)
from .special_functions import bloch_wigner, log_phi_b, phi_b, phi_b_semiclassical_residual
from .triangulation import load_preset

__all__ = [
    "Criterion",
    "VOLUME_41",
    "twist_goldens",
    "criterion_a1",
    "criterion_a2",
    "criterion_a3",
    "criterion_a4",
    "criterion_a5",
    "criterion_a6",
    "criterion_a7",
    "CRITERIA",
    "run_suite",
]

VOLUME_41 = 2.029883212819307
_TWISTS = ("twist4", "twist5", "twist6", "twist7")
# known shortfalls: id -> reason, see the decisions ledger
DOCUMENTED = {
    "A4": "pred/|Z| is 1.107 at b = 0.4; the O(b^2) term alone is about 0.6 b^2",
}


@dataclass
class Criterion:
    id: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float = math.inf

    @property
    def documented(self) -> str | None:
        return None if self.passed else DOCUMENTED.get(self.id)

    def line(self) -> str:
        verdict = "PASS" if self.passed else ("FAIL (documented)" if self.documented else "FAIL")
        return f"{self.id} {verdict}: {self.title} [{self.seconds:.1f}s]"


def _timed(cid: str, title: str, budget: float):
    def wrap(fn):
        def run(**kw) -> Criterion:
            t0 = time.perf_counter()
            passed, details = fn(**kw)
            dt = time.perf_counter() - t0
            return Criterion(cid, title, bool(passed and dt < budget), details, dt, budget)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------- A1


def twist_goldens(n: int) -> dict[str, sp.Matrix]:
    """Q, scriptG and B^-1 of X_n written out entry by entry (N = p + 3)."""
    p = (n - 3) // 2 if n % 2 else (n - 2) // 2
    N = p + 3
    U, V, W = p, p + 1, p + 2
    odd = n % 2 == 1
    h = sp.Rational(1, 2)
    Q = sp.zeros(N, N)
    G = sp.zeros(N, N)
    Bi = sp.zeros(N, N)
    for i in range(p):
        for j in range(p):
            Q[i, j] = min(i, j) + 1
            G[i, j] = -(2 * i + 1) if i == j else -2 * (min(i, j) + 1)
        Q[i, U] = Q[U, i] = -(i + 1) if odd else i + 1
        G[i, U] = G[U, i] = -2 * (i + 1)
    if odd:
        Q[U, U], Q[U, V], Q[U, W], Q[V, V], Q[V, W] = p + 2, -3 * h, 1, 1, -h
        G[U, U], G[U, V], G[U, W], G[V, V], G[V, W] = -2 * p - 4, 3, -2, -2, 1
    else:
        Q[U, U], Q[U, V], Q[U, W], Q[V, V], Q[V, W] = p + 1, -h, -1, -1, -h
        G[U, U], G[U, V], G[U, W], G[V, V], G[V, W] = -2 * p - 1, -1, -2, 2, 1
    for M in (Q, G):
        M[V, U], M[W, U], M[W, V] = M[U, V], M[U, W], M[V, W]
    for i in range(p):
        Bi[i, 0] = -(i + 1)
        for j in range(1, i + 2):
            Bi[i, j] = -(i + 2 - j)
    Bi[U, 0] = -(p + 1)
    for j in range(1, p + 1):
        Bi[U, j] = -(p + 1 - j)
    Bi[U, V], Bi[U, W] = 1, -h
    Bi[V, 0], Bi[V, W] = (1 if odd else 0), h
    Bi[W, 0] = -1
    return {"Q": Q, "scriptG": G, "Binv": Bi}


@_timed("A1", "exact golden matrices on 4_1 and X_4..X_7", 1.0)
def criterion_a1():
    t = load_preset("fig8")
    km = kinematical_matrices(t)
    nz = nz_system(t)
    cert = famed_check(t)
    want = {
        "R": sp.Matrix([[0, 1, 0, 0], [0, 0, -1, 0]]),
        "A": sp.Matrix([[-1, 1, 1, 0], [0, 1, 1, -1], [0, 0, 1, -1], [-1, 1, 0, 0]]),
        "B": sp.Matrix([[0, 0], [0, 0], [1, 0], [0, 1]]),
        "Q": sp.diag(1, -1),
        "scriptG": sp.diag(-1, 2),
        "Abold": sp.Matrix([[1, -2], [0, 4]]),
        "Bbold": sp.Matrix([[-1, -1], [0, 2]]),
    }
    got = {"R": km.R, "A": km.A, "B": km.B, "Q": km.Q, "scriptG": km.scriptG, "Abold": nz.Abold, "Bbold": nz.Bbold}
    checks = {f"fig8.{k}": got[k] == v for k, v in want.items()}
    checks["fig8.famed"] = cert.famed and cert.BinvA == want["scriptG"]
    for name in _TWISTS:
        tw = load_preset(name)
        gold = twist_goldens(int(name[-1]))
        kt = kinematical_matrices(tw)
        ct = famed_check(tw)
        checks[f"{name}.Q"] = kt.Q == gold["Q"]
        checks[f"{name}.scriptG"] = kt.scriptG == gold["scriptG"]
        checks[f"{name}.Binv"] = nz_system(tw).Binv == gold["Binv"]
        checks[f"{name}.famed"] = ct.famed
    return all(checks.values()), {"checks": checks}


# ---------------------------------------------------------------- A2


@_timed("A2", "quantum dilogarithm and Bloch-Wigner identities", 30.0)
def criterion_a2(seed: int = 0):
    rng = np.random.default_rng(seed)
    unit = {}
    for b in (0.5, 0.8, 1.0):
        x = rng.uniform(-10, 10, 1000)
        unit[b] = float(np.max(np.abs(np.abs(phi_b(x, b)) - 1)))
    inv = {}
    for b in (0.5, 0.8, 1.0):
        cb = 0.5 * (b + 1 / b)
        z = np.array([complex(a, c) for a in np.linspace(-3, 3, 13) for c in np.linspace(-0.7, 0.7, 7) * cb])
        lhs = log_phi_b(z, b) + log_phi_b(-z, b)
        rhs = 1j * math.pi * z * z + 1j * math.pi * (b * b + 1 / (b * b)) / 12
        inv[b] = float(np.max(np.abs(np.exp(lhs - rhs) - 1)))
    bs = np.array([0.2, 0.1, 0.05])
    orders = {}
    for z in (0.3 + 0.2j, -0.5 + 0.4j, 1.0 - 0.3j):
        r = np.array([phi_b_semiclassical_residual(z, b) for b in bs])
        orders[str(z)] = float(np.polyfit(np.log(bs), np.log(r), 1)[0])
    zs = rng.normal(size=50) + 1j * rng.normal(size=50)
    sym = max(abs(bloch_wigner(z.conjugate()) + bloch_wigner(z)) for z in zs)
    real = max(abs(bloch_wigner(x)) for x in rng.uniform(-5, 5, 50))
    ok = (max(unit.values()) < 1e-10 and max(inv.values()) < 1e-9
          and all(abs(o - 2) <= 0.2 for o in orders.values()) and sym < 1e-12 and real < 1e-12)
    return ok, {"unitarity": unit, "inversion": inv, "semiclassical_order": orders,
                "bw_conjugate": sym, "bw_real": real}


# ---------------------------------------------------------------- A3 / A4


@lru_cache(maxsize=None)
def _fig8_alpha() -> AngleStructure:
    return maximize_volume(load_preset("fig8")).maximizer


@lru_cache(maxsize=None)
def _fig8_log_z(b: float, nodes: int) -> float:
    return partition_log_modulus(load_preset("fig8"), _fig8_alpha(), b, ContourSpec(nodes=nodes)).log_modulus


@_timed("A3", "partition function decays at the volume rate", 600.0)
def criterion_a3(nodes: int = 400, sweep=DEFAULT_SWEEP):
    vol = 2 * bloch_wigner(cmath.exp(1j * math.pi / 3))
    t = load_preset("fig8")
    geo = hyperbolic_volume(solve_gluing(nz_system(t), 0.0, signs=t.signs))
    samples = [(b, math.exp(_fig8_log_z(b, nodes))) for b in sweep]
    rep = fit_asymptotics(samples, -vol)
    ok = abs(vol - VOLUME_41) < 1e-9 and abs(geo - vol) < 1e-9 and rep.rate_error <= 0.05
    return ok, {"volume": vol, "geometric_volume": geo, "fitted_rate": rep.fitted_rate,
                "rate_error": rep.rate_error, "samples": samples}


@_timed("A4", "one-loop prefactor and Hessian-torsion bridge", 600.0)
def criterion_a4(nodes: int = 400):
    t = load_preset("fig8")
    pred = predicted_modulus(t, _fig8_alpha())
    bs = (0.6, 0.5, 0.45, 0.4)
    ratio = {b: pred.modulus(b) / math.exp(_fig8_log_z(b, nodes)) for b in bs}
    dev = [abs(ratio[b] - 1) for b in bs]
    shrinking = all(x > y for x, y in zip(dev, dev[1:]))
    nz = nz_system(t)
    km = kinematical_matrices(t)
    flat = strong_flattening(t)
    bridge = {}
    for lam in (0.0, 0.1):
        sol, ev = find_critical_point(nz, km, lam)
        lhs, rhs = hessian_torsion_sides(nz, ev.hessian, sol, flat)
        # the identity holds up to sign
        bridge[str(lam)] = min(abs(lhs - rhs), abs(lhs + rhs)) / abs(rhs)
    ok = 0.9 <= ratio[0.4] <= 1.1 and shrinking and max(bridge.values()) < 1e-8
    return ok, {"ratio": ratio, "deviation_shrinks": shrinking, "bridge": bridge,
                "prefactor": pred.prefactor, "tau": pred.tau}


# ---------------------------------------------------------------- A5


@_timed("A5", "Jones function asymptotics and reconstruction", 300.0)
def criterion_a5(sweep=DEFAULT_SWEEP, x_nodes: int = 240):
    t = load_preset("fig8")
    alpha = _fig8_alpha()
    samples = [(b, abs(jones_function(t, 0.0, b, alpha=alpha))) for b in sweep]
    rep = fit_asymptotics(samples, -VOLUME_41, power=t.N - 1)
    log_z = partition_log_modulus(t, alpha, 0.8).log_modulus
    log_r = jones_reconstruction(t, 0.8, alpha, x_nodes=x_nodes)
    rel = abs(math.expm1(log_r - log_z))
    ok = rep.rate_error <= 0.05 and rel < 1e-4
    return ok, {"fitted_rate": rep.fitted_rate, "rate_error": rep.rate_error,
                "reconstruction_relative": rel, "samples": samples}


# ---------------------------------------------------------------- A6


@_timed("A6", "angle-structure volume maximization and slices", 60.0)
def criterion_a6():
    t = load_preset("fig8")
    rep = maximize_volume(t)
    at_regular = float(np.max(np.abs(rep.maximizer.angles - math.pi / 3)))
    nz = nz_system(t)
    base = solve_gluing(nz, 0.0, signs=t.signs)
    slices = {}
    for th in np.round(np.linspace(-0.3, 0.3, 7), 12):
        r = maximize_volume(t, slice_theta=float(th))
        sol = continue_solution(nz, 1j * th, base, steps=10) if th else base
        slices[float(th)] = (r.value, hyperbolic_volume(sol))
    below = all(v <= rep.value + 1e-12 for v, _ in slices.values())
    match = max(abs(v - g) for v, g in slices.values())
    ok = (abs(rep.value - VOLUME_41) < 1e-6 and at_regular < 1e-6 and rep.kkt_residual < 1e-8
          and below and match < 1e-4)
    return ok, {"value": rep.value, "kkt": rep.kkt_residual, "max_angle_error": at_regular,
                "slices": slices, "slice_mismatch": match}


# ---------------------------------------------------------------- A7


def _fd_gradient_error(name: str, h: float = 1e-6) -> float:
    t = load_preset(name)
    nz = nz_system(t)
    km = kinematical_matrices(t)
    sol, _ = find_critical_point(nz, km, 0.0)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(3):
        y = sol.y + 0.05 * (rng.normal(size=t.N) + 1j * rng.normal(size=t.N))
        lam = 0.1
        g = potential_S(y, lam, nz, km).gradient
        for k in range(t.N):
            e = np.zeros(t.N)
            e[k] = h
            fd = (potential_S(y + e, lam, nz, km).value - potential_S(y - e, lam, nz, km).value) / (2 * h)
            worst = max(worst, abs(fd - g[k]))
    return worst


def _drop_edge_residual(name: str) -> float:
    t = load_preset(name)
    ref = solve_gluing(nz_system(t, drop_edge=0), 0.0, signs=t.signs)
    worst = 0.0
    for e in range(1, len(t.edge_classes)):
        sol = solve_gluing(nz_system(t, drop_edge=e), 0.0, signs=t.signs)
        worst = max(worst, float(np.max(np.abs(sol.z - ref.z))))
    return worst


@_timed("A7", "property suites: flattening, gradients, contour and edge independence", 120.0)
def criterion_a7():
    names = ("fig8",) + _TWISTS
    flat = {}
    for n in names:
        t = load_preset(n)
        flat[n] = int(np.max(np.abs(flattening_residual(t, strong_flattening(t)))))
    grad = {n: _fd_gradient_error(n) for n in names}
    drop = {n: _drop_edge_residual(n) for n in names}
    t = load_preset("fig8")
    a0 = _fig8_alpha()
    M, _ = angle_constraints(t, 0.0)
    from scipy.linalg import null_space

    other = AngleStructure(a0.angles + 0.15 * null_space(M)[:, 0])
    b = 0.8
    z0 = partition_log_modulus(t, a0, b).log_modulus
    shift = abs(math.expm1(partition_log_modulus(t, a0, b, ContourSpec(delta=0.1)).log_modulus - z0))
    slice_ = abs(math.expm1(partition_log_modulus(t, other, b).log_modulus - z0))
    ok = (max(flat.values()) == 0 and max(grad.values()) < 1e-7 and shift < 1e-6 and slice_ < 1e-6
          and max(drop.values()) < 1e-10)
    return ok, {"flattening": flat, "gradient": grad, "contour_shift": shift, "angle_slice": slice_,
                "dropped_edge": drop}


CRITERIA = {
    "A1": criterion_a1,
    "A2": criterion_a2,
    "A3": criterion_a3,
    "A4": criterion_a4,
    "A5": criterion_a5,
    "A6": criterion_a6,
    "A7": criterion_a7,
}


def run_suite(suite: str = "desk", only=None) -> list[Criterion]:
    """Run the criteria in order; ``desk`` is the only suite."""
    if suite != "desk":
        raise ValueError(f"unknown suite {suite!r}")
    ids = only or list(CRITERIA)
    return [CRITERIA[i]() for i in ids]
