"""Shape solutions of the gluing equations, volume and the potential S."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .kinematical import KinematicalMatrices
from .nz_gluing import NZSystem
from .special_functions import bloch_wigner, dilog_array
from .triangulation import PeripheralCurve

__all__ = [
    "SolverError",
    "StripError",
    "ShapeSolution",
    "PotentialEval",
    "solve_gluing",
    "continue_solution",
    "sweep_u",
    "hyperbolic_volume",
    "complex_holonomy",
    "potential_S",
    "weight_vector",
    "find_critical_point",
    "shapes_from_y",
]

_TWO_PI_I = 2j * math.pi


class SolverError(RuntimeError):
    pass


class StripError(ValueError):
    pass


@dataclass(frozen=True)
class ShapeSolution:
    """Shapes with the logarithms used to reach them.

    ``logz`` and ``logzpp`` are tracked continuously, so they may differ from
    principal values by multiples of 2 pi i after long continuations;
    ``winding`` records that difference for Log z''.
    """

    z: np.ndarray
    logz: np.ndarray
    logzpp: np.ndarray
    winding: np.ndarray
    signs: np.ndarray
    residual: float
    u_target: complex
    iterations: int

    @property
    def N(self) -> int:
        return self.z.size

    @property
    def zp(self) -> np.ndarray:
        return 1.0 / (1.0 - self.z)

    @property
    def zpp(self) -> np.ndarray:
        return (self.z - 1.0) / self.z

    @property
    def logzp(self) -> np.ndarray:
        return 1j * math.pi - self.logz - self.logzpp

    @property
    def y(self) -> np.ndarray:
        return self.signs * (self.logz - 1j * math.pi)

    @property
    def geometric(self) -> bool:
        return bool(np.all(self.z.imag > 0))


@dataclass(frozen=True)
class PotentialEval:
    value: complex
    gradient: np.ndarray
    hessian: np.ndarray
    lambda_target: complex


def _residual_vector(nz: NZSystem, logz, logzpp, u) -> np.ndarray:
    A, B = nz.float_A(), nz.float_B()
    rhs = 1j * nz.nu_vector()
    rhs[-1] += u
    return A @ logz + B @ logzpp - rhs


def _track(prev: np.ndarray | None, principal: np.ndarray) -> np.ndarray:
    if prev is None:
        return principal
    k = np.round((prev - principal).imag / (2 * math.pi))
    return principal + _TWO_PI_I * k


def solve_gluing(nz: NZSystem, u: complex = 0.0, z0=None, tol: float = 1e-12, max_iter: int = 100,
                 signs=None, logz0=None, logzpp0=None) -> ShapeSolution:
    """Newton iteration in the y coordinates for ``A Log z + B Log z'' = i pi nu + u e_N``.

    ``u`` is the target logarithmic holonomy of the system's curve, so the
    complete structure is ``u = 0`` and the cone structure of angle theta is
    ``u = i theta``.
    """
    n = nz.N
    eps = np.ones(n) if signs is None else np.asarray(signs, dtype=float)
    if logz0 is None:
        z0 = np.full(n, cmath.exp(1j * math.pi / 3)) if z0 is None else np.asarray(z0, dtype=complex)
        logz = np.log(z0)
    else:
        logz = np.asarray(logz0, dtype=complex).copy()
    logzpp = _track(None if logzpp0 is None else np.asarray(logzpp0), np.log(1 - np.exp(-logz)))
    A, B = nz.float_A(), nz.float_B()
    y = eps * (logz - 1j * math.pi)
    F = _residual_vector(nz, logz, logzpp, u)
    res = float(np.max(np.abs(F)))
    best, stall = res, 0
    it = 0
    while res >= tol and it < max_iter:
        it += 1
        z = np.exp(logz)
        J = (A + B * (1.0 / (z - 1.0))[None, :]) * eps[None, :]
        try:
            dy = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular Jacobian") from exc
        t = 1.0
        while True:
            y_try = y + t * dy
            lz = eps * y_try + 1j * math.pi
            lzpp = _track(logzpp, np.log(1 - np.exp(-lz)))
            F_try = _residual_vector(nz, lz, lzpp, u)
            r_try = float(np.max(np.abs(F_try)))
            if r_try < res or t < 1e-6:
                break
            t *= 0.5
        y, logz, logzpp, F, res = y_try, lz, lzpp, F_try, r_try
        if res < best * (1 - 1e-3):
            best, stall = res, 0
        else:
            stall += 1
            if stall >= 50:
                raise SolverError(f"Newton stalled at residual {res:.3e}")
    # accept a near miss when the residual floor sits just above tol
    if res >= 1e3 * tol:
        raise SolverError(f"no convergence: residual {res:.3e} after {it} steps")
    z = np.exp(logz)
    winding = np.round((logzpp - np.log(1 - 1 / z)).imag / (2 * math.pi)).astype(int)
    return ShapeSolution(z, logz, logzpp, winding, eps.astype(int), res, complex(u), it)


def continue_solution(nz: NZSystem, u: complex, start: ShapeSolution, steps: int = 10, **kw) -> ShapeSolution:
    """Follow the solution from ``start.u_target`` to ``u`` in equal steps."""
    sol = start
    for k in range(1, steps + 1):
        uk = start.u_target + (u - start.u_target) * k / steps
        sol = solve_gluing(nz, uk, signs=sol.signs, logz0=sol.logz, logzpp0=sol.logzpp, **kw)
    return sol


def sweep_u(nz: NZSystem, signs, u_from: complex, u_to: complex, steps: int, start: ShapeSolution | None = None):
    """Solutions along the segment from ``u_from`` to ``u_to`` (inclusive)."""
    sol = start or solve_gluing(nz, 0.0, signs=signs)
    if sol.u_target != u_from:
        sol = continue_solution(nz, u_from, sol, steps=max(1, int(abs(u_from - sol.u_target) / 0.05) + 1))
    out = [sol]
    for k in range(1, steps + 1):
        uk = u_from + (u_to - u_from) * k / steps
        sol = solve_gluing(nz, uk, signs=sol.signs, logz0=sol.logz, logzpp0=sol.logzpp)
        out.append(sol)
    return out


def hyperbolic_volume(sol: ShapeSolution) -> float:
    return float(sum(bloch_wigner(z) for z in sol.z))


def complex_holonomy(curve: PeripheralCurve, sol: ShapeSolution) -> complex:
    """``sum(C Log z + Cp Log z' + Cpp Log z'') - i pi nu`` at the solution."""
    C, Cp, Cpp = (np.asarray(v, dtype=float) for v in curve.rows())
    return complex(C @ sol.logz + Cp @ sol.logzp + Cpp @ sol.logzpp - 1j * math.pi * curve.nu)


# ---------------------------------------------------------------- potential


def weight_vector(nz: NZSystem, km: KinematicalMatrices, lam: complex) -> np.ndarray:
    """``B^{-1}(nu + u) - scriptG pi`` with u = (0, ..., 0, lam)."""
    Binv = np.array(nz.Binv.tolist(), dtype=float)
    G = np.array(km.scriptG.tolist(), dtype=float)
    v = nz.nu_vector().astype(complex)
    v[-1] += lam
    return Binv @ v - G @ np.full(nz.N, math.pi)


def _check_strip(y: np.ndarray, signs: np.ndarray) -> None:
    im = y.imag
    ok = np.where(signs > 0, (im > -math.pi) & (im < 0), (im > 0) & (im < math.pi))
    if not np.all(ok):
        raise StripError("y outside the strips R - i(0, pi) / R + i(0, pi)")


def potential_S(y, lam: complex, nz: NZSystem, km: KinematicalMatrices, check: bool = True) -> PotentialEval:
    """S(y; lam) with its analytic gradient and Hessian."""
    y = np.asarray(y, dtype=complex)
    signs = np.asarray(km.signs, dtype=float)
    if check:
        _check_strip(y, signs)
    sigma = -signs  # -1 on positive, +1 on negative tetrahedra
    Q = np.array(km.Q.tolist(), dtype=float)
    w = weight_vector(nz, km, lam)
    ey = np.exp(y)
    li = dilog_array(-ey)
    value = 1j * (y @ Q @ y) + np.sum(sigma * y * w) - 1j * np.sum(sigma * li)
    grad = 2j * (Q @ y) + sigma * w + 1j * sigma * np.log1p(ey)
    hess = 2j * Q + np.diag(1j * sigma * ey / (1 + ey))
    return PotentialEval(complex(value), grad, hess, complex(lam))


def shapes_from_y(y, signs) -> np.ndarray:
    return np.exp(np.asarray(signs) * np.asarray(y) + 1j * math.pi)


def find_critical_point(nz: NZSystem, km: KinematicalMatrices, lam: complex, start: ShapeSolution | None = None,
                        tol: float = 1e-10):
    """Critical point of S from the gluing solution with holonomy i*lam."""
    u = 1j * lam
    if start is None:
        sol = solve_gluing(nz, 0.0, signs=km.signs)
        if u != 0:
            sol = continue_solution(nz, u, sol, steps=max(1, int(abs(u) / 0.05) + 1))
    else:
        sol = solve_gluing(nz, u, signs=km.signs, logz0=start.logz, logzpp0=start.logzpp)
    ev = potential_S(sol.y, lam, nz, km)
    if np.max(np.abs(ev.gradient)) > tol:
        raise SolverError(f"gradient of S not small at the gluing solution: {np.max(np.abs(ev.gradient)):.3e}")
    return sol, ev
