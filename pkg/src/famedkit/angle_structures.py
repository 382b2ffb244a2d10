"""Angle structures, the volume functional and its maximization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .special_functions import dilog_array
from .triangulation import OrderedTriangulation, PeripheralCurve

__all__ = [
    "AngleStructure",
    "VolumeReport",
    "OptimizationError",
    "lobachevsky",
    "volume_functional",
    "angle_constraints",
    "angle_column",
    "edge_weights",
    "angular_holonomy",
    "feasibility",
    "maximize_volume",
    "regular_structure",
]

_ANGLE_COL = {(0, 1): 0, (2, 3): 0, (0, 2): 1, (1, 3): 1, (0, 3): 2, (1, 2): 2}


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AngleStructure:
    """Angles ``(a_1, b_1, c_1, ..., a_N, b_N, c_N)`` in radians."""

    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float).copy())

    @property
    def N(self) -> int:
        return self.angles.size // 3

    @property
    def a(self) -> np.ndarray:
        return self.angles[0::3]

    @property
    def b(self) -> np.ndarray:
        return self.angles[1::3]

    @property
    def c(self) -> np.ndarray:
        return self.angles[2::3]

    def is_balanced(self, tri: OrderedTriangulation, tol: float = 1e-12) -> bool:
        if np.any(self.angles <= 0) or np.any(self.angles >= math.pi):
            return False
        sums = self.a + self.b + self.c
        return bool(np.all(np.abs(sums - math.pi) < tol) and np.all(np.abs(edge_weights(tri, self) - 2 * math.pi) < tol))


@dataclass(frozen=True)
class VolumeReport:
    maximizer: AngleStructure
    value: float
    slice_theta: float | None
    converged: bool
    kkt_residual: float
    boundary: tuple[int, ...] = ()


def lobachevsky(x):
    """lambda(x) = -int_0^x log|2 sin t| dt, computed as Im Li2(e^{2ix}) / 2."""
    arr = np.asarray(x, dtype=float)
    r = np.mod(arr, math.pi)
    val = 0.5 * dilog_array(np.exp(2j * r)).imag
    val = np.where((r == 0) | ~np.isfinite(arr), 0.0, val)
    return float(val) if np.ndim(x) == 0 else val


def volume_functional(alpha: AngleStructure | np.ndarray) -> float:
    angles = alpha.angles if isinstance(alpha, AngleStructure) else np.asarray(alpha, dtype=float)
    return float(np.sum(lobachevsky(angles)))


def angle_column(sign: int, symbol: int) -> int:
    """Which of a, b, c (0, 1, 2) carries the shape z, z', z'' (0, 1, 2)."""
    if symbol == 0:
        return 0
    if sign > 0:
        return 2 if symbol == 1 else 1
    return 1 if symbol == 1 else 2


def _edge_matrix(tri: OrderedTriangulation) -> np.ndarray:
    M = np.zeros((len(tri.edge_classes), 3 * tri.N))
    for ec in tri.edge_classes:
        for t, pair in ec.slots:
            M[ec.index, 3 * t + _ANGLE_COL[pair]] += 1
    return M


def _curve_row(tri: OrderedTriangulation, curve: PeripheralCurve) -> np.ndarray:
    row = np.zeros(3 * tri.N)
    for t, sign in enumerate(tri.signs):
        for sym, vec in enumerate(curve.rows()):
            row[3 * t + angle_column(sign, sym)] += vec[t]
    return row


def edge_weights(tri: OrderedTriangulation, alpha: AngleStructure) -> np.ndarray:
    return _edge_matrix(tri) @ alpha.angles


def angular_holonomy(tri: OrderedTriangulation, alpha: AngleStructure, curve: str | PeripheralCurve = "l") -> float:
    """Imaginary part of the logarithmic holonomy at shapes with these angles."""
    c = tri.curve(curve) if isinstance(curve, str) else curve
    return float(_curve_row(tri, c) @ alpha.angles - math.pi * c.nu)


def angle_constraints(tri: OrderedTriangulation, slice_theta: float | None = None, curve: str = "l"):
    """Equality constraints ``M x = d`` cutting out the (sliced) polytope."""
    n = tri.N
    tet = np.zeros((n, 3 * n))
    for t in range(n):
        tet[t, 3 * t:3 * t + 3] = 1
    rows = [tet, _edge_matrix(tri)]
    rhs = [np.full(n, math.pi), np.full(len(tri.edge_classes), 2 * math.pi)]
    if slice_theta is not None:
        c = tri.curve(curve)
        rows.append(_curve_row(tri, c)[None, :])
        rhs.append(np.array([slice_theta + math.pi * c.nu]))
    return np.vstack(rows), np.concatenate(rhs)


def feasibility(tri: OrderedTriangulation, slice_theta: float | None = None, curve: str = "l",
                max_iter: int = 10_000) -> AngleStructure | None:
    """Interior point maximizing the smallest angle, or None if there is none."""
    M, d = angle_constraints(tri, slice_theta, curve)
    m = M.shape[1]
    # variables (x, delta); maximize delta subject to x_i >= delta
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    A_eq = np.hstack([M, np.zeros((M.shape[0], 1))])
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=d,
                  bounds=[(0, math.pi)] * m + [(None, math.pi)], method="highs",
                  options={"maxiter": max_iter})
    if res.status == 1:
        raise OptimizationError("LP iteration cap reached")
    if res.status != 0 or -res.fun <= 1e-12:
        return None
    x = res.x[:m]
    # polish onto the constraint set
    x = x - np.linalg.lstsq(M, M @ x - d, rcond=None)[0]
    return AngleStructure(x)


def regular_structure(n: int) -> AngleStructure:
    return AngleStructure(np.full(3 * n, math.pi / 3))


def maximize_volume(tri: OrderedTriangulation, slice_theta: float | None = None, curve: str = "l",
                    start: AngleStructure | None = None, max_iter: int = 200, tol: float = 1e-8) -> VolumeReport:
    """Maximize the volume functional by Newton steps on the constraint subspace.

    Concavity of the functional on each tetrahedron's simplex makes the
    reduced Hessian negative definite, so the Newton direction is an ascent
    direction; steps are halved until they stay inside (0, pi) and satisfy
    the Armijo condition.
    """
    M, d = angle_constraints(tri, slice_theta, curve)
    x = (start or feasibility(tri, slice_theta, curve))
    if x is None:
        raise OptimizationError("no interior angle structure on this slice")
    x = x.angles.copy()
    Z = null_space(M)
    value = volume_functional(x)
    converged = False
    kkt = math.inf
    for _ in range(max_iter):
        g = -np.log(np.abs(2 * np.sin(x)))
        pg = Z.T @ g
        kkt = float(np.linalg.norm(pg))
        if kkt < tol:
            converged = True
            break
        H = Z.T @ (-(np.cos(x) / np.sin(x))[:, None] * Z)
        try:
            step = -Z @ np.linalg.solve(H, pg)
            if step @ g <= 0:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = Z @ pg
        t = 1.0
        while t > 1e-16:
            trial = x + t * step
            if np.all(trial > 0) and np.all(trial < math.pi):
                v = volume_functional(trial)
                if v >= value + 1e-4 * t * (g @ step) or t * np.max(np.abs(step)) < 1e-15:
                    break
            t *= 0.5
        else:
            break
        x = trial
        value = volume_functional(x)
    # final projection onto the constraint set
    x = x - np.linalg.lstsq(M, M @ x - d, rcond=None)[0]
    boundary = tuple(int(i) for i in np.flatnonzero(x < 1e-9))
    if boundary:
        converged = False
    return VolumeReport(AngleStructure(x), volume_functional(x), slice_theta, converged, kkt, boundary)
