"""Strong combinatorial flattenings and the 1-loop invariant."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import sympy as sp
from sympy import ZZ
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.matrices import DomainMatrix

from .geometry import ShapeSolution
from .nz_gluing import CONVENTIONS, NZSystem, nz_system
from .triangulation import OrderedTriangulation, shape_symbol

__all__ = [
    "FlatteningError",
    "Flattening",
    "OneLoopValue",
    "flattening_system",
    "flattening_residual",
    "strong_flattening",
    "normalize_sign",
    "one_loop_tau",
    "one_loop",
    "hessian_torsion_sides",
]


class FlatteningError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Flattening:
    f: tuple[int, ...]
    fp: tuple[int, ...]
    fpp: tuple[int, ...]
    strong: bool
    curves: tuple[str, ...] = ()

    def as_array(self) -> np.ndarray:
        return np.array([self.f, self.fp, self.fpp], dtype=np.int64)


@dataclass(frozen=True)
class OneLoopValue:
    tau: complex
    convention: str
    determinant: complex

    @property
    def modulus(self) -> float:
        return abs(self.tau)


def _incidence_rows(tri: OrderedTriangulation, curves):
    """Rows (G, G', G'') over every edge class followed by the curves, and their targets."""
    n = tri.N
    rows, rhs, names = [], [], []
    for ec in tri.edge_classes:
        r = np.zeros((3, n), dtype=np.int64)
        for t, pair in ec.slots:
            r[shape_symbol(tri.signs[t], pair), t] += 1
        rows.append(r)
        rhs.append(2)
        names.append(ec.name)
    for c in curves:
        rows.append(np.array(c.rows(), dtype=np.int64))
        # the curve's nu carries the holonomy constant, so the flattened sum equals it
        rhs.append(c.nu)
        names.append(c.name)
    return rows, rhs, names


def flattening_system(tri: OrderedTriangulation, curves=None):
    """Integer system ``M (f, f'') = r`` left after substituting f' = 1 - f - f''."""
    curves = [tri.curve(c) if isinstance(c, str) else c for c in (curves if curves is not None else tri.curves)]
    rows, rhs, names = _incidence_rows(tri, curves)
    M = np.array([np.concatenate([G - Gp, Gpp - Gp]) for G, Gp, Gpp in rows], dtype=np.int64)
    r = np.array([t - int(Gp.sum()) for (_, Gp, _), t in zip(rows, rhs)], dtype=np.int64)
    return M, r, names, curves


def flattening_residual(tri: OrderedTriangulation, flat: Flattening, curves=None) -> np.ndarray:
    """Exact integer defects of all flattening conditions (zero when valid)."""
    curves = [tri.curve(c) if isinstance(c, str) else c for c in (curves if curves is not None else tri.curves)]
    rows, rhs, _ = _incidence_rows(tri, curves)
    f, fp, fpp = (np.array(v, dtype=np.int64) for v in (flat.f, flat.fp, flat.fpp))
    sums = f + fp + fpp - 1
    lin = np.array([G @ f + Gp @ fp + Gpp @ fpp - t for (G, Gp, Gpp), t in zip(rows, rhs)], dtype=np.int64)
    return np.concatenate([sums, lin])


def _babai(x0: sp.Matrix, basis: list[sp.Matrix]) -> sp.Matrix:
    """Nearest-plane rounding of -x0 onto the lattice, basis already LLL-reduced."""
    if not basis:
        return x0
    B = sp.Matrix.hstack(*basis)
    gs = []
    for k in range(B.cols):
        v = B[:, k]
        for g in gs:
            v = v - (v.dot(g) / g.dot(g)) * g
        gs.append(v)
    x = x0
    for k in reversed(range(B.cols)):
        c = sp.floor(x.dot(gs[k]) / gs[k].dot(gs[k]) + sp.Rational(1, 2))
        x = x - c * B[:, k]
    return x


def strong_flattening(tri: OrderedTriangulation, curves=None) -> Flattening:
    """Smallest-norm integer flattening valid for all edges and the given curves.

    A particular solution comes from the Smith decomposition ``S = U M V``; the
    kernel lattice is LLL-reduced and Babai rounding shortens the result.
    """
    M, r, _, curves = flattening_system(tri, curves)
    Ms, rs = sp.Matrix(M.tolist()), sp.Matrix(r.tolist())
    S, U, V = smith_normal_decomp(Ms, domain=ZZ)
    Ur = U * rs
    rank = sum(1 for i in range(min(S.shape)) if S[i, i] != 0)
    w = sp.zeros(S.cols, 1)
    for i in range(S.rows):
        d = S[i, i] if i < min(S.shape) else 0
        if i < rank:
            if Ur[i] % d != 0:
                raise FlatteningError("no integer flattening exists for this data")
            w[i] = Ur[i] // d
        elif Ur[i] != 0:
            raise FlatteningError("flattening conditions are inconsistent")
    x0 = V * w
    kernel = [V[:, j] for j in range(rank, V.cols)]
    if kernel:
        red = DomainMatrix.from_Matrix(sp.Matrix.hstack(*kernel).T).convert_to(ZZ).lll().to_Matrix()
        kernel = [red[i, :].T for i in range(red.rows) if any(red[i, :])]
    x = _babai(x0, kernel)
    n = tri.N
    f = tuple(int(v) for v in x[:n])
    fpp = tuple(int(v) for v in x[n:])
    fp = tuple(1 - a - c for a, c in zip(f, fpp))
    flat = Flattening(f, fp, fpp, strong=True, curves=tuple(c.name for c in curves))
    if np.any(flattening_residual(tri, flat, curves)):
        raise FlatteningError("internal error: flattening does not satisfy its equations")
    return flat


def normalize_sign(w: complex) -> complex:
    """Representative of w in C/{+1,-1} with argument in [0, pi)."""
    w = complex(w)
    if w == 0:
        return 0j
    ang = cmath.phase(w)
    return -w if (ang < 0 or ang >= math.pi) else w


def one_loop_tau(nz: NZSystem, sol: ShapeSolution, flat: Flattening, residual_tol: float = 1e-10) -> OneLoopValue:
    """``1/2 det(A diag(z'') + B diag(z)^{-1}) prod z^{f''} z''^{-f}`` up to sign."""
    if sol.residual > residual_tol:
        raise ValueError(f"shape solution residual {sol.residual:.3e} exceeds {residual_tol:g}")
    z = sol.z
    if np.any(z == 0) or np.any(z == 1):
        raise ValueError("degenerate shape (0 or 1)")
    zpp = sol.zpp
    M = nz.float_A() * zpp[None, :] + nz.float_B() / z[None, :]
    det = complex(np.linalg.det(M))
    f = np.array(flat.f)
    fpp = np.array(flat.fpp)
    # integer powers, so no branch choice enters
    factor = complex(np.prod(z.astype(complex) ** fpp * zpp.astype(complex) ** (-f)))
    return OneLoopValue(normalize_sign(0.5 * det * factor), nz.convention, det)


def one_loop(tri: OrderedTriangulation, u: complex = 0.0, curve: str = "l", drop_edge=None,
             sol: ShapeSolution | None = None) -> dict[str, OneLoopValue]:
    """tau under every elimination convention at the solution with holonomy target u."""
    from .geometry import continue_solution, solve_gluing

    flat = strong_flattening(tri)
    out = {}
    base = nz_system(tri, curve, drop_edge, CONVENTIONS[0])
    if sol is None:
        sol = solve_gluing(base, 0.0, signs=tri.signs)
        if u != 0:
            sol = continue_solution(base, u, sol, steps=max(1, int(abs(u) / 0.05) + 1))
    for conv in CONVENTIONS:
        out[conv] = one_loop_tau(nz_system(tri, curve, drop_edge, conv), sol, flat)
    return out


def hessian_torsion_sides(nz: NZSystem, hessian: np.ndarray, sol: ShapeSolution, flat: Flattening):
    """Both sides of ``det Hess S = +-2 i^N det(B^{-1}) prod(z^{-f''} z''^{f-1}) tau``."""
    tau = one_loop_tau(nz, sol, flat).tau
    n = nz.N
    detBinv = complex(float(sp.Rational(1, 1) / nz.detB))
    f = np.array(flat.f)
    fpp = np.array(flat.fpp)
    prod = complex(np.prod(sol.z.astype(complex) ** (-fpp) * sol.zpp.astype(complex) ** (f - 1)))
    lhs = complex(np.linalg.det(hessian))
    rhs = 2 * (1j ** n) * detBinv * prod * tau
    return lhs, rhs
