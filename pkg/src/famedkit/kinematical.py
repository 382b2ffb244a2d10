"""Exact face-adjacency matrices R, A, B and the derived Q and script-G."""
from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .triangulation import OrderedTriangulation

__all__ = [
    "SingularA",
    "KinematicalMatrices",
    "build_RAB",
    "compute_Q",
    "compute_scriptG",
    "kinematical_matrices",
    "to_rows",
]


class SingularA(ArithmeticError):
    """The face matrix A is not invertible."""


@dataclass(frozen=True)
class KinematicalMatrices:
    R: sp.Matrix
    A: sp.Matrix
    B: sp.Matrix
    detA: sp.Rational
    Q: sp.Matrix | None
    scriptG: sp.Matrix | None
    signs: tuple[int, ...]


def build_RAB(tri: OrderedTriangulation) -> tuple[sp.Matrix, sp.Matrix, sp.Matrix]:
    """Face-variable matrices; columns follow ``tri.faces``.

    Row j of A holds x0 - x1 + x2 of tetrahedron j, row N + j holds x2 - x3,
    and B puts the t_j contribution into row N + j.
    """
    n = tri.N
    x = tri.face_index
    R = sp.zeros(n, 2 * n)
    A = sp.zeros(2 * n, 2 * n)
    B = sp.zeros(2 * n, n)
    for j, tet in enumerate(tri.tetrahedra):
        R[j, x[(j, 0)]] += tet.sign
        A[j, x[(j, 0)]] += 1
        A[j, x[(j, 1)]] -= 1
        A[j, x[(j, 2)]] += 1
        A[n + j, x[(j, 2)]] += 1
        A[n + j, x[(j, 3)]] -= 1
        B[n + j, j] = 1
    return R, A, B


def compute_Q(R: sp.Matrix, A: sp.Matrix, B: sp.Matrix) -> sp.Matrix:
    if A.det() == 0:
        raise SingularA("det A = 0")
    M = R * A.inv() * B
    return -(M + M.T) / 2


def compute_scriptG(Q: sp.Matrix, signs) -> sp.Matrix:
    E = sp.diag(*signs)
    P = sp.diag(*[max(s, 0) for s in signs])
    return -2 * E * Q * E + P


def kinematical_matrices(tri: OrderedTriangulation) -> KinematicalMatrices:
    R, A, B = build_RAB(tri)
    det = A.det()
    if det == 0:
        return KinematicalMatrices(R, A, B, sp.Integer(0), None, None, tri.signs)
    Q = compute_Q(R, A, B)
    return KinematicalMatrices(R, A, B, det, Q, compute_scriptG(Q, tri.signs), tri.signs)


def to_rows(M: sp.Matrix | None) -> list[list[str]] | None:
    """Rational matrix as nested lists of strings (``"-3/2"``)."""
    if M is None:
        return None
    return [[str(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]
