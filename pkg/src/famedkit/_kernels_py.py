"""Pure numpy versions of the numerical kernels.

These are the reference implementations; ``_kernels`` (Cython) must agree
with them to rounding error.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 21


def sin_sum(z: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``out[m] = sum_j weights[j] * sin(2 z[m] nodes[j])``."""
    z = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    out = np.empty(z.size, dtype=np.complex128)
    step = max(1, _CHUNK // max(1, nodes.size))
    for s in range(0, z.size, step):
        block = z[s:s + step]
        out[s:s + step] = np.sin(2.0 * np.outer(block, nodes)) @ weights
    return out


def coupled_sum2(f1: np.ndarray, y1: np.ndarray, f2: np.ndarray, y2: np.ndarray, c: complex) -> complex:
    """``sum_{j,k} f1[j] f2[k] exp(c y1[j] y2[k])``."""
    if c == 0:
        return complex(f1.sum() * f2.sum())
    total = 0j
    step = max(1, _CHUNK // max(1, y2.size))
    for s in range(0, y1.size, step):
        E = np.exp(c * np.outer(y1[s:s + step], y2))
        total += f1[s:s + step] @ (E @ f2)
    return complex(total)


def coupled_sum3(f1, y1, f2, y2, f3, y3, c12: complex, c13: complex, c23: complex) -> complex:
    """``sum f1 f2 f3 exp(c12 y1 y2 + c13 y1 y3 + c23 y2 y3)`` over the grid."""
    E23 = np.exp(c23 * np.outer(y2, y3)) * f2[:, None] * f3[None, :]
    total = 0j
    for j in range(y1.size):
        a = np.exp(c12 * y1[j] * y2)
        b = np.exp(c13 * y1[j] * y3)
        total += f1[j] * (a @ E23 @ b)
    return complex(total)
