"""Dilogarithm, Bloch-Wigner function and Faddeev's quantum dilogarithm."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels

__all__ = [
    "dilog",
    "dilog_array",
    "bloch_wigner",
    "QDilogParams",
    "PoleError",
    "log_phi_b",
    "phi_b",
    "phi_b_semiclassical_residual",
]

PI2_6 = math.pi ** 2 / 6


@lru_cache(maxsize=None)
def _bernoulli_coeffs(n: int = 40) -> np.ndarray:
    """B_k / (k+1)! for k < n, with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n):
        s = sum(math.comb(m + 1, k) * B[k] for k in range(m))
        B.append(-s / (m + 1))
    return np.array([float(B[k] / math.factorial(k + 1)) for k in range(n)])


def _dilog_core(z: np.ndarray) -> np.ndarray:
    """Bernoulli series in u = -Log(1 - z); needs |z| <= 1 and Re z <= 1/2."""
    u = -np.log1p(-z)
    c = _bernoulli_coeffs()
    acc = np.zeros_like(u)
    for k in range(c.size - 1, -1, -1):
        acc = acc * u + c[k]
    return acc * u


def dilog_array(z) -> np.ndarray:
    """Principal branch of Li2 on an array; points of [1, inf) except 1 raise."""
    z = np.asarray(z, dtype=np.complex128)
    flat = z.ravel()
    on_cut = (flat.imag == 0) & (flat.real > 1)
    if np.any(on_cut):
        raise ValueError("dilog: argument on the branch cut [1, inf)")
    out = np.empty_like(flat)
    one = flat == 1
    out[one] = PI2_6
    big = (np.abs(flat) > 1) & ~one
    w = np.where(big, 1.0 / np.where(big, flat, 1.0), flat)
    refl = (w.real > 0.5) & ~one
    inner = np.where(refl, 1.0 - w, w)
    inner = np.where(one, 0.0, inner)
    val = _dilog_core(inner)
    lw = np.log(np.where(refl, w, 1.0))
    l1w = np.log(np.where(refl, 1.0 - w, 1.0))
    val = np.where(refl, PI2_6 - lw * l1w - val, val)
    lmz = np.log(np.where(big, -flat, 1.0))
    val = np.where(big, -val - PI2_6 - 0.5 * lmz * lmz, val)
    out[~one] = val[~one]
    return out.reshape(z.shape)


def dilog(z: complex) -> complex:
    """Li2(z) = -int_0^z Log(1-u) du/u, principal branch."""
    return complex(dilog_array(np.array([z]))[0])


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|; zero on the real line."""
    z = complex(z)
    if z.imag == 0.0 or z == 0:
        return 0.0
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


# ---------------------------------------------------------------- Faddeev


class PoleError(ValueError):
    """Argument too close to a pole of the quantum dilogarithm."""


@dataclass(frozen=True)
class QDilogParams:
    b: float

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError("b must be a positive real number")

    @property
    def sqrt_hbar(self) -> float:
        return 1.0 / (self.b + 1.0 / self.b)

    @property
    def hbar(self) -> float:
        return self.sqrt_hbar ** 2

    @property
    def strip_halfwidth(self) -> float:
        return 0.5 * (self.b + 1.0 / self.b)


_GL_ORDER = 40
_SERIES_TERMS = 18
_MARGIN = 0.8
_FAR_EXPONENT = 45.0


@lru_cache(maxsize=4)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(start: float, stop: float, width: float) -> list[tuple[float, float]]:
    """Doubling panels from ``start`` until ``width``, then uniform ones."""
    out = []
    a = start
    while a < stop:
        step = min(max(a, start), width)
        b = min(a + step, stop)
        out.append((a, b))
        a = b
    return out


@lru_cache(maxsize=256)
def _nodes(b: float, ws: float, L: float, width: float):
    x, w = _gl(_GL_ORDER)
    pts, wts = [], []
    for lo, hi in _panels(ws, L, width):
        half = 0.5 * (hi - lo)
        pts.append(lo + half * (x + 1))
        wts.append(half * w)
    t = np.concatenate(pts)
    wt = np.concatenate(wts)
    q = wt / (2.0 * t * np.sinh(b * t) * np.sinh(t / b))
    return t, q


def _series_part(z: np.ndarray, b: float, ws: float) -> np.ndarray:
    """int_0^ws (z/w^2 - sin(2zw) / (2w sinh(bw) sinh(w/b))) dw by power series."""
    K = _SERIES_TERMS
    bp, bm = b + 1 / b, b - 1 / b
    p = np.array([(bp ** (2 * n + 2) - bm ** (2 * n + 2)) / (2 * math.factorial(2 * n + 2)) for n in range(K + 1)])
    two_z = 2 * z
    s = [((-1) ** n) * two_z ** (2 * n + 1) / (2 * math.factorial(2 * n + 1)) for n in range(K + 1)]
    m = [z * p[n + 1] - s[n + 1] for n in range(K)]
    g = []
    for k in range(K):
        acc = m[k]
        for j in range(1, k + 1):
            acc = acc - p[j] * g[k - j]
        g.append(acc / p[0])
    total = np.zeros_like(z)
    for k in range(K - 1, -1, -1):
        total = total * ws * ws + g[k] / (2 * k + 1)
    return total * ws


def _strip_keys(z: np.ndarray, b: float):
    """Quantized (L, width, ws) per point so that similar points share a node set."""
    beta = b + 1 / b
    ay = np.abs(z.imag)
    L = 40.0 / (beta - 2 * ay)
    ws = np.minimum(1.0 / beta, 0.5 / np.maximum(np.abs(z), 1e-300))
    freq = 2 * np.abs(z.real) + 2 * ay
    width = np.minimum(8.0 / beta, 12.0 / np.maximum(freq, 1e-300))
    return (np.ceil(np.log2(L)).astype(int), np.floor(np.log2(width)).astype(int),
            np.floor(np.log2(ws)).astype(int))


def _log_phi_strip(z: np.ndarray, b: float) -> np.ndarray:
    """Direct evaluation inside the strip; points are grouped by the node set they need."""
    out = np.empty(z.shape, dtype=np.complex128)
    if not z.size:
        return out
    kL, kw, ks = _strip_keys(z, b)
    keys = np.stack([kL, kw, ks], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    for g, (eL, ew, es) in enumerate(uniq):
        idx = np.flatnonzero(inverse.ravel() == g)
        zz = z[idx]
        ws = 2.0 ** es
        t, q = _nodes(b, ws, max(2.0 ** eL, 2 * ws), 2.0 ** ew)
        main = kernels.sin_sum(zz, t, q)
        integral = _series_part(zz, b, ws) + zz / ws - main
        out[idx] = integral
    return 1j * math.pi * z * z / 2 + 1j * math.pi * (b * b + 1 / (b * b)) / 24 + 1j * out


def _log1p_exp(x: np.ndarray) -> np.ndarray:
    """log(1 + e^x) for complex x without overflow (value mod 2 pi i)."""
    big = x.real > 0
    safe = np.where(big, -x, x)
    return np.where(big, x, 0) + np.log1p(np.exp(safe))


def _pole_distance(z: complex, b: float) -> float:
    """Distance to the nearest pole i(c_b + m b + n/b) or zero -i(...)."""
    cb = 0.5 * (b + 1 / b)
    y = abs(z.imag)
    if y < cb - 1e-8:
        return math.inf
    best = math.inf
    mmax = int((y - cb) / b) + 2
    nmax = int((y - cb) * b) + 2
    for m in range(mmax + 1):
        for n in range(nmax + 1):
            best = min(best, abs(complex(z.real, y) - 1j * (cb + m * b + n / b)))
    return best


def log_phi_b(z, b: float, max_shifts: int = 10_000) -> np.ndarray:
    """log Phi_b(z) (mod 2 pi i) for scalars or arrays.

    Points with |Im z| beyond 80% of the strip half-width are brought inside
    by the functional equation with shift min(b, 1/b).
    """
    QDilogParams(b)
    scalar = np.isscalar(z)
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).copy()
    shape = z.shape
    z = z.ravel()
    # far from the imaginary axis the corrections are O(exp(-2 pi min(b, 1/b) |Re z|))
    far = np.abs(z.real) * 2 * math.pi * min(b, 1 / b) > _FAR_EXPONENT
    if np.any(far):
        out = np.zeros(z.shape, dtype=np.complex128)
        right = far & (z.real > 0)
        out[right] = 1j * math.pi * z[right] ** 2 + 1j * math.pi * (b * b + 1 / (b * b)) / 12
        if not np.all(far):
            out[~far] = log_phi_b(z[~far], b, max_shifts)
        out = out.reshape(shape)
        return complex(out[0]) if scalar else out
    cb = 0.5 * (b + 1 / b)
    lim = _MARGIN * cb
    step = min(b, 1 / b)
    corr = np.zeros_like(z)
    outside = np.abs(z.imag) > lim
    if np.any(outside):
        for k in np.flatnonzero(outside):
            if _pole_distance(z[k], b) < 1e-8:
                raise PoleError(f"Phi_b argument {z[k]} is within 1e-8 of a pole or zero")
        count = 0
        while True:
            up = z.imag < -lim
            down = z.imag > lim
            if not (up.any() or down.any()):
                break
            count += 1
            if count > max_shifts:
                raise PoleError("too many functional-equation shifts")
            if up.any():
                w = z[up]
                corr[up] += _log1p_exp(2 * math.pi * step * w + 1j * math.pi * step * step)
                z[up] = w + 1j * step
            if down.any():
                w = z[down]
                corr[down] -= _log1p_exp(2 * math.pi * step * w - 1j * math.pi * step * step)
                z[down] = w - 1j * step
    out = _log_phi_strip(z, b) + corr
    out = out.reshape(shape)
    return complex(out[0]) if scalar else out


def phi_b(z, b: float):
    """Faddeev's quantum dilogarithm Phi_b(z)."""
    val = np.exp(log_phi_b(z, b))
    return complex(val) if np.isscalar(z) else val


def phi_b_semiclassical_residual(z: complex, b: float) -> float:
    """|Phi_b(z / 2 pi b) exp(i Li2(-e^z) / 2 pi b^2) - 1|."""
    lp = log_phi_b(complex(z) / (2 * math.pi * b), b)
    s = lp + 1j * dilog(-cmath.exp(z)) / (2 * math.pi * b * b)
    s = complex(s.real, (s.imag + math.pi) % (2 * math.pi) - math.pi)
    return abs(cmath.exp(s) - 1) if abs(s) > 1e-3 else abs(np.expm1(s))
