"""Partition function modulus, Jones function and their asymptotics."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .angle_structures import AngleStructure, angular_holonomy, maximize_volume
from .geometry import ShapeSolution, complex_holonomy, continue_solution, hyperbolic_volume, solve_gluing
from .kinematical import KinematicalMatrices, kinematical_matrices
from .nz_gluing import NZSystem, nz_system
from .one_loop import one_loop_tau, strong_flattening
from .special_functions import log_phi_b
from .triangulation import OrderedTriangulation

__all__ = [
    "QuadratureError",
    "FitError",
    "ContourSpec",
    "PartitionValue",
    "AsymptoticReport",
    "APolynomial",
    "contour_shifts",
    "partition_weights",
    "partition_log_modulus",
    "partition_modulus",
    "predicted_modulus",
    "jones_coefficients",
    "jones_function",
    "jones_windows",
    "jones_reconstruction",
    "fit_asymptotics",
    "parse_apolynomial",
    "aj_evaluate",
    "DEFAULT_SWEEP",
]

DEFAULT_SWEEP = (1.0, 0.8, 0.6, 0.5, 0.45, 0.4)
_MAX_N = 3


class QuadratureError(RuntimeError):
    pass


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class ContourSpec:
    """Tensor Gauss-Legendre rule on truncated, slightly rotated lines.

    Axis k passes through i d_k.  ``shift`` overrides d (default: Gamma(alpha)
    scaled by 1 + b^2, where the integrand modulus separates) and ``delta`` is
    added to every d_k.  Each half-line is turned by ``rotation`` radians in
    the direction that makes the quadratic part of the exponent decay; the
    poles of Phi_b sit on the imaginary axis, so the turn crosses none.
    Windows keep the region where the modulus is within ``exp(-cutoff)`` of
    its maximum, split into panels of ``panel_order`` nodes.
    """

    nodes: int = 200
    shift: tuple[float, ...] | None = None
    delta: float = 0.0
    rotation: float = 0.3
    panel_order: int = 20
    cutoff: float = 46.0


@dataclass(frozen=True)
class PartitionValue:
    log_modulus: float
    b: float
    windows: tuple[tuple[float, float], ...]
    shifts: tuple[float, ...]

    @property
    def modulus(self) -> float:
        return math.exp(self.log_modulus)


@dataclass(frozen=True)
class AsymptoticReport:
    samples: tuple[tuple[float, float], ...]
    fitted_rate: float
    predicted_rate: float | None
    fitted_prefactor: float
    predicted_prefactor: float | None
    power: float = 0.0
    coefficients: tuple[float, ...] = field(default=())

    @property
    def rate_error(self) -> float | None:
        return None if self.predicted_rate is None else abs(self.fitted_rate - self.predicted_rate)

    @property
    def prefactor_error(self) -> float | None:
        if self.predicted_prefactor is None:
            return None
        return abs(self.fitted_prefactor / self.predicted_prefactor - 1)


# ---------------------------------------------------------------- helpers


def _gl_rule(lo: float, hi: float, nodes: int, order: int):
    panels = max(1, int(math.ceil(nodes / order)))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def _adaptive_rule(logf, lo: float, hi: float, quad: "ContourSpec", corner: float | None = None):
    """Gauss-Legendre panels on [lo, hi], refined so no panel spans more than ~8 rad of phase.

    A ``corner`` of the contour inside the window becomes a panel boundary.
    """
    t = np.linspace(lo, hi, 601)
    phase = np.unwrap(np.imag(logf(t)))
    var = float(np.sum(np.abs(np.diff(phase))))
    nodes = max(quad.nodes, int(math.ceil(var / 8.0)) * quad.panel_order)
    if corner is None or not lo < corner < hi:
        return _gl_rule(lo, hi, nodes, quad.panel_order)
    left = max(1, round(nodes * (corner - lo) / (hi - lo)))
    a = _gl_rule(lo, corner, left, quad.panel_order)
    b = _gl_rule(corner, hi, max(1, nodes - left), quad.panel_order)
    return np.concatenate([a[0], b[0]]), np.concatenate([a[1], b[1]])


def _window(logmod, cutoff: float, start: float = 8.0, limit: float = 1e4) -> tuple[float, float]:
    """Interval outside which ``logmod`` (vectorized, real) is below max - cutoff."""
    R = start
    while True:
        x = np.linspace(-R, R, 241)
        g = logmod(x)
        g = np.where(np.isfinite(g), g, -np.inf)
        top = float(np.max(g))
        keep = np.flatnonzero(g > top - cutoff)
        if keep.size and 0 < keep[0] and keep[-1] < x.size - 1:
            h = x[1] - x[0]
            return float(x[keep[0]] - h), float(x[keep[-1]] + h)
        R *= 2
        if R > limit:
            raise QuadratureError("integrand does not decay: angles too close to 0 or pi?")


def _ray_angles(Q, s, v, rotation: float) -> tuple[float, float]:
    """Turning angles for the half-lines t < 0 and t > 0 along direction v.

    Phi_b(y / 2 pi b) grows like exp(i y^2 / 4 pi b^2) when Re y -> +oo and
    tends to 1 when Re y -> -oo, so the quadratic coefficient on each side is
    v^T Q v plus s_j v_j^2 / 2 for the coordinates heading to +oo.
    """
    base = float(v @ Q @ v)
    out = []
    for side in (-1.0, 1.0):
        q = base + float(np.sum(0.5 * s * v * v * (side * v > 0)))
        out.append(0.0 if abs(q) < 1e-12 else math.copysign(rotation, q))
    return out[0], out[1]


class _Ray:
    """Line bent at c: t -> c + (t - c) e^{i theta_-} for t < c, e^{i theta_+} after."""

    def __init__(self, minus: float, plus: float, center: float = 0.0):
        self.em = cmath.exp(1j * minus)
        self.ep = cmath.exp(1j * plus)
        self.c = center

    def __call__(self, t):
        t = np.asarray(t, dtype=float) - self.c
        return self.c + np.where(t < 0, t * self.em, t * self.ep)

    def jacobian(self, t):
        return np.where(np.asarray(t) < self.c, self.em, self.ep)


def contour_shifts(tri: OrderedTriangulation, alpha: AngleStructure) -> np.ndarray:
    """d_k = -(pi - a_k) on positive and +(pi - a_k) on negative tetrahedra."""
    eps = np.asarray(tri.signs, dtype=float)
    return eps * (alpha.a - math.pi)


def _shifts(tri, alpha, b, quad) -> np.ndarray:
    if quad.shift is not None:
        d = np.array(quad.shift, dtype=float)
    else:
        d = contour_shifts(tri, alpha) * (1 + b * b)
    return d + quad.delta


def partition_weights(tri: OrderedTriangulation, alpha: AngleStructure, km: KinematicalMatrices | None = None) -> np.ndarray:
    """W = 2 Q Gamma + C built from the angles."""
    km = km or kinematical_matrices(tri)
    Q = np.array(km.Q.tolist(), dtype=float)
    gamma = contour_shifts(tri, alpha)
    return 2 * Q @ gamma + alpha.c


def _check_size(tri: OrderedTriangulation):
    if tri.N > _MAX_N:
        raise QuadratureError(f"tensor quadrature supports N <= {_MAX_N}, got N = {tri.N}")


def _phi_signs(tri) -> np.ndarray:
    # Phi_b in the numerator for negative, denominator for positive tetrahedra
    return -np.asarray(tri.signs, dtype=float)


# ---------------------------------------------------------------- partition


def partition_log_modulus(tri: OrderedTriangulation, alpha: AngleStructure, b: float,
                          quad: ContourSpec = ContourSpec(), km: KinematicalMatrices | None = None) -> PartitionValue:
    """log |Z_hbar(X, alpha)| from the contour integral over Y_alpha."""
    _check_size(tri)
    km = km or kinematical_matrices(tri)
    if km.detA == 0:
        raise QuadratureError("det A = 0")
    n = tri.N
    Q = np.array(km.Q.tolist(), dtype=float)
    W = partition_weights(tri, alpha, km)
    d = _shifts(tri, alpha, b, quad)
    if np.any(np.abs(d) >= math.pi * (1 + b * b)):
        raise QuadratureError("contour shift leaves the analyticity band of Phi_b")
    s = _phi_signs(tri)
    k2 = 1.0 / (2 * math.pi * b * b)
    lin = 1.0 / (2 * math.pi) + k2
    # y = i d + u; the pair term i kappa y_j y_k splits into i kappa u_j u_k (kernel),
    # -kappa d_j u_k - kappa d_k u_j (axes) and a unit-modulus constant
    kappa = 2 * Q * k2

    def axis_log(k, u):
        y = 1j * d[k] + u
        val = W[k] * y * lin + 1j * Q[k, k] * y * y * k2 + s[k] * log_phi_b(y / (2 * math.pi * b), b)
        for j in range(n):
            if j != k:
                val = val - kappa[j, k] * d[j] * u
        return val

    windows, axes = [], []
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        flat = np.real(axis_log(k, np.linspace(-60, 60, 481) + 0j))
        ray = _tame_ray(lambda u, k=k: axis_log(k, u), _ray_angles(Q, s, v, quad.rotation), 0.0,
                        float(np.max(flat[np.isfinite(flat)])))
        lo, hi = _window(lambda t, k=k, ray=ray: np.real(axis_log(k, ray(t))), quad.cutoff)
        t, w = _adaptive_rule(lambda t, k=k, ray=ray: axis_log(k, ray(t)), lo, hi, quad, ray.c)
        u = ray(t)
        lv = axis_log(k, u)
        m = float(np.max(lv.real))
        axes.append((u, w * ray.jacobian(t) * np.exp(lv - m), m))
        windows.append((lo, hi))
    shift = sum(a[2] for a in axes)
    if n == 1:
        total = complex(np.sum(axes[0][1]))
    elif n == 2:
        total = kernels.coupled_sum2(axes[0][1], axes[0][0], axes[1][1], axes[1][0], 1j * kappa[0, 1])
    else:
        total = kernels.coupled_sum3(axes[0][1], axes[0][0], axes[1][1], axes[1][0], axes[2][1], axes[2][0],
                                     1j * kappa[0, 1], 1j * kappa[0, 2], 1j * kappa[1, 2])
    if not cmath.isfinite(total):
        raise QuadratureError("coupled sum overflowed; try rotation=0")
    if total == 0:
        raise QuadratureError("integral vanished numerically")
    logmod = (math.log(abs(total)) + shift
              - math.log(abs(float(km.detA))) - n * math.log(2 * math.pi * b))
    return PartitionValue(logmod, b, tuple(windows), tuple(float(v) for v in d))


def partition_modulus(tri: OrderedTriangulation, alpha: AngleStructure, b: float,
                      quad: ContourSpec = ContourSpec()) -> float:
    return partition_log_modulus(tri, alpha, b, quad).modulus


# ---------------------------------------------------------------- prediction


@dataclass(frozen=True)
class Prediction:
    prefactor: float
    volume: float
    tau: complex
    Hm: complex
    Hl: complex
    solution: ShapeSolution

    def modulus(self, b: float) -> float:
        return self.prefactor * math.exp(-self.volume / (2 * math.pi * b * b))


def predicted_modulus(tri: OrderedTriangulation, alpha: AngleStructure | None = None, lam: float | None = None) -> Prediction:
    """Leading term ``|e^{H(m)H(l)/4 pi i} / (det A sqrt(2 det B^-1) sqrt(tau))| e^{-Vol/2 pi b^2}``."""
    if not tri.has_curve("m"):
        raise ValueError("predicted modulus needs the meridian curve 'm'")
    if lam is None:
        lam = angular_holonomy(tri, alpha, "l") if alpha is not None else 0.0
    nz = nz_system(tri, "l")
    km = kinematical_matrices(tri)
    sol = solve_gluing(nz, 0.0, signs=tri.signs)
    if lam != 0:
        sol = continue_solution(nz, 1j * lam, sol, steps=max(1, int(abs(lam) / 0.05) + 1))
    tau = one_loop_tau(nz, sol, strong_flattening(tri)).tau
    Hm = complex_holonomy(tri.curve("m"), sol)
    Hl = complex_holonomy(tri.curve("l"), sol)
    detBinv = 1.0 / float(nz.detB)
    pref = abs(cmath.exp(Hm * Hl / (4j * math.pi))) / (abs(float(km.detA)) * math.sqrt(abs(2 * detBinv * tau)))
    return Prediction(pref, hyperbolic_volume(sol), tau, Hm, Hl, sol)


# ---------------------------------------------------------------- Jones


def jones_coefficients(nz: NZSystem, signs) -> np.ndarray:
    """a_k with x = sum a_k y_k: twice the last entry of (B^-1)^T (-y_+, y_-)."""
    col = np.array([float(v) for v in nz.Binv[:, nz.N - 1]])
    return 2 * col * (-np.asarray(signs, dtype=float))


def _jones_setup(tri, km, nz):
    Q = np.array(km.Q.tolist(), dtype=float)
    Binv = np.array(nz.Binv.tolist(), dtype=float)
    G = np.array(km.scriptG.tolist(), dtype=float)
    w0 = Binv @ nz.nu_vector() - G @ np.full(tri.N, math.pi)
    a = jones_coefficients(nz, tri.signs)
    nonzero = np.flatnonzero(np.abs(a) > 1e-12)
    if nonzero.size == 0:
        raise QuadratureError("x does not depend on y: no pivot variable")
    return Q, w0, a, int(nonzero[0])


def _log_F0(Y, Q, w0, sigma, s, b):
    """log of the alpha-independent integrand at points Y (shape (..., N))."""
    k2 = 1.0 / (2 * math.pi * b * b)
    lin = 1.0 / (2 * math.pi) + k2
    val = ((sigma * Y) @ w0) * lin + 1j * np.einsum("...i,ij,...j->...", Y, Q, Y) * k2
    for k in range(Y.shape[-1]):
        val = val + s[k] * log_phi_b(Y[..., k] / (2 * math.pi * b), b)
    return val


def _strip_ok(y, sign) -> bool:
    im = np.imag(y)
    return bool(np.all((im > -math.pi) & (im < 0)) if sign > 0 else np.all((im > 0) & (im < math.pi)))


@dataclass
class _JonesSetup:
    Q: np.ndarray
    w0: np.ndarray
    sigma: np.ndarray
    s: np.ndarray
    base: np.ndarray
    dirs: list
    rays: list
    pref: float
    b: float

    def points(self, us):
        Y = np.broadcast_to(self.base, us[0].shape + self.base.shape).copy()
        for v, u in zip(self.dirs, us):
            Y = Y + u[..., None] * v
        return Y

    def log_f(self, us):
        return _log_F0(self.points(us), self.Q, self.w0, self.sigma, self.s, self.b)

    def windows(self, cutoff: float):
        out = []
        for idx, ray in enumerate(self.rays):
            def logmod(t, idx=idx, ray=ray):
                return np.real(self.log_f(_one_axis(ray(t), idx, len(self.rays))))
            out.append(_window(logmod, cutoff))
        return out


def _one_axis(u, idx: int, count: int):
    us = [np.zeros(np.shape(u), dtype=complex) for _ in range(count)]
    us[idx] = u
    return us


def _tame_ray(logf, angles, center: float, peak: float, slack: float = 2.0, span: float = 60.0) -> "_Ray":
    """Halve the turn until the modulus on the bent line stays near ``peak``.

    A large turn can pass over a hill of the integrand; the integral is
    unchanged but cancellation then eats the digits.
    """
    t = center + np.linspace(-span, span, 481)
    minus, plus = angles
    for _ in range(12):
        ray = _Ray(minus, plus, center)
        g = np.real(logf(ray(t)))
        if np.all(np.isfinite(g)) and float(np.max(g)) <= peak + slack:
            return ray
        minus, plus = 0.5 * minus, 0.5 * plus
    return _Ray(0.0, 0.0, center)


def _jones_prepare(tri, x, b, quad, alpha) -> _JonesSetup:
    _check_size(tri)
    km = kinematical_matrices(tri)
    nz = nz_system(tri, "l")
    Q, w0, a, p = _jones_setup(tri, km, nz)
    n = tri.N
    alpha = alpha or maximize_volume(tri).maximizer
    d = _shifts(tri, alpha, b, quad)
    s = _phi_signs(tri)
    free = [k for k in range(n) if k != p]
    base = 1j * d.astype(complex)
    base[p] = (complex(x) - sum(a[k] * base[k] for k in free)) / a[p]
    if not _strip_ok(base[p] / (1 + b * b), tri.signs[p]):
        raise QuadratureError("pivot variable leaves its strip for this x")
    dirs = []
    for k in free:
        v = np.zeros(n)
        v[k] = 1.0
        v[p] = -a[k] / a[p]
        dirs.append(v)
    js = _JonesSetup(Q, w0, -np.asarray(tri.signs, dtype=float), s, base, dirs, [], 0.0, b)
    # bend each free line at the peak of the modulus on the unturned contour;
    # the turn must not sweep any coordinate across a pole of Phi_b
    if quad.rotation == 0:
        js.rays = [_Ray(0.0, 0.0) for _ in dirs]
        js.pref = -math.log(abs(a[p])) - math.log(abs(float(km.detA)))
        return js
    centers, peaks = [], []
    t = np.linspace(-60, 60, 481)
    for idx in range(len(dirs)):
        g = np.real(js.log_f(_one_axis(t + 0j, idx, len(dirs))))
        g = np.where(np.isfinite(g), g, -np.inf)
        centers.append(float(t[int(np.argmax(g))]))
        peaks.append(float(np.max(g)))
    bend = base + sum(c * v for c, v in zip(centers, dirs))
    band = math.pi * (1 + b * b) - 0.25
    moved = np.any(np.array(dirs) != 0, axis=0)
    room = [math.atan2(band - abs(bend[j].imag), abs(bend[j].real)) for j in range(n) if moved[j]]
    turn = max(0.0, min([quad.rotation] + room))
    for idx, (v, c) in enumerate(zip(dirs, centers)):
        js.rays.append(_tame_ray(lambda u, idx=idx: js.log_f(_one_axis(u, idx, len(dirs))),
                                 _ray_angles(Q, s, v, turn), c, peaks[idx]))
    js.pref = -math.log(abs(a[p])) - math.log(abs(float(km.detA)))
    return js


def jones_windows(tri: OrderedTriangulation, x: complex, b: float, quad: ContourSpec = ContourSpec(),
                  alpha: AngleStructure | None = None):
    """Truncation windows of the free axes that ``jones_function`` picks at x."""
    return _jones_prepare(tri, x, b, quad, alpha).windows(quad.cutoff)


def jones_function(tri: OrderedTriangulation, x: complex, b: float, quad: ContourSpec = ContourSpec(),
                   alpha: AngleStructure | None = None, log: bool = False, windows=None):
    """Jones function at x; ``log=True`` returns its logarithm.

    The free variables run over rotated lines through i d_k (see
    ``ContourSpec``) and the pivot is solved from x.  Normalized so that
    ``|Z| (2 pi b)^N = |int J(x) e^{x lam (1/4pi + 1/4pi b^2)} dx|``.
    ``windows`` fixes the truncation of the free axes instead of scanning.
    """
    js = _jones_prepare(tri, x, b, quad, alpha)
    if not js.rays:
        out = complex(_log_F0(js.base[None, :], js.Q, js.w0, js.sigma, js.s, b)[0] + js.pref)
        return out if log else cmath.exp(out)
    windows = windows if windows is not None else js.windows(quad.cutoff)
    rules = []
    for idx, (ray, (lo, hi)) in enumerate(zip(js.rays, windows)):
        t, w = _adaptive_rule(lambda t, idx=idx, ray=ray: js.log_f(_one_axis(ray(t), idx, len(js.rays))),
                              lo, hi, quad, ray.c)
        rules.append((ray(t), w * ray.jacobian(t)))
    us = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wts = rules[0][1]
    for r in rules[1:]:
        wts = np.multiply.outer(wts, r[1])
    lv = js.log_f(us)
    m = float(np.max(lv.real))
    total = complex(np.sum(wts * np.exp(lv - m)))
    if total == 0 or not cmath.isfinite(total):
        raise QuadratureError("Jones integral vanished or overflowed")
    out = cmath.log(total) + m + js.pref
    return out if log else cmath.exp(out)


def jones_reconstruction(tri: OrderedTriangulation, b: float, alpha: AngleStructure | None = None,
                         quad: ContourSpec = ContourSpec(), x_nodes: int = 240, x_rotation: float = 0.0) -> float:
    """log |int J(x) e^{x lam (1/4pi + 1/4pi b^2)} dx| - N log(2 pi b), to compare with log|Z|.

    The x line passes through i sum a_k d_k; ``x_rotation`` turns it about
    that point.
    """
    alpha = alpha or maximize_volume(tri).maximizer
    # straight lines let one set of windows serve every x
    quad = replace(quad, rotation=0.0)
    lam = angular_holonomy(tri, alpha, "l")
    nz = nz_system(tri, "l")
    a = jones_coefficients(nz, tri.signs)
    mu = 1j * float(np.sum(a * _shifts(tri, alpha, b, quad)))
    c = lam * (1 / (4 * math.pi) + 1 / (4 * math.pi * b * b))
    ray = _Ray(x_rotation, x_rotation)

    # the coarse x scan reuses the windows at the centre, widened
    win = [(lo - 0.5 * (hi - lo), hi + 0.5 * (hi - lo)) for lo, hi in jones_windows(tri, mu, b, quad, alpha)]

    def logI(t):
        xs = mu + ray(np.atleast_1d(t))
        return np.array([jones_function(tri, x, b, quad, alpha, log=True, windows=win) for x in xs]) + c * xs

    lo, hi = _window_coarse(lambda t: logI(t).real, quad.cutoff)
    # one set of windows for the whole x range: the union over its ends and centre
    ends = [jones_windows(tri, mu + ray(np.array(v)), b, quad, alpha) for v in (lo, 0.5 * (lo + hi), hi)]
    win = [(min(e[k][0] for e in ends), max(e[k][1] for e in ends)) for k in range(len(ends[0]))]
    ts, ws = _gl_rule(lo, hi, x_nodes, quad.panel_order)
    lv = logI(ts)
    m = float(np.max(lv.real))
    total = np.sum(ws * ray.jacobian(ts) * np.exp(lv - m))
    return math.log(abs(total)) + m - tri.N * math.log(2 * math.pi * b)


def _window_coarse(logmod, cutoff: float) -> tuple[float, float]:
    """Like _window but with few samples, for expensive integrands."""
    R = 4.0
    while R < 1e3:
        x = np.linspace(-R, R, 41)
        g = logmod(x)
        top = float(np.max(g))
        keep = np.flatnonzero(g > top - cutoff)
        if keep.size and 0 < keep[0] and keep[-1] < x.size - 1:
            h = x[1] - x[0]
            return float(x[keep[0]] - h), float(x[keep[-1]] + h)
        R *= 2
    raise QuadratureError("Jones function does not decay along the x line")


# ---------------------------------------------------------------- fitting


def fit_asymptotics(samples, predicted_rate: float | None = None, predicted_prefactor: float | None = None,
                    power: float = 0.0, order: int = 2) -> AsymptoticReport:
    """Least-squares fit of ``log v - power log b = -R/(2 pi b^2) + p0 + p1 b^2 + ... + p_order b^(2 order)``.

    ``fitted_rate`` is -R, the extrapolated limit of ``2 pi b^2 log v``, and
    ``fitted_prefactor`` is exp(p0).
    """
    pts = sorted(((float(b), float(v)) for b, v in samples), key=lambda t: -t[0])
    if len(pts) < order + 2:
        raise FitError(f"need at least {order + 2} samples")
    bs = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(bs <= 0) or np.any(~np.isfinite(vs)) or np.any(vs <= 0):
        raise FitError("samples must have b > 0 and positive finite values")
    if len(set(bs.tolist())) < len(bs):
        raise FitError("repeated b values")
    X = np.column_stack([-1.0 / (2 * math.pi * bs ** 2)] + [bs ** (2 * k) for k in range(order + 1)])
    y = np.log(vs) - power * np.log(bs)
    if np.linalg.cond(X) > 1e12:
        raise FitError("ill-conditioned fit")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return AsymptoticReport(tuple(pts), float(-coef[0]), predicted_rate, float(math.exp(coef[1])),
                            predicted_prefactor, power, tuple(float(c) for c in coef))


# ---------------------------------------------------------------- A-polynomial


@dataclass(frozen=True)
class APolynomial:
    """Sum of c M^i L^j; exponents may be negative."""

    terms: tuple[tuple[int, int, complex], ...]

    def __call__(self, M: complex, L: complex) -> complex:
        return complex(sum(c * M ** i * L ** j for i, j, c in self.terms))

    def times(self, other: "APolynomial") -> "APolynomial":
        acc: dict[tuple[int, int], complex] = {}
        for i, j, c in self.terms:
            for k, l, e in other.terms:
                acc[(i + k, j + l)] = acc.get((i + k, j + l), 0) + c * e
        return APolynomial(tuple((i, j, c) for (i, j), c in sorted(acc.items()) if c != 0))


def parse_apolynomial(text: str) -> APolynomial:
    """Lines ``<coefficient> <M exponent> <L exponent>``; '#' starts a comment."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<coefficient> <i> <j>'")
        try:
            terms.append((int(parts[1]), int(parts[2]), complex(parts[0])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return APolynomial(tuple(terms))


def aj_evaluate(poly: APolynomial, tri: OrderedTriangulation, xs=None, samples: int = 20, radius: float = 0.3):
    """Max |A(M, L)| along the geometric branch, M = e^{x/2}, L = e^{H(l)/2}, H(m) = x."""
    if xs is None:
        ang = np.linspace(0, 2 * math.pi, samples, endpoint=False)
        xs = radius * np.exp(1j * ang) * np.linspace(0.3, 1, samples)
    nz = nz_system(tri, "m")
    base = solve_gluing(nz, 0.0, signs=tri.signs)
    vals = []
    for x in xs:
        sol = continue_solution(nz, complex(x), base, steps=max(1, int(abs(x) / 0.05) + 1))
        Hl = complex_holonomy(tri.curve("l"), sol)
        vals.append(poly(cmath.exp(complex(x) / 2), cmath.exp(Hl / 2)))
    vals = np.array(vals)
    return float(np.max(np.abs(vals))), vals
