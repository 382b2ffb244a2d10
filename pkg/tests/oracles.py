"""Independent high-precision references built on mpmath."""
from __future__ import annotations

import mpmath as mp


def log_phi_b(z, b, r=0.01, dps=30) -> complex:
    """log Phi_b from its integral over R + i0, indented above the origin."""
    with mp.workdps(dps):
        z = mp.mpc(z)
        b = mp.mpf(b)
        f = lambda w: mp.exp(-2j * z * w) / (mp.sinh(b * w) * mp.sinh(w / b) * w)
        beta = b + 1 / b
        L = 60 / (beta - 2 * abs(mp.im(z)))
        pts = [r] + [r + k * (L - r) / 40 for k in range(1, 41)]
        right = mp.quad(f, pts)
        left = mp.quad(f, [-p for p in reversed(pts)])
        semi = mp.quad(lambda t: f(r * mp.exp(1j * t)) * 1j * r * mp.exp(1j * t), [mp.pi, mp.pi / 2, 0])
        return complex((left + semi + right) / 4)


def dilog(z, dps=30) -> complex:
    with mp.workdps(dps):
        return complex(mp.polylog(2, mp.mpc(z)))


def bloch_wigner(z, dps=30) -> float:
    with mp.workdps(dps):
        z = mp.mpc(z)
        return float(mp.im(mp.polylog(2, z)) + mp.arg(1 - z) * mp.log(abs(z)))


def lobachevsky(x, dps=30) -> float:
    with mp.workdps(dps):
        return float(mp.clsin(2, 2 * mp.mpf(x)) / 2)
