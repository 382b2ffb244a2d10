"""Gluing-equation matrices, elimination of z' and the FAMED certificate."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .kinematical import kinematical_matrices
from .triangulation import OrderedTriangulation, PeripheralCurve, shape_symbol

__all__ = [
    "GluingMatrices",
    "NZSystem",
    "FamedCertificate",
    "edge_incidence",
    "assemble_nz",
    "nz_system",
    "famed_check",
    "CONVENTIONS",
]

CONVENTIONS = ("gpp-gp", "gpp-g")


@dataclass(frozen=True)
class GluingMatrices:
    """Incidence counts of z, z', z'' on every edge class plus one curve.

    ``edge_G[e][k]`` counts the slots of shape z_k on edge class e.  The
    retained system ``G, Gp, Gpp`` lists every edge except ``dropped`` and
    ends with the curve row.
    """

    edge_G: np.ndarray
    edge_Gp: np.ndarray
    edge_Gpp: np.ndarray
    edge_names: tuple[str, ...]
    curve: PeripheralCurve
    dropped: int

    @property
    def N(self) -> int:
        return self.edge_G.shape[1]

    @property
    def kept(self) -> list[int]:
        return [e for e in range(len(self.edge_names)) if e != self.dropped]

    def _stack(self, M: np.ndarray, row) -> np.ndarray:
        return np.vstack([M[self.kept], np.asarray(row, dtype=np.int64)[None, :]])

    @property
    def G(self) -> np.ndarray:
        return self._stack(self.edge_G, self.curve.C)

    @property
    def Gp(self) -> np.ndarray:
        return self._stack(self.edge_Gp, self.curve.Cp)

    @property
    def Gpp(self) -> np.ndarray:
        return self._stack(self.edge_Gpp, self.curve.Cpp)

    @property
    def row_names(self) -> tuple[str, ...]:
        return tuple(self.edge_names[e] for e in self.kept) + (f"H({self.curve.name})",)

    def rhs_pi(self) -> np.ndarray:
        """Right-hand side of the un-eliminated system in units of i*pi."""
        return np.array([2] * len(self.kept) + [self.curve.nu], dtype=np.int64)


@dataclass(frozen=True)
class NZSystem:
    """``Abold Log z + Bbold Log z'' = i pi nu + (0, ..., 0, H)``.

    Here H is the logarithmic holonomy of the selected curve, so the complete
    structure is ``H = 0`` and a cone structure is ``H = i theta``.
    """

    Abold: sp.Matrix
    Bbold: sp.Matrix
    nu: tuple[int, ...]
    dropped_edge: int
    convention: str
    gluing: GluingMatrices
    detB: sp.Rational = field(init=False)
    BinvA: sp.Matrix | None = field(init=False)

    def __post_init__(self):
        det = self.Bbold.det()
        object.__setattr__(self, "detB", det)
        object.__setattr__(self, "BinvA", self.Bbold.inv() * self.Abold if det != 0 else None)

    @property
    def N(self) -> int:
        return self.Abold.rows

    @property
    def curve_row_index(self) -> int:
        return self.N - 1

    @property
    def Binv(self) -> sp.Matrix:
        return self.Bbold.inv()

    def float_A(self) -> np.ndarray:
        return np.array(self.Abold.tolist(), dtype=float)

    def float_B(self) -> np.ndarray:
        return np.array(self.Bbold.tolist(), dtype=float)

    def nu_vector(self) -> np.ndarray:
        """nu in radians."""
        return np.pi * np.array(self.nu, dtype=float)


def edge_incidence(tri: OrderedTriangulation, curve: str = "l", drop_edge: int | str | None = None) -> GluingMatrices:
    classes = tri.edge_classes
    n = tri.N
    mats = np.zeros((3, len(classes), n), dtype=np.int64)
    for ec in classes:
        for t, pair in ec.slots:
            mats[shape_symbol(tri.tetrahedra[t].sign, pair), ec.index, t] += 1
    try:
        c = tri.curve(curve)
    except KeyError:
        raise ValueError(f"missing curve data: no curve named {curve!r}") from None
    names = tuple(ec.name for ec in classes)
    if drop_edge is None:
        dropped = len(classes) - 1
    elif isinstance(drop_edge, str) and not drop_edge.lstrip("-").isdigit():
        if drop_edge not in names:
            raise ValueError(f"no edge class named {drop_edge!r}")
        dropped = names.index(drop_edge)
    else:
        dropped = int(drop_edge)
        if not 0 <= dropped < len(classes):
            raise ValueError(f"edge index {dropped} out of range")
    return GluingMatrices(mats[0], mats[1], mats[2], names, c, dropped)


def assemble_nz(gm: GluingMatrices, convention: str = "gpp-gp") -> NZSystem:
    """Eliminate Log z' with Log z' = i pi - Log z - Log z''."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    G, Gp, Gpp = (sp.Matrix(M.tolist()) for M in (gm.G, gm.Gp, gm.Gpp))
    A = G - Gp
    B = Gpp - Gp if convention == "gpp-gp" else Gpp - G
    nu = tuple(int(r - s) for r, s in zip(gm.rhs_pi(), gm.Gp.sum(axis=1)))
    return NZSystem(A, B, nu, gm.dropped, convention, gm)


def nz_system(tri: OrderedTriangulation, curve: str = "l", drop_edge=None, convention: str = "gpp-gp") -> NZSystem:
    return assemble_nz(edge_incidence(tri, curve, drop_edge), convention)


@dataclass(frozen=True)
class FamedCertificate:
    angle_space_nonempty: bool
    witness: tuple[float, ...] | None
    detA_nonzero: bool
    detA: sp.Rational
    detB_nonzero: bool
    detB: sp.Rational
    duality_holds: bool
    BinvA: sp.Matrix | None
    scriptG: sp.Matrix | None
    convention: str
    dropped_edge: int
    alt_duality_holds: bool
    conventions_agree: bool

    @property
    def famed(self) -> bool:
        return self.angle_space_nonempty and self.detA_nonzero and self.detB_nonzero and self.duality_holds


def famed_check(tri: OrderedTriangulation, drop_edge=None, convention: str = "gpp-gp") -> FamedCertificate:
    from .angle_structures import feasibility

    km = kinematical_matrices(tri)
    gm = edge_incidence(tri, "l", drop_edge)
    nz = assemble_nz(gm, convention)
    other = assemble_nz(gm, CONVENTIONS[1] if convention == CONVENTIONS[0] else CONVENTIONS[0])
    witness = feasibility(tri)

    def duality(sys_: NZSystem) -> bool:
        return km.scriptG is not None and sys_.BinvA is not None and sys_.Bbold * km.scriptG - sys_.Abold == sp.zeros(sys_.N, sys_.N)

    return FamedCertificate(
        angle_space_nonempty=witness is not None,
        witness=None if witness is None else tuple(float(x) for x in witness.angles),
        detA_nonzero=km.detA != 0,
        detA=km.detA,
        detB_nonzero=nz.detB != 0,
        detB=nz.detB,
        duality_holds=duality(nz),
        BinvA=nz.BinvA,
        scriptG=km.scriptG,
        convention=convention,
        dropped_edge=gm.dropped,
        alt_duality_holds=duality(other),
        conventions_agree=nz.Bbold == other.Bbold,
    )
