"""Ordered ideal triangulations: file format, validation and edge classes.

Faces are glued so that vertex order is preserved, hence a gluing is fully
described by which face slot ``(tet, k)`` meets which other face slot.  Face
``k`` of a tetrahedron is the face opposite vertex ``k``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

__all__ = [
    "ParseError",
    "Tetrahedron",
    "PeripheralCurve",
    "EdgeClass",
    "OrderedTriangulation",
    "parse_triangulation",
    "serialize_triangulation",
    "edge_classes",
    "load_preset",
    "preset_names",
    "preset_file",
    "resolve_triangulation",
    "FACE_VERTICES",
    "EDGE_PAIRS",
    "shape_symbol",
]

FACE_VERTICES = {k: tuple(v for v in range(4) if v != k) for k in range(4)}
EDGE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_PAIR_INDEX = {p: i for i, p in enumerate(EDGE_PAIRS)}
# angle carried by each edge: a on 01/23, b on 02/13, c on 03/12
_ANGLE_OF_PAIR = {(0, 1): "a", (2, 3): "a", (0, 2): "b", (1, 3): "b", (0, 3): "c", (1, 2): "c"}


def shape_symbol(sign: int, pair: tuple[int, int]) -> int:
    """Shape symbol sitting on an edge: 0 for z, 1 for z', 2 for z''."""
    angle = _ANGLE_OF_PAIR[pair]
    if angle == "a":
        return 0
    if sign > 0:
        return 2 if angle == "b" else 1
    return 1 if angle == "b" else 2


class ParseError(ValueError):
    """Malformed or inconsistent triangulation input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Tetrahedron:
    index: int
    sign: int
    face_gluings: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PeripheralCurve:
    """Signed corner counts of a cusp curve, one entry per tetrahedron.

    The logarithmic holonomy is ``sum(C Log z + Cp Log z' + Cpp Log z'') - i pi nu``.
    """

    name: str
    C: tuple[int, ...]
    Cp: tuple[int, ...]
    Cpp: tuple[int, ...]
    nu: int = 0

    def rows(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return self.C, self.Cp, self.Cpp


@dataclass(frozen=True)
class EdgeClass:
    index: int
    name: str
    slots: tuple[tuple[int, tuple[int, int]], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class OrderedTriangulation:
    name: str
    kind: str
    tetrahedra: tuple[Tetrahedron, ...]
    curves: tuple[PeripheralCurve, ...] = ()
    face_labels: tuple[tuple[str, tuple[int, int]], ...] = ()
    edge_labels: tuple[tuple[str, tuple[int, tuple[int, int]]], ...] = ()
    preset_name: str | None = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return len(self.tetrahedra)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(t.sign for t in self.tetrahedra)

    def glued(self, tet: int, face: int) -> tuple[int, int]:
        return self.tetrahedra[tet].face_gluings[face]

    def curve(self, name: str) -> PeripheralCurve:
        for c in self.curves:
            if c.name == name:
                return c
        raise KeyError(f"no peripheral curve named {name!r}")

    def has_curve(self, name: str) -> bool:
        return any(c.name == name for c in self.curves)

    @cached_property
    def faces(self) -> tuple[tuple[str, tuple[tuple[int, int], tuple[int, int]]], ...]:
        """Face classes ``(name, (slot, partner))`` in column order."""
        if self.face_labels:
            out = []
            for name, slot in self.face_labels:
                out.append((name, (slot, self.glued(*slot))))
            return tuple(out)
        seen: set[tuple[int, int]] = set()
        out = []
        for t in range(self.N):
            for k in range(4):
                if (t, k) in seen:
                    continue
                partner = self.glued(t, k)
                seen.update({(t, k), partner})
                out.append((f"x{len(out)}", ((t, k), partner)))
        return tuple(out)

    @cached_property
    def face_index(self) -> dict[tuple[int, int], int]:
        idx = {}
        for i, (_, (s, t)) in enumerate(self.faces):
            idx[s] = i
            idx[t] = i
        return idx

    @cached_property
    def edge_classes(self) -> tuple[EdgeClass, ...]:
        return _edge_classes(self)


def _edge_classes(tri: OrderedTriangulation, glue: bool = True) -> tuple[EdgeClass, ...]:
    n = 6 * tri.N
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if glue:
        for t, tet in enumerate(tri.tetrahedra):
            for k, target in enumerate(tet.face_gluings):
                if target is None:
                    continue
                t2, k2 = target
                phi = dict(zip(FACE_VERTICES[k], FACE_VERTICES[k2]))
                for u, v in ((a, b) for i, a in enumerate(FACE_VERTICES[k]) for b in FACE_VERTICES[k][i + 1:]):
                    s1 = 6 * t + _PAIR_INDEX[(u, v)]
                    s2 = 6 * t2 + _PAIR_INDEX[tuple(sorted((phi[u], phi[v])))]
                    r1, r2 = find(s1), find(s2)
                    if r1 != r2:
                        parent[max(r1, r2)] = min(r1, r2)
    groups: dict[int, list[int]] = {}
    for s in range(n):
        groups.setdefault(find(s), []).append(s)
    classes = sorted(groups.values(), key=min)
    slot = lambda s: (s // 6, EDGE_PAIRS[s % 6])
    named = []
    if glue and tri.edge_labels:
        where = {}
        for ci, members in enumerate(classes):
            for s in members:
                where[slot(s)] = ci
        used = set()
        for name, rep in tri.edge_labels:
            if rep not in where:
                raise ParseError(f"edge label {name!r} refers to a missing slot")
            ci = where[rep]
            if ci in used:
                raise ParseError(f"edge label {name!r} names an edge class twice")
            used.add(ci)
            named.append((name, classes[ci]))
        for ci, members in enumerate(classes):
            if ci not in used:
                named.append((f"e{ci}", members))
    else:
        named = [(f"e{i}", m) for i, m in enumerate(classes)]
    return tuple(
        EdgeClass(i, name, tuple(slot(s) for s in sorted(members)))
        for i, (name, members) in enumerate(named)
    )


def edge_classes(tri: OrderedTriangulation, glue: bool = True) -> tuple[EdgeClass, ...]:
    """Partition of the 6N edge slots; ``glue=False`` ignores all gluings."""
    return tri.edge_classes if glue else _edge_classes(tri, glue=False)


# ---------------------------------------------------------------- parsing

_HEADER = re.compile(r"triangulation\s+(\S+)\s+tets=(\d+)\s+kind=(knot-complement|generic)\s*$")
_INTLIST = re.compile(r"^-?\d+(,-?\d+)*$")


def _parse_slot(tok: str, line: int, col: int, allow_free: bool = False):
    if allow_free and tok == "-":
        return None
    m = re.fullmatch(r"(\d+)\.(\d)", tok)
    if not m:
        raise ParseError(f"bad face slot {tok!r}", line, col)
    return int(m.group(1)), int(m.group(2))


def _parse_edge_slot(tok: str, line: int, col: int) -> tuple[int, tuple[int, int]]:
    m = re.fullmatch(r"(\d+)\.([0-3])([0-3])", tok)
    if not m or m.group(2) >= m.group(3):
        raise ParseError(f"bad edge slot {tok!r}", line, col)
    return int(m.group(1)), (int(m.group(2)), int(m.group(3)))


def _intvec(text: str, n: int, line: int, col: int) -> tuple[int, ...]:
    if not _INTLIST.match(text):
        raise ParseError(f"bad integer list {text!r}", line, col)
    vals = tuple(int(x) for x in text.split(","))
    if len(vals) != n:
        raise ParseError(f"expected {n} entries, got {len(vals)}", line, col)
    return vals


def parse_triangulation(text: str, validate: bool = True) -> OrderedTriangulation:
    """Parse the line-oriented triangulation format."""
    header = None
    tets: dict[int, tuple[int, list[tuple[int, int]], int]] = {}
    curves: list[PeripheralCurve] = []
    faces: list[tuple[str, tuple[int, int]]] = []
    edges: list[tuple[str, tuple[int, tuple[int, int]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        col0 = len(body) - len(body.lstrip()) + 1
        words = body.split()
        key = words[0]
        if header is None:
            m = _HEADER.match(body.strip())
            if not m:
                raise ParseError("expected 'triangulation <name> tets=<N> kind=<kind>'", lineno, col0)
            header = (m.group(1), int(m.group(2)), m.group(3))
            continue
        n = header[1]

        def column(tok: str) -> int:
            return body.find(tok) + 1

        if key == "tet":
            m = re.fullmatch(
                r"\s*tet\s+(\d+)\s+sign=([+-]?1)\s+glue"
                r"\s+0->(\S+)\s+1->(\S+)\s+2->(\S+)\s+3->(\S+)\s*", body)
            if not m:
                raise ParseError("malformed tet line", lineno, col0)
            idx = int(m.group(1))
            if idx in tets:
                raise ParseError(f"duplicate tetrahedron {idx}", lineno, column(m.group(1)))
            glue = [_parse_slot(m.group(3 + k), lineno, m.start(3 + k) + 1, True) for k in range(4)]
            tets[idx] = (int(m.group(2)), glue, lineno)
        elif key == "curve":
            m = re.fullmatch(
                r"\s*curve\s+(\S+)\s+nu=(-?\d+)\s+C=(\S+)\s+Cp=(\S+)\s+Cpp=(\S+)\s*", body)
            if not m:
                raise ParseError("malformed curve line", lineno, col0)
            vecs = [_intvec(m.group(g), n, lineno, m.start(g) + 1) for g in (3, 4, 5)]
            curves.append(PeripheralCurve(m.group(1), *vecs, nu=int(m.group(2))))
        elif key == "faces":
            for tok in words[1:]:
                name, _, ref = tok.partition("=")
                if not name or not ref:
                    raise ParseError(f"bad face label {tok!r}", lineno, column(tok))
                faces.append((name, _parse_slot(ref, lineno, column(tok))))
        elif key == "edges":
            for tok in words[1:]:
                name, _, ref = tok.partition("=")
                if not name or not ref:
                    raise ParseError(f"bad edge label {tok!r}", lineno, column(tok))
                edges.append((name, _parse_edge_slot(ref, lineno, column(tok))))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, col0)
    if header is None:
        raise ParseError("empty document")
    name, n, kind = header
    if sorted(tets) != list(range(n)):
        raise ParseError(f"expected tetrahedra 0..{n - 1}, found {sorted(tets)}")
    tetrahedra = tuple(
        Tetrahedron(i, tets[i][0], tuple(tets[i][1])) for i in range(n)
    )
    tri = OrderedTriangulation(name, kind, tetrahedra, tuple(curves), tuple(faces), tuple(edges))
    if validate:
        _validate(tri, {i: tets[i][2] for i in tets})
    return tri


def _validate(tri: OrderedTriangulation, lines: dict[int, int] | None = None) -> None:
    lines = lines or {}
    n = tri.N
    for t in tri.tetrahedra:
        for k, target in enumerate(t.face_gluings):
            ln = lines.get(t.index)
            if target is None:
                raise ParseError(f"unpaired face {t.index}.{k}", ln)
            t2, k2 = target
            if not (0 <= t2 < n and 0 <= k2 < 4):
                raise ParseError(f"face {t.index}.{k} glued to nonexistent face {t2}.{k2}", ln)
            if (t2, k2) == (t.index, k):
                raise ParseError(f"face {t.index}.{k} glued to itself", ln)
            if tri.glued(t2, k2) != (t.index, k):
                raise ParseError(f"unpaired face {t.index}.{k}", ln)
    labelled = [slot for _, slot in tri.face_labels]
    if labelled:
        classes = {frozenset({s, tri.glued(*s)}) for s in labelled}
        if len(labelled) != 2 * n or len(classes) != 2 * n:
            raise ParseError("faces line must name each of the 2N faces exactly once")
    if tri.kind == "knot-complement" and len(tri.edge_classes) != n:
        raise ParseError(f"knot complement needs {n} edge classes, found {len(tri.edge_classes)}")


def serialize_triangulation(tri: OrderedTriangulation) -> str:
    out = [f"triangulation {tri.name} tets={tri.N} kind={tri.kind}"]
    if tri.face_labels:
        out.append("faces " + " ".join(f"{nm}={t}.{k}" for nm, (t, k) in tri.face_labels))
    if tri.edge_labels:
        out.append("edges " + " ".join(f"{nm}={t}.{u}{v}" for nm, (t, (u, v)) in tri.edge_labels))
    for t in tri.tetrahedra:
        glue = " ".join(
            f"{k}->" + ("-" if g is None else f"{g[0]}.{g[1]}") for k, g in enumerate(t.face_gluings))
        out.append(f"tet {t.index} sign={t.sign:+d} glue {glue}")
    for c in tri.curves:
        vec = lambda v: ",".join(str(x) for x in v)
        out.append(f"curve {c.name} nu={c.nu} C={vec(c.C)} Cp={vec(c.Cp)} Cpp={vec(c.Cpp)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- presets

def _preset_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get("FAMEDKIT_PRESET_DIR")
    if env:
        dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    dirs.append(Path(str(resources.files("famedkit") / "presets")))
    return dirs


def preset_names() -> list[str]:
    names = set()
    for d in _preset_dirs():
        if d.is_dir():
            names.update(p.stem for p in d.glob("*.tri"))
    return sorted(names)


def preset_file(name: str, suffix: str = ".tri") -> Path:
    """First file ``name + suffix`` on the preset search path."""
    for d in _preset_dirs():
        path = d / f"{name}{suffix}"
        if path.is_file():
            return path
    raise FileNotFoundError(f"no preset named {name!r}")


def load_preset(name: str) -> OrderedTriangulation:
    for d in _preset_dirs():
        path = d / f"{name}.tri"
        if path.is_file():
            tri = parse_triangulation(path.read_text(encoding="utf-8"))
            object.__setattr__(tri, "preset_name", name)
            return tri
    raise FileNotFoundError(f"no preset named {name!r}")


def resolve_triangulation(ref: str) -> OrderedTriangulation:
    """Load a triangulation from a path, falling back to a preset name."""
    path = Path(ref)
    if path.is_file():
        return parse_triangulation(path.read_text(encoding="utf-8"))
    stem = path.name[:-4] if path.name.endswith(".tri") else path.name
    try:
        return load_preset(stem)
    except FileNotFoundError:
        raise FileNotFoundError(f"{ref}: no such file or preset") from None
