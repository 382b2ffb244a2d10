"""Rebuild the twist-knot presets X_n from their edge equations.

Only the edge-equation rows and Q of X_n are known, so this script searches
for ordered gluing tables that reproduce them: backtracking over face
pairings (respecting orientation) with union-find pruning on edge classes.
The first table whose kinematical Q matches is written to
``src/famedkit/presets/twist<n>.tri`` together with the longitude and a
meridian.

    python3 tools/reconstruct_twist.py 4 5 6 7
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy as sp

from famedkit.angle_structures import angular_holonomy, maximize_volume
from famedkit.geometry import complex_holonomy, solve_gluing
from famedkit.kinematical import kinematical_matrices
from famedkit.nz_gluing import nz_system
from famedkit.triangulation import EDGE_PAIRS, FACE_VERTICES, parse_triangulation, shape_symbol

PRESET_DIR = Path(__file__).resolve().parents[1] / "src" / "famedkit" / "presets"


def twist_parameters(n: int) -> tuple[int, str]:
    if n < 4:
        raise ValueError("X_n is defined here for n >= 4")
    return ((n - 3) // 2, "odd") if n % 2 else ((n - 2) // 2, "even")


def target_rows(p: int, parity: str):
    """Edge rows as {name: [[#z, #z', #z''] per tet]}, tets ordered 1..p, U, V, W."""
    N = p + 3
    U, V, W = p, p + 1, p + 2
    rows: dict[str, list[list[int]]] = {}

    def add(name, items):
        r = [[0, 0, 0] for _ in range(N)]
        for tet, sym, c in items:
            r[tet][sym] += c
        rows[name] = r

    chain = lambda k: k - 1  # noqa: E731
    add("s", [(U, 0, 2), (V, 1, 1), (V, 2, 1), (W, 0, 1), (W, 1, 1)])
    add("0", [(0, 0, 2), (0, 1, 1)] + [(chain(k), 0, 2) for k in range(2, p + 1)] + [(V, 0, 1), (W, 2, 1)])
    if p >= 2:
        add("1", [(0, 2, 2), (1, 1, 1)])
    for k in range(2, p):
        add(str(k), [(chain(k - 1), 1, 1), (chain(k), 2, 2), (chain(k + 1), 1, 1)])
    pre = [(chain(p - 1), 1, 1)] if p >= 2 else []
    if parity == "odd":
        top = [(U, 1, 1), (U, 2, 2), (V, 0, 1), (V, 2, 1), (W, 1, 1), (W, 2, 1)]
        add(str(p + 1), [(chain(p), 1, 1)] + top)
        add(str(p), pre + [(chain(p), 2, 2), (U, 1, 1), (V, 1, 1), (W, 0, 1)])
        signs = [1] * p + [-1, -1, -1]
    else:
        add(str(p + 1), [(chain(p), 1, 1), (U, 2, 1), (V, 2, 1), (W, 1, 1)])
        add(str(p), pre + [(chain(p), 2, 2), (U, 1, 2), (U, 2, 1), (V, 0, 1), (V, 1, 1), (W, 0, 1), (W, 2, 1)])
        signs = [1] * (p + 1) + [-1, -1]
    return N, signs, rows


def target_Q(p: int, parity: str) -> sp.Matrix:
    N = p + 3
    U, V, W = p, p + 1, p + 2
    Q = sp.zeros(N, N)
    for i in range(p):
        for j in range(p):
            Q[i, j] = min(i, j) + 1
    half = sp.Rational(1, 2)
    if parity == "odd":
        for i in range(p):
            Q[i, U] = Q[U, i] = -(i + 1)
        entries = {(U, U): p + 2, (U, V): -3 * half, (U, W): 1, (V, V): 1, (V, W): -half}
    else:
        for i in range(p):
            Q[i, U] = Q[U, i] = i + 1
        entries = {(U, U): p + 1, (U, V): -half, (U, W): -1, (V, V): -1, (V, W): -half}
    for (i, j), v in entries.items():
        Q[i, j] = Q[j, i] = v
    return Q


def _flat(r):
    return tuple(x for row in r for x in row)


def search_gluings(N: int, signs, rows):
    """Yield face pairings {(T, k): (T', k')} realizing exactly the given edge rows."""
    targets = [_flat(r) for r in rows.values()]
    nslot = 6 * N
    slot_vec = []
    for T in range(N):
        for pair in EDGE_PAIRS:
            v = [0] * (3 * N)
            v[3 * T + shape_symbol(signs[T], pair)] = 1
            slot_vec.append(v)
    pair_index = {p: i for i, p in enumerate(EDGE_PAIRS)}
    glue: dict[tuple[int, int], tuple[int, int]] = {}

    def find(par, x):
        while par[x] != x:
            x = par[x]
        return x

    def classes(par):
        comp: dict[int, list[int]] = {}
        for s in range(nslot):
            comp.setdefault(find(par, s), []).append(s)
        return comp

    def vec_of(members):
        return tuple(sum(slot_vec[s][i] for s in members) for i in range(3 * N))

    def consistent(par):
        for mem in classes(par).values():
            v = vec_of(mem)
            if not any(all(v[i] <= t[i] for i in range(3 * N)) for t in targets):
                return False
            closed = all((T, k) in glue
                         for s in mem
                         for T, pi in [divmod(s, 6)]
                         for k in range(4) if k not in EDGE_PAIRS[pi])
            if closed and v not in targets:
                return False
        return True

    def glue_faces(par, T, k, T2, k2):
        par = list(par)
        phi = dict(zip(FACE_VERTICES[k], FACE_VERTICES[k2]))
        for u, w in itertools.combinations(FACE_VERTICES[k], 2):
            a = 6 * T + pair_index[(u, w)]
            b = 6 * T2 + pair_index[tuple(sorted((phi[u], phi[w])))]
            ra, rb = find(par, a), find(par, b)
            if ra != rb:
                par[ra] = rb
        return par

    free = [(T, k) for T in range(N) for k in range(4)]

    def rec(par):
        rest = [f for f in free if f not in glue]
        if not rest:
            if sorted(vec_of(m) for m in classes(par).values()) == sorted(targets):
                yield dict(glue)
            return
        T, k = rest[0]
        for T2, k2 in rest[1:]:
            # orientation: eps (-1)^k = -eps' (-1)^k'
            if signs[T] * (-1) ** k != -signs[T2] * (-1) ** k2:
                continue
            glue[(T, k)] = (T2, k2)
            glue[(T2, k2)] = (T, k)
            par2 = glue_faces(par, T, k, T2, k2)
            if consistent(par2):
                yield from rec(par2)
            del glue[(T, k)]
            del glue[(T2, k2)]

    yield from rec(list(range(nslot)))


def _tri_text(name, signs, glue, edge_labels, curves) -> str:
    N = len(signs)
    lines = [f"triangulation {name} tets={N} kind=knot-complement"]
    lines.append("edges " + " ".join(f"{nm}={t}.{u}{v}" for nm, (t, (u, v)) in edge_labels))
    for T in range(N):
        g = " ".join(f"{k}->{glue[(T, k)][0]}.{glue[(T, k)][1]}" for k in range(4))
        lines.append(f"tet {T} sign={signs[T]:+d} glue {g}")
    for nm, nu, C, Cp, Cpp in curves:
        fmt = lambda v: ",".join(str(int(x)) for x in v)  # noqa: E731
        lines.append(f"curve {nm} nu={nu} C={fmt(C)} Cp={fmt(Cp)} Cpp={fmt(Cpp)}")
    return "\n".join(lines) + "\n"


def _edge_labels(N, signs, glue, rows, p):
    tri = parse_triangulation(_tri_text("tmp", signs, glue, [], []))
    by_vec = {}
    for ec in tri.edge_classes:
        v = [0] * (3 * N)
        for t, pair in ec.slots:
            v[3 * t + shape_symbol(signs[t], pair)] += 1
        by_vec[tuple(v)] = ec.slots[0]
    # omega_p last so that it is the edge dropped by default
    order = ["s", "0"] + [str(k) for k in range(1, p)] + [str(p + 1), str(p)]
    return [(f"w{nm}", by_vec[_flat(rows[nm])]) for nm in order]


def longitude_rows(p: int, parity: str, N: int):
    U, V, W = p, p + 1, p + 2
    A_l, B_l = [0] * N, [0] * N
    if parity == "odd":
        A_l[U], A_l[V], A_l[W] = 2, -2, 2
        B_l[V], B_l[W] = 2, 2
    else:
        A_l[U], A_l[V], A_l[W] = -2, 4, 2
        B_l[V] = 2
    return A_l, B_l


def build_preset(n: int) -> str:
    p, parity = twist_parameters(n)
    N, signs, rows = target_rows(p, parity)
    TQ = target_Q(p, parity)
    for glue in search_gluings(N, signs, rows):
        labels = _edge_labels(N, signs, glue, rows, p)
        tri = parse_triangulation(_tri_text("tmp", signs, glue, labels, []))
        if kinematical_matrices(tri).Q == TQ:
            break
    else:
        raise RuntimeError(f"no gluing table reproduces Q for n={n}")
    name = f"twist{n}"
    zero = [0] * N
    A_l, B_l = longitude_rows(p, parity, N)
    # nu of l: its angular holonomy at the complete structure must vanish
    tri = parse_triangulation(_tri_text(name, signs, glue, labels, [("l", 0, A_l, zero, B_l)]))
    hol = angular_holonomy(tri, maximize_volume(tri).maximizer, "l")
    nu_l = round(hol / math.pi)
    assert abs(hol - nu_l * math.pi) < 1e-8
    curves = [("l", nu_l, A_l, zero, B_l)]
    tri = parse_triangulation(_tri_text(name, signs, glue, labels, curves))
    nz = nz_system(tri)
    # meridian candidate from the last column of B^{-1}
    col = nz.Binv[:, N - 1]
    C_m = [-2 * Fraction(str(x)) for x in col]
    assert all(c.denominator == 1 for c in C_m)
    C_m = [int(c) for c in C_m]
    sol = solve_gluing(nz, 0.0, signs=signs)
    Hm = complex_holonomy(parse_triangulation(_tri_text(name, signs, glue, labels, curves + [("m", 0, C_m, zero, zero)])).curve("m"), sol)
    nu_m = round(Hm.imag / math.pi)
    assert abs(Hm - 1j * math.pi * nu_m) < 1e-9
    curves.append(("m", nu_m, C_m, zero, zero))
    text = _tri_text(name, signs, glue, labels, curves)
    header = (f"# Twist knot triangulation X_{n} (p={p}, {parity} n); tets 0..{p - 1} form the chain,\n"
              f"# then U, V, W.  Generated by tools/reconstruct_twist.py.\n")
    return header + text


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("n", type=int, nargs="+")
    ap.add_argument("--out", type=Path, default=PRESET_DIR)
    ap.add_argument("--stdout", action="store_true")
    args = ap.parse_args(argv)
    for n in args.n:
        text = build_preset(n)
        if args.stdout:
            sys.stdout.write(text)
        else:
            path = args.out / f"twist{n}.tri"
            path.write_text(text)
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
