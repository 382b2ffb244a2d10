"""Command-line front end.

Exit status: 0 on success, 1 when a mathematical verdict fails (not FAMED,
no convergence, a failed acceptance criterion), 2 on input errors.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .reports import RunReport, fmt_float, render_csv, to_plain

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


class Verdict(RuntimeError):
    """A mathematical failure worth reporting with exit status 1."""


# ---------------------------------------------------------------- parsing helpers


def parse_complex(text: str) -> complex:
    """``RE`` or ``RE,IM``."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def parse_floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _triangulation(ref: str):
    from .triangulation import ParseError, resolve_triangulation

    try:
        return resolve_triangulation(ref)
    except (ParseError, FileNotFoundError, OSError) as exc:
        raise InputError(str(exc)) from None


def resolve_alpha(tri, spec: str):
    """Angle structure from ``max``, ``regular``, ``slice:THETA``, a CSV list or a file holding one."""
    from .angle_structures import AngleStructure, maximize_volume, regular_structure

    if spec in ("max", "maxvol"):
        return maximize_volume(tri).maximizer
    if spec == "regular":
        alpha = regular_structure(tri.N)
    elif spec.startswith("slice:"):
        return maximize_volume(tri, slice_theta=float(spec[6:])).maximizer
    else:
        path = Path(spec)
        text = path.read_text(encoding="utf-8") if path.is_file() else spec
        try:
            vals = [float(v) for v in text.replace("\n", ",").split(",") if v.strip()]
        except ValueError:
            raise InputError(f"--alpha: cannot read angles from {spec!r}") from None
        if len(vals) != 3 * tri.N:
            raise InputError(f"--alpha: expected {3 * tri.N} angles, got {len(vals)}")
        alpha = AngleStructure(np.array(vals))
    if not alpha.is_balanced(tri, tol=1e-9):
        raise InputError("--alpha is not a balanced angle structure of this triangulation")
    return alpha


# ---------------------------------------------------------------- commands


def cmd_parse(args, rep: RunReport):
    tri = _triangulation(args.file)
    rep.outputs = {
        "name": tri.name,
        "kind": tri.kind,
        "N": tri.N,
        "signs": list(tri.signs),
        "edge_classes": [{"name": e.name, "slots": [[t, list(p)] for t, p in e.slots]} for e in tri.edge_classes],
        "curves": [{"name": c.name, "nu": c.nu, "C": list(c.C), "Cp": list(c.Cp), "Cpp": list(c.Cpp)}
                   for c in tri.curves],
    }
    text = [f"{tri.name}: N = {tri.N}, signs = {list(tri.signs)}, {len(tri.edge_classes)} edge classes",
            "curves: " + (", ".join(c.name for c in tri.curves) or "none")]
    return "\n".join(text)


def cmd_matrices(args, rep: RunReport):
    from .kinematical import kinematical_matrices

    km = kinematical_matrices(_triangulation(args.file))
    rep.outputs = {"R": km.R, "A": km.A, "B": km.B, "detA": km.detA, "Q": km.Q, "scriptG": km.scriptG}
    lines = []
    for k in ("R", "A", "B", "Q", "scriptG"):
        M = getattr(km, k)
        lines.append(f"{k} = {to_plain(M) if M is not None else 'undefined (det A = 0)'}")
    lines.append(f"det A = {km.detA}")
    return "\n".join(lines)


def cmd_famed(args, rep: RunReport):
    from .nz_gluing import famed_check

    tri = _triangulation(args.file)
    drop = args.drop_edge
    if drop is not None and drop.lstrip("-").isdigit():
        drop = int(drop)
    try:
        cert = famed_check(tri, drop_edge=drop, convention=args.convention)
    except (KeyError, IndexError) as exc:
        raise InputError(f"--drop-edge: {exc}") from None
    rep.outputs = {
        "famed": cert.famed,
        "angle_space_nonempty": cert.angle_space_nonempty,
        "witness": cert.witness,
        "detA": cert.detA,
        "detB": cert.detB,
        "duality_holds": cert.duality_holds,
        "BinvA": cert.BinvA,
        "scriptG": cert.scriptG,
        "convention": cert.convention,
        "dropped_edge": cert.dropped_edge,
        "alt_duality_holds": cert.alt_duality_holds,
        "conventions_agree": cert.conventions_agree,
    }
    text = (f"famed = {str(cert.famed).lower()} (angles {'yes' if cert.angle_space_nonempty else 'no'}, "
            f"det A = {cert.detA}, det B = {cert.detB}, B^-1 A = G: {str(cert.duality_holds).lower()})")
    if not cert.famed:
        raise Verdict(text)
    return text


def cmd_volume(args, rep: RunReport):
    from .angle_structures import OptimizationError, maximize_volume

    tri = _triangulation(args.file)
    thetas = args.slice if args.slice is not None else (None,)
    rows = []
    for th in thetas:
        try:
            r = maximize_volume(tri, slice_theta=th, curve=args.curve)
            rows.append({"theta": th, "volume": r.value, "converged": r.converged, "kkt_residual": r.kkt_residual,
                         "maximizer": r.maximizer.angles, "boundary": list(r.boundary)})
        except OptimizationError as exc:
            rows.append({"theta": th, "volume": None, "converged": False, "error": str(exc)})
    rep.outputs = {"curve": args.curve, "slices": rows}
    if args.csv:
        return render_csv(["theta", "volume", "converged"],
                          [[r["theta"] if r["theta"] is not None else "", r["volume"] if r["volume"] is not None else "",
                            str(r["converged"]).lower()] for r in rows]).rstrip("\n")
    if not all(r["converged"] for r in rows):
        raise Verdict("volume maximization did not converge on every slice")
    return "\n".join(f"theta = {r['theta']}: volume = {fmt_float(r['volume'])}" for r in rows)


def cmd_qdilog(args, rep: RunReport):
    from .special_functions import log_phi_b, phi_b_semiclassical_residual

    b, z = args.b, args.z
    lp = complex(log_phi_b(z, b))
    inv = complex(log_phi_b(-z, b)) + lp - 1j * math.pi * z * z - 1j * math.pi * (b * b + 1 / (b * b)) / 12
    conj = lp + complex(log_phi_b(z.conjugate(), b)).conjugate()
    shift = complex(log_phi_b(z - 0.5j * b, b)) - complex(log_phi_b(z + 0.5j * b, b))
    target = np.log1p(np.exp(2 * math.pi * b * z)) if (2 * math.pi * b * z).real < 30 else 2 * math.pi * b * z
    res = {
        "inversion": abs(np.expm1(inv)),
        "unitarity": abs(np.expm1(conj)),
        "shift": abs(np.expm1(shift - target)),
        "semiclassical": phi_b_semiclassical_residual(2 * math.pi * b * z, b),
    }
    rep.outputs = {"log_phi": lp, "phi": complex(np.exp(lp)), "residuals": res}
    return f"Phi_b({z}) = {complex(np.exp(lp))}\nlog = {lp}\n" + "\n".join(f"{k} residual = {v:.3e}" for k, v in res.items())


def _solution_dict(sol, tri):
    from .geometry import complex_holonomy, hyperbolic_volume

    out = {"u": sol.u_target, "z": sol.z, "residual": sol.residual, "iterations": sol.iterations,
           "volume": hyperbolic_volume(sol), "geometric": bool(np.all(sol.z.imag > 0))}
    out["holonomy"] = {c.name: complex_holonomy(c, sol) for c in tri.curves}
    return out


def cmd_solve(args, rep: RunReport):
    from .geometry import continue_solution, solve_gluing
    from .nz_gluing import nz_system

    tri = _triangulation(args.file)
    nz = nz_system(tri, args.curve)
    sol = solve_gluing(nz, 0.0, signs=tri.signs)
    if args.u != 0:
        sol = continue_solution(nz, args.u, sol, steps=max(1, int(abs(args.u) / 0.05) + 1))
    rep.outputs = _solution_dict(sol, tri)
    return "\n".join([f"z_{k} = {z}" for k, z in enumerate(sol.z)]
                     + [f"volume = {fmt_float(rep.outputs['volume'])}", f"residual = {sol.residual:.3e}"])


def cmd_sweep_u(args, rep: RunReport):
    from .geometry import hyperbolic_volume, sweep_u
    from .nz_gluing import nz_system

    tri = _triangulation(args.file)
    if args.steps < 1:
        raise InputError("--steps must be at least 1")
    sols = sweep_u(nz_system(tri, args.curve), tri.signs, args.u_from, args.u_to, args.steps)
    rows = [_solution_dict(s, tri) for s in sols]
    rep.outputs = {"points": rows}
    header = ["u_re", "u_im", "volume", "residual"] + [f"z{k}_{p}" for k in range(tri.N) for p in ("re", "im")]
    table = [[s.u_target.real, s.u_target.imag, hyperbolic_volume(s), float(s.residual)]
             + [float(v) for z in s.z for v in (z.real, z.imag)] for s in sols]
    return render_csv(header, table).rstrip("\n")


def cmd_one_loop(args, rep: RunReport):
    from .nz_gluing import CONVENTIONS
    from .one_loop import one_loop

    tri = _triangulation(args.file)
    vals = one_loop(tri, args.u, args.curve)
    taus = {k: v.tau for k, v in vals.items()}
    scale = max(1.0, *map(abs, taus.values()))
    agree = max(abs(a - b) for a in taus.values() for b in taus.values()) <= 1e-9 * scale
    rep.outputs = {"tau": taus[CONVENTIONS[0]], "by_convention": taus, "conventions_agree": agree}
    text = [f"tau = {taus[CONVENTIONS[0]]}"]
    if not agree:
        text += [f"tau[{k}] = {v}" for k, v in taus.items() if k != CONVENTIONS[0]]
    return "\n".join(text)


def _quad(args):
    from .partition_jones import ContourSpec

    return ContourSpec(nodes=args.nodes)


def cmd_partition(args, rep: RunReport):
    from .partition_jones import partition_log_modulus, predicted_modulus

    tri = _triangulation(args.file)
    alpha = resolve_alpha(tri, args.alpha)
    t0 = time.perf_counter()
    val = partition_log_modulus(tri, alpha, args.b, _quad(args))
    rep.timings["quadrature_ms"] = 1000 * (time.perf_counter() - t0)
    out = {"b": args.b, "log_modulus": val.log_modulus, "modulus": val.modulus, "shifts": val.shifts,
           "windows": val.windows, "alpha": alpha.angles}
    text = [f"|Z| = {fmt_float(val.modulus)}  (log {fmt_float(val.log_modulus)})"]
    if tri.has_curve("m"):
        pred = predicted_modulus(tri, alpha)
        out["predicted_modulus"] = pred.modulus(args.b)
        out["ratio"] = out["predicted_modulus"] / val.modulus
        text.append(f"predicted = {fmt_float(out['predicted_modulus'])}, ratio = {fmt_float(out['ratio'])}")
    rep.outputs = out
    return "\n".join(text)


def cmd_asympt(args, rep: RunReport):
    from .partition_jones import DEFAULT_SWEEP, fit_asymptotics, partition_log_modulus, predicted_modulus

    tri = _triangulation(args.file)
    alpha = resolve_alpha(tri, args.alpha)
    sweep = args.sweep or DEFAULT_SWEEP
    pred = predicted_modulus(tri, alpha) if tri.has_curve("m") else None
    vol = pred.volume if pred else None
    rows, samples = [], []
    for b in sweep:
        lz = partition_log_modulus(tri, alpha, b, _quad(args)).log_modulus
        samples.append((b, math.exp(lz)))
        pf = math.exp(lz + vol / (2 * math.pi * b * b)) if vol is not None else float("nan")
        rows.append([b, math.exp(lz), 2 * math.pi * b * b * lz, pf])
    out = {"samples": [dict(zip(("b", "modulus", "rate_partial", "prefactor_partial"), r)) for r in rows]}
    if len(samples) >= 4:
        fit = fit_asymptotics(samples, -vol if vol is not None else None, pred.prefactor if pred else None)
        out.update(fitted_rate=fit.fitted_rate, predicted_rate=fit.predicted_rate,
                   fitted_prefactor=fit.fitted_prefactor, predicted_prefactor=fit.predicted_prefactor)
    rep.outputs = out
    if args.csv:
        return render_csv(["b", "modulus", "rate_partial", "prefactor_partial"], rows).rstrip("\n")
    text = [f"b = {r[0]}: |Z| = {fmt_float(r[1])}, 2 pi b^2 log|Z| = {fmt_float(r[2])}" for r in rows]
    if "fitted_rate" in out:
        text.append(f"fitted rate = {fmt_float(out['fitted_rate'])}, fitted prefactor = {fmt_float(out['fitted_prefactor'])}")
    return "\n".join(text)


def cmd_jones(args, rep: RunReport):
    from .partition_jones import jones_function

    tri = _triangulation(args.file)
    alpha = resolve_alpha(tri, args.alpha)
    lj = jones_function(tri, args.x, args.b, _quad(args), alpha=alpha, log=True)
    rep.outputs = {"x": args.x, "b": args.b, "log_jones": lj, "modulus": math.exp(lj.real)}
    return f"J({args.x}) = {complex(np.exp(lj))}\nlog = {lj}"


def cmd_aj(args, rep: RunReport):
    from .partition_jones import aj_evaluate, parse_apolynomial

    tri = _triangulation(args.file)
    path = Path(args.poly)
    if not path.is_file():
        from .triangulation import preset_file

        try:
            path = preset_file(args.poly, ".apoly")
        except FileNotFoundError:
            raise InputError(f"{args.poly}: no such file or preset") from None
    try:
        poly = parse_apolynomial(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    worst, vals = aj_evaluate(poly, tri, samples=args.samples)
    divisible = worst < args.tol
    rep.outputs = {"max_abs": worst, "divisible": divisible, "values": vals}
    text = f"max |A(M, L)| = {worst:.3e} over {len(vals)} samples: {'vanishes' if divisible else 'does not vanish'}"
    if not divisible:
        raise Verdict(text)
    return text


def cmd_accept(args, rep: RunReport):
    from .acceptance import CRITERIA, run_suite

    only = [s.strip().upper() for s in args.only.split(",")] if args.only else None
    if only and any(i not in CRITERIA for i in only):
        raise InputError(f"--only: unknown criterion in {args.only!r}")
    try:
        results = run_suite(args.suite, only)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep.outputs = {r.id: {"passed": r.passed, "seconds": r.seconds, "documented": r.documented,
                          "details": r.details} for r in results}
    text = "\n".join(r.line() for r in results)
    if not all(r.passed for r in results):
        raise Verdict(text)
    return text


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON run report")
    common.add_argument("--threads", type=int, default=None, help="threads for the compiled kernels")
    tri = argparse.ArgumentParser(add_help=False, parents=[common])
    tri.add_argument("file", help="triangulation file or preset name")
    curve = argparse.ArgumentParser(add_help=False)
    curve.add_argument("--curve", default="l", help="peripheral curve of the holonomy target")
    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--alpha", default="max", help="angle structure: max, regular, slice:THETA, CSV or file")
    quad.add_argument("--nodes", type=int, default=200, help="quadrature nodes per axis")

    p = argparse.ArgumentParser(prog="famedkit", description="FAMED triangulations and their partition functions.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("parse", parents=[tri], help="summarize a triangulation")
    s.set_defaults(run=cmd_parse)
    s = sub.add_parser("matrices", parents=[tri], help="R, A, B, Q and G as exact rationals")
    s.set_defaults(run=cmd_matrices)
    s = sub.add_parser("famed", parents=[tri], help="FAMED certificate")
    s.add_argument("--drop-edge", default=None, help="edge class index or name left out of the system")
    s.add_argument("--convention", choices=("gpp-gp", "gpp-g"), default="gpp-gp")
    s.set_defaults(run=cmd_famed)
    s = sub.add_parser("volume", parents=[tri, curve], help="maximize the volume functional")
    s.add_argument("--slice", type=parse_floats, default=None, help="angular holonomy value(s) THETA[,THETA...]")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(run=cmd_volume)
    s = sub.add_parser("qdilog", parents=[common], help="Faddeev quantum dilogarithm with identity residuals")
    s.add_argument("--b", type=positive, required=True)
    s.add_argument("--z", type=parse_complex, required=True)
    s.set_defaults(run=cmd_qdilog)
    s = sub.add_parser("solve", parents=[tri, curve], help="solve the gluing equations")
    s.add_argument("--u", type=parse_complex, default=0j, help="holonomy target RE,IM")
    s.set_defaults(run=cmd_solve)
    s = sub.add_parser("sweep-u", parents=[tri, curve], help="follow the solution along a segment of u")
    s.add_argument("--from", dest="u_from", type=parse_complex, required=True)
    s.add_argument("--to", dest="u_to", type=parse_complex, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--csv", action="store_true", help="CSV output (the default without --json)")
    s.set_defaults(run=cmd_sweep_u)
    s = sub.add_parser("one-loop", parents=[tri, curve], help="1-loop invariant under both conventions")
    s.add_argument("--u", type=parse_complex, default=0j)
    s.set_defaults(run=cmd_one_loop)
    s = sub.add_parser("partition", parents=[tri, quad], help="modulus of the partition function")
    s.add_argument("--b", type=positive, required=True)
    s.set_defaults(run=cmd_partition)
    s = sub.add_parser("asympt", parents=[tri, quad], help="partition function over a b sweep with the fit")
    s.add_argument("--sweep", type=parse_floats, default=None)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(run=cmd_asympt)
    s = sub.add_parser("jones", parents=[tri, quad], help="Jones function at x")
    s.add_argument("--x", type=parse_complex, default=0j)
    s.add_argument("--b", type=positive, required=True)
    s.set_defaults(run=cmd_jones)
    s = sub.add_parser("aj", parents=[tri], help="evaluate an A-polynomial on the geometric branch")
    s.add_argument("--poly", required=True, help="polynomial file or preset name")
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(run=cmd_aj)
    s = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="desk")
    s.add_argument("--only", default=None, help="comma-separated criterion ids")
    s.set_defaults(run=cmd_accept)
    return p


def _math_errors() -> tuple[type[BaseException], ...]:
    from .angle_structures import OptimizationError
    from .geometry import SolverError, StripError
    from .kinematical import SingularA
    from .one_loop import FlatteningError
    from .partition_jones import FitError, QuadratureError

    return (Verdict, OptimizationError, SolverError, StripError, SingularA, FlatteningError, FitError, QuadratureError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("famedkit: --threads must be positive", file=sys.stderr)
            return EXIT_INPUT
        kernels.set_threads(args.threads)
    inputs = {k: v for k, v in vars(args).items() if k not in ("run", "json", "command")}
    rep = RunReport(args.command, inputs)
    status = EXIT_OK
    t0 = time.perf_counter()
    try:
        text = args.run(args, rep)
    except InputError as exc:
        print(f"famedkit {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _math_errors() as exc:
        status = EXIT_VERDICT
        text = str(exc)
        rep.outputs.setdefault("error", f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        print(f"famedkit {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep.timings["total_ms"] = 1000 * (time.perf_counter() - t0)
    if args.json:
        sys.stdout.write(rep.to_json())
    else:
        print(text, file=sys.stdout if status == EXIT_OK else sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
