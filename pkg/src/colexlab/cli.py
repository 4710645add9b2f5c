"""Command-line front end: ``colexlab <subcommand> ...``.

Exit codes: 0 success, 2 usage or validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from typing import Optional, Sequence

from . import __version__
from .code import CssCode, color_code, distance, from_descriptor, simplicial_code, to_descriptor, toric_code
from .decode import DecodingError, count_connected, grid_center, grid_graph, path_graph, peierls_bound
from .gates import (
    CodespaceError,
    StabilizerNotPreserved,
    apply_transversal_clifford,
    apply_transversal_rk,
    is_good_bruteforce,
    is_good_theorem,
)
from .lattice import build_hypercube_colex
from .thermal import ThermalModel, anneal_init, depolarize_overlap, estimate_p_crit, gibbs_exact

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
CSV_COLUMNS = ["model", "beta", "p", "L", "metric", "estimate", "stderr", "samples", "seed"]
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("COLEXLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"COLEXLAB_SEED must be an integer, got {env!r}") from None


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def build_code(family: str, D: int, d: Optional[int], L: Optional[int]) -> CssCode:
    """Construct a code from CLI parameters, validating them first."""
    _require(D >= 1, "--D must be at least 1")
    if family == "toric":
        d = 1 if d is None else d
        _require(L is not None and L >= 2, "toric codes need --L >= 2")
        _require(1 <= d <= D, f"--d must lie in 1..{D} for toric codes")
        return toric_code(D, d, L)
    if family == "color":
        d = 1 if d is None else d
        _require(0 <= d <= D, f"--d must lie in 0..{D}")
        return color_code(build_hypercube_colex(D), d)
    if family == "simplicial":
        d = max(D - 1, 1) if d is None else d
        _require(0 <= d <= D, f"--d must lie in 0..{D}")
        return simplicial_code(D, d)
    raise UsageError(f"unknown family {family!r}")


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model_name(family: str, D: int, d: Optional[int]) -> str:
    return f"{family}-D{D}" + ("" if d is None else f"-d{d}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args) -> int:
    code = build_code(args.family, args.D, args.d, args.L)
    desc = to_descriptor(code)
    text = json.dumps(desc, sort_keys=True) + "\n"
    if args.out:
        _write(text, args.out)
    dist = distance(code, args.w_max) if code.n <= args.max_distance_qubits else None
    dtext = str(dist) if dist is not None else f">{args.w_max}" if code.n <= args.max_distance_qubits else "?"
    print(f"[[{code.n},{code.k},{dtext}]]")
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_thermal(args) -> int:
    seed = resolve_seed(args.seed)
    _require(args.steps >= 1, "--steps must be positive")
    _require(args.chains >= 1 and args.threads >= 1, "--chains and --threads must be positive")
    _require(all(b >= 0 for b in args.beta), "--beta values must be non-negative")
    _require(all(0 <= p < 0.5 for p in args.p), "--p values must lie in [0, 1/2)")
    _require(args.burn_in is None or args.burn_in >= 0, "--burn-in must be non-negative")
    if args.descriptor:
        Ls = [None]
        name = os.path.splitext(os.path.basename(args.descriptor))[0]
    else:
        Ls = args.L if args.family == "toric" else [None]
        if args.family == "toric":
            _require(bool(Ls), "toric models need --L")
        name = _model_name(args.family, args.D, args.d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for L in Ls:
        code = _load_descriptor(args.descriptor) if args.descriptor else build_code(args.family, args.D, args.d, L)
        N = code.logical_z[0]
        for beta in args.beta:
            m = ThermalModel(code, beta)
            if args.p:
                for p in args.p:
                    r = depolarize_overlap(m, N, p, args.steps, args.burn_in, seed, args.chains, args.threads)
                    w.writerow([name, beta, p, L or "", "overlap", repr(r.estimate), repr(r.stderr), r.samples, seed])
            elif args.exact:
                w.writerow([name, beta, "", L or "", "p_crit_exact", repr(gibbs_exact(m, N)), repr(0.0), 0, seed])
            else:
                r = estimate_p_crit(m, N, args.steps, args.burn_in, seed, args.chains, args.threads)
                w.writerow([name, beta, "", L or "", "p_crit", repr(r.estimate), repr(r.stderr), r.samples, seed])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _load_descriptor(path: str) -> CssCode:
    try:
        with open(path) as fh:
            return from_descriptor(fh.read())
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read descriptor {path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"invalid descriptor {path}: {exc}") from None


def cmd_goodness(args) -> int:
    _require(args.D >= 1, "--D must be at least 1")
    _require(0 <= args.j <= args.D, f"--j must lie in 0..{args.D}")
    _require(args.k >= 0, "--k must be non-negative")
    if args.punctured:
        raise UsageError("goodness is defined on closed colexes; drop --punctured")
    cx = build_hypercube_colex(args.D)
    brute = is_good_bruteforce(cx, args.j, args.k, seed=resolve_seed(args.seed))
    theo = is_good_theorem(cx, args.j, args.k)
    report = {
        "version": SCHEMA_VERSION,
        "bruteforce": brute.to_dict(),
        "theorem": theo.to_dict(),
        "agree": brute.verdict == theo.verdict,
        "verdict": theo.verdict,
    }
    _write(json.dumps(report, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_anneal(args) -> int:
    _require(args.D >= 1 and 1 <= args.d <= args.D, "need 1 <= --d <= --D")
    _require(args.L >= 2, "--L must be at least 2")
    _require(args.beta >= 0, "--beta must be non-negative")
    _require(args.sweeps >= 1 and args.chains >= 1 and args.threads >= 1, "sweeps, chains and threads must be positive")
    rep = anneal_init(args.D, args.d, args.L, args.beta, args.sweeps, resolve_seed(args.seed), args.chains, args.burn_in, args.threads)
    out = {"version": SCHEMA_VERSION, "D": args.D, "d": args.d, "L": args.L, "beta": args.beta, **asdict(rep)}
    _write(json.dumps(out, sort_keys=True) + "\n", args.out)
    return EXIT_OK


_NAMED_CODES = {"steane": (2, 1), "15": (3, 2), "reed-muller": (3, 2)}


def cmd_gates(args) -> int:
    if args.code in _NAMED_CODES:
        D, d = _NAMED_CODES[args.code]
    else:
        _require(args.code == "simplicial", f"unknown code {args.code!r}")
        D, d = args.D, args.d
    code = build_code("simplicial", D, d, None)
    gate = args.gate
    report: dict = {"version": SCHEMA_VERSION, "code": args.code, "n": code.n, "gate": gate}
    if gate in ("X", "Z", "H", "R1", "CNOT"):
        try:
            upd = apply_transversal_clifford(code, gate)
            report.update(preserved=True, logical_action=upd.logical_action())
        except StabilizerNotPreserved as exc:
            report.update(preserved=False, reason=str(exc))
    elif gate.startswith("R") and gate[1:].isdigit():
        k = int(gate[1:])
        res = apply_transversal_rk(code, k, strict=False)
        report.update(preserved=res.preserved, leakage=round(res.leakage, 10), s=res.s, s_modulus=1 << (k + 1))
    else:
        raise UsageError(f"unsupported gate {gate!r}")
    _write(json.dumps(report, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_clusters(args) -> int:
    _require(args.l >= 1, "--l must be positive")
    size = args.size if args.size else 2 * args.l + 1
    if args.graph == "path":
        g, node = path_graph(size), size // 2
    elif args.graph in ("grid2d", "grid3d"):
        dim = 2 if args.graph == "grid2d" else 3
        g, node = grid_graph(dim, size), grid_center(dim, size)
    else:
        raise UsageError(f"unknown graph {args.graph!r}")
    count = count_connected(g, node, args.l, check=False)
    bound = float(2 ** (g.mu * args.l))  # exp(mu ln2 l)
    report = {"version": SCHEMA_VERSION, "graph": args.graph, "l": args.l, "mu": g.mu, "count": count, "bound": bound, "within_bound": count <= bound}
    if args.beta is not None:
        report["peierls"] = peierls_bound(args.gamma, args.nu, args.xi, args.L, args.lam, g.mu, args.beta, args.t_min)
    _write(json.dumps(report, sort_keys=True) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_model(p, toric_L_list: bool = False):
    p.add_argument("--family", choices=["toric", "color", "simplicial"], default="simplicial")
    p.add_argument("--D", type=int, default=2, help="lattice / colex dimension")
    p.add_argument("--d", type=int, default=None, help="brane dimension (toric) or color-code index")
    if toric_L_list:
        p.add_argument("--L", type=_ints, default=[], help="comma-separated side lengths (toric)")
    else:
        p.add_argument("--L", type=int, default=None, help="side length (toric)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="colexlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"colexlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a code and write its JSON descriptor")
    _add_model(p)
    p.add_argument("--w-max", type=int, default=3, help="distance search cap")
    p.add_argument("--max-distance-qubits", type=int, default=64, help="skip the distance search above this size")
    p.add_argument("--out", help="descriptor path (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("thermal", help="P_crit or depolarizing overlap over a parameter grid (CSV)")
    _add_model(p, toric_L_list=True)
    p.add_argument("--descriptor", help="JSON code descriptor to use instead of --family")
    p.add_argument("--beta", type=_floats, required=True, help="comma-separated inverse temperatures")
    p.add_argument("--p", type=_floats, default=[], help="comma-separated depolarizing strengths")
    p.add_argument("--steps", type=int, default=10_000, help="samples per grid point")
    p.add_argument("--burn-in", type=int, default=None, help="burn-in sweeps (default 100 n)")
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="exact enumeration instead of sampling")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("goodness", help="(j,k)-goodness certificates of a hypercube colex")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--punctured", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_goodness)

    p = sub.add_parser("anneal", help="initialization by switching off a Zeeman field")
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--sweeps", type=int, default=10_000)
    p.add_argument("--chains", type=int, default=200)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("gates", help="transversal gate check on a simplicial color code")
    p.add_argument("--code", default="steane", help="steane, 15, or simplicial (with --D/--d)")
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--gate", required=True, help="X, Z, H, R1, CNOT or Rk (k >= 1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gates)

    p = sub.add_parser("clusters", help="connected-set counting and the Peierls bound")
    p.add_argument("--graph", choices=["path", "grid2d", "grid3d"], required=True)
    p.add_argument("--l", type=int, required=True, help="set size")
    p.add_argument("--size", type=int, default=None, help="graph side (default 2l+1)")
    p.add_argument("--beta", type=float, default=None, help="evaluate the Peierls bound at this beta")
    p.add_argument("--t-min", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0, help="|Gamma_L|")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_clusters)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"colexlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, DecodingError, CodespaceError, RuntimeError, MemoryError) as exc:
        print(f"colexlab: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
