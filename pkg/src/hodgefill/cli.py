"""Command-line front end: deterministic reports over complex files.

Subcommands: ``mesh`` (torus generator), ``spectrum``, ``hodge``, ``norms``,
``fill``, ``scl``, ``verify-a``, ``diameter``, ``growth``, ``certify``.
Complexes are read in the line-oriented text format of the complexes module
(``--input -`` reads standard input, so ``mesh ... | hodgefill spectrum``
pipes).  Cycle files are line-oriented as well::

    # comment
    degree 1
    coef 17 1          # coefficient by cell index
    edge 3 5 -2        # same, addressed by oriented vertex pair

Exit codes: 0 on success, 2 on a validation error (bad input or flags), 3 on
a numerical failure, each with a one-line diagnostic on stderr.  Reports are
tab-separated (comma-separated for growth tables) with ``#`` header lines
recording the tool version, input digest, seed, quadrature order, and the
tolerance constants in effect; nothing host- or time-dependent is written,
and outputs are byte-identical across ``--threads`` settings.
"""

import argparse
import os
import sys
from fractions import Fraction

from .errors import (NumericalError, ValidationError, ParseError,
                     DegenerateClass)
from .reporting import (TOOL_VERSION, input_digest, report_text, write_report,
                        render_plot)

__all__ = ["main", "build_parser"]

# solver and check tolerances surfaced in report headers
_TOLERANCES = {
    "spectrum": (("tol_mass_symmetry", 1e-12),),
    "hodge": (("tol_component_orthogonality", 1e-10),),
    "norms": (("tol_dual_norm", 1e-12),),
    "fill": (("tol_cycle_residual", 1e-9), ("tol_witness_match", 1e-7)),
    "scl": (("tol_cycle_residual", 1e-9), ("tol_witness_match", 1e-7)),
    "verify-a": (("tol_step_slack", 1e-9), ("tol_coexact_residual", 1e-7)),
    "diameter": (),
    "growth": (("tol_limit_window", 1e-6),),
    "certify": (),
    "mesh": (),
}


def _pin_blas():
    """Single-thread the BLAS pools so identical configs rerun bit-exactly.

    The package's own ``--threads`` parallelism uses a deterministic
    reduction, so it stays enabled.
    """
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ.setdefault(var, "1")


def _headers(args, digest, extra=()):
    hdr = {"input_digest": digest, "seed": getattr(args, "seed", 0),
           "quad_order": getattr(args, "quad_order", 4)}
    mode = getattr(args, "mode", None)
    if mode:
        hdr["mode"] = mode
    lp = getattr(args, "lp", None)
    if lp:
        hdr["lp_mode"] = lp
    for key, val in _TOLERANCES.get(args.command, ()):
        hdr[key] = val
    for key, val in extra:
        hdr[key] = val
    return hdr


def _read_input(args):
    """Load (text, digest, complex, metric) from --input (``-`` = stdin)."""
    from .complexes import load_complex
    import io
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    K, metric = load_complex(io.StringIO(text))
    return text, input_digest(text), K, metric


def _whitney(args, K, metric):
    from .whitney import WhitneyStructure
    return WhitneyStructure(K, metric, quad_order=args.quad_order,
                            mode=args.mode, threads=args.threads)


def _load_cycle(path, K):
    """Parse a cycle file into a coefficient vector over the 1-cells."""
    import numpy as np
    pair_index = {}
    for e in range(K.n_simplices(1)):
        pair_index[K.subcell_vertices(1, e)] = e
    vals = np.zeros(K.n_simplices(1))
    degree = 1
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "degree":
                degree = int(tok[1])
                if degree != 1:
                    raise ParseError(f"line {ln}: only 1-cycles are supported")
            elif tok[0] == "coef":
                idx = int(tok[1])
                if not 0 <= idx < vals.size:
                    raise ParseError(f"line {ln}: cell index {idx} out of range")
                vals[idx] += float(Fraction(tok[2]))
            elif tok[0] == "edge":
                a, b, v = int(tok[1]), int(tok[2]), float(Fraction(tok[3]))
                key = (min(a, b), max(a, b))
                if key not in pair_index:
                    raise ParseError(f"line {ln}: no edge {{{a}, {b}}}")
                # stored edges run from smaller to larger vertex
                vals[pair_index[key]] += v if a < b else -v
            else:
                raise ParseError(f"line {ln}: unknown key {tok[0]!r}")
    return vals


# -- subcommands -----------------------------------------------------------


def cmd_mesh(args):
    from .geometry import torus_mesh
    from .complexes import dump_complex
    if args.torus < 3:
        raise ParseError("the text format needs --torus >= 3 (cells must be "
                         "determined by their vertices)")
    K, metric = torus_mesh(args.torus, args.dim, scale=args.scale)
    text = dump_complex(K, metric)
    write_report(text, args.out)
    return 0


def cmd_spectrum(args):
    from .whitney import coexact_gap
    text, digest, K, metric = _read_input(args)
    W = _whitney(args, K, metric)
    rows = []
    lam0, _ = coexact_gap(W, 0)
    rows.append(("coexact_gap_degree_0", lam0))
    if args.degree != 0:
        lam, _ = coexact_gap(W, args.degree)
        rows.append((f"coexact_gap_degree_{args.degree}", lam))
    out = report_text(_headers(args, digest), ("quantity", "value"), rows)
    write_report(out, args.out)
    return 0


def cmd_hodge(args):
    from .complexes import Cochain
    from .whitney import hodge_decompose
    from .norms import sample_vector
    text, digest, K, metric = _read_input(args)
    W = _whitney(args, K, metric)
    rows = []
    for k in range(K.dimension + 1):
        f = Cochain(k, sample_vector(K.n_simplices(k), args.seed, k))
        parts = hodge_decompose(W, f)
        h, e, c = parts.dims
        rows.append((k, h, e, c, h + e + c))
    out = report_text(_headers(args, digest),
                      ("degree", "harmonic_dim", "exact_dim", "coexact_dim",
                       "total"), rows)
    write_report(out, args.out)
    return 0


def cmd_norms(args):
    from .norms import compare_constants
    text, digest, K, metric = _read_input(args)
    W = _whitney(args, K, metric)
    reports = compare_constants(K, W, samples=args.samples, seed=args.seed,
                                degree=args.degree, complex_id=digest[:12])
    rows = [r.row() for r in reports]
    out = report_text(_headers(args, digest),
                      ("complex", "norm_pair", "samples", "max_ratio",
                       "constant", "seed"), rows)
    write_report(out, args.out)
    return 0


def _fill_rows(args, K, z, digest):
    from .isoperimetry import fill_norm
    cert = fill_norm(K, z, mode=args.lp, cycle_id=digest[:12])
    return cert, (cert.cycle_id, float(cert.value), cert.status, cert.mode,
                  cert.iterations, float(cert.witness_norm()))


def cmd_fill(args):
    if not args.cycle:
        raise ParseError("fill needs --cycle")
    text, digest, K, metric = _read_input(args)
    z = _load_cycle(args.cycle, K)
    cert, row = _fill_rows(args, K, z, input_digest(args.cycle))
    out = report_text(_headers(args, digest),
                      ("cycle", "fill", "status", "mode", "iterations",
                       "witness_norm"), [row])
    write_report(out, args.out)
    return 0


def cmd_scl(args):
    if not args.cycle:
        raise ParseError("scl needs --cycle")
    text, digest, K, metric = _read_input(args)
    z = _load_cycle(args.cycle, K)
    cert, row = _fill_rows(args, K, z, input_digest(args.cycle))
    rows = [(row[0], row[1], 4.0 * row[1], cert.mode)]
    out = report_text(_headers(args, digest),
                      ("cycle", "fill", "scl_upper", "mode"), rows)
    write_report(out, args.out)
    return 0


def cmd_verify_a(args):
    import numpy as np
    from .duality import DualComplex
    from .isoperimetry import theorem_a_verify, cellular_path_from_chain
    text, digest, K, metric = _read_input(args)
    W = _whitney(args, K, metric)
    D = DualComplex(K)
    if args.cycle:
        a = _load_dual_cycle(args.cycle, D)
        cycle_src = ("cycle_digest", input_digest(args.cycle))
    else:
        bd2 = D.dual_boundary(2)
        rng = np.random.default_rng(args.seed)
        u = np.zeros(bd2.shape[1])
        pick = rng.choice(bd2.shape[1], size=min(args.random_support,
                                                 bd2.shape[1]), replace=False)
        u[pick] = rng.integers(1, 3, size=pick.size) * rng.choice(
            [-1.0, 1.0], size=pick.size)
        a = bd2 @ u
        cycle_src = ("cycle_source", f"random_boundary_support_{pick.size}")
    gamma = cellular_path_from_chain(K, metric, D, a)
    rep = theorem_a_verify(K, W, D, gamma, samples=args.samples,
                           seed=args.seed)
    extra = [cycle_src] + sorted(rep.constants.items()) + [
        ("bound_constant", rep.bound_constant),
        ("scl_bound", rep.scl_bound)]
    rows = [(name, lhs, rhs, lhs <= rhs * (1 + 1e-9) + 1e-12)
            for name, lhs, rhs in rep.steps]
    out = report_text(_headers(args, digest, extra),
                      ("step", "lhs", "rhs", "holds"), rows)
    write_report(out, args.out)
    return 0


def _load_dual_cycle(path, D):
    """Cycle file over dual 1-cells (indexed like the primal 2-cells)."""
    import numpy as np
    vals = np.zeros(D.n_cells(1))
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "degree":
                if int(tok[1]) != 1:
                    raise ParseError(f"line {ln}: only 1-cycles are supported")
            elif tok[0] == "coef":
                idx = int(tok[1])
                if not 0 <= idx < vals.size:
                    raise ParseError(f"line {ln}: cell index {idx} out of range")
                vals[idx] += float(Fraction(tok[2]))
            else:
                raise ParseError(f"line {ln}: unknown key {tok[0]!r} "
                                 "(dual cycles are index-addressed)")
    return vals


def cmd_diameter(args):
    from .isoperimetry import graph_diameter
    text, digest, K, metric = _read_input(args)
    hops, weighted, ratio = graph_diameter(K, metric)
    rows = [(hops, weighted, ratio)]
    out = report_text(_headers(args, digest),
                      ("hops", "weighted", "ratio_to_volume"), rows)
    write_report(out, args.out)
    return 0


def cmd_growth(args):
    from .growth import growth_rate, decay_curve, DOMINANT_RATIO
    try:
        cls = tuple(float(Fraction(tok)) for tok in args.cls.split(","))
    except (ValueError, ZeroDivisionError) as ex:
        raise ParseError(f"bad --class value: {ex}")
    if len(cls) != 4:
        raise ParseError("--class needs four comma-separated integers")
    if args.plot and (not args.out or args.out == "-"):
        raise ParseError("--plot needs --out to place the figure "
                         "alongside the table")
    digest = input_digest(f"class={args.cls};n={args.n}")
    if args.decay:
        table = decay_curve(range(1, args.n + 1), _parse_constants(args.constants))
        extra = [("banner", table["banner"]), ("rate", table["rate"])]
        columns = ("n", "vol_proxy", "bound")
        rows = [tuple(r) for r in table["rows"]]
    else:
        rep = growth_rate(cls, args.n)
        if rep.degenerate:
            raise DegenerateClass(
                "class has no dominant eigencomponent; ratios do not "
                "converge to the growth rate")
        extra = [("class", args.cls), ("fitted_rate", rep.rate),
                 ("limit_ratio", rep.limit), ("limit_gap", rep.limit_gap),
                 ("dominant_ratio", DOMINANT_RATIO)]
        columns = ("n", "norm", "ratio")
        rows = rep.rows()
    out = report_text(_headers(args, digest, extra), columns, rows,
                      delimiter=",")
    write_report(out, args.out)
    if args.plot:
        ycol = "bound" if args.decay else "norm"
        render_plot(rows, list(columns), "n", [ycol],
                    os.path.splitext(args.out)[0] + ".png", logy=True)
    return 0


def _parse_constants(spec):
    out = {}
    if spec:
        for part in spec.split(","):
            key, _, val = part.partition("=")
            if not _:
                raise ParseError(f"bad --constants entry {part!r}")
            out[key.strip()] = float(val)
    return out


def cmd_certify(args):
    from .geometry import check_G_eps
    text, digest, K, metric = _read_input(args)
    rep = check_G_eps(K, metric, args.epsilon)
    rows = [(rep.epsilon, rep.epsilon0, rep.lower, rep.upper,
             len(rep.violations), rep.passed)]
    extra = [("note", note) for note in rep.notes]
    out = report_text(_headers(args, digest, extra),
                      ("epsilon", "epsilon0", "lower", "upper",
                       "violations", "passed"), rows)
    write_report(out, args.out)
    return 0


# -- parser ----------------------------------------------------------------


def _common(sub, cycle=False):
    sub.add_argument("--input", default="-",
                     help="complex file path, or - for stdin")
    sub.add_argument("--quad-order", type=int, default=4, dest="quad_order")
    sub.add_argument("--mode", choices=("standard", "smoothed"),
                     default="standard")
    sub.add_argument("--lp", choices=("float", "rational"), default="float")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    if cycle:
        sub.add_argument("--cycle", required=False, default=None,
                         help="cycle file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgefill",
        description="Whitney-form spectral gaps and LP filling norms on "
                    "geometric simplicial complexes")
    parser.add_argument("--version", action="version",
                        version=f"hodgefill {TOOL_VERSION}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("mesh", help="generate a flat torus mesh")
    p.add_argument("--torus", type=int, required=True, help="cells per side")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--scale", type=float, default=1.0,
                   help="lattice spacing (edge length of axis edges)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mesh)

    p = subs.add_parser("spectrum", help="function and coexact spectral gaps")
    _common(p)
    p.add_argument("--degree", type=int, default=1)
    p.set_defaults(func=cmd_spectrum)

    p = subs.add_parser("hodge", help="Hodge decomposition dimensions")
    _common(p)
    p.set_defaults(func=cmd_hodge)

    p = subs.add_parser("norms", help="norm comparison constants")
    _common(p)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_norms)

    p = subs.add_parser("fill", help="LP filling norm of a 1-cycle")
    _common(p, cycle=True)
    p.set_defaults(func=cmd_fill)

    p = subs.add_parser("scl", help="scl upper bound of a boundary cycle")
    _common(p, cycle=True)
    p.set_defaults(func=cmd_scl)

    p = subs.add_parser("verify-a", help="run the gap-to-scl inequality chain")
    _common(p, cycle=True)
    p.add_argument("--samples", type=int, default=48)
    p.add_argument("--random-support", type=int, default=16,
                   dest="random_support",
                   help="2-cells in the random boundary cycle when no "
                          "--cycle is given")
    p.set_defaults(func=cmd_verify_a)

    p = subs.add_parser("diameter", help="1-skeleton diameter report")
    _common(p)
    p.set_defaults(func=cmd_diameter)

    p = subs.add_parser("growth", help="symplectic iterate growth table")
    p.add_argument("--class", dest="cls", default="1,0,0,0",
                   help="four comma-separated integers")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--decay", action="store_true",
                   help="emit the gap decay-curve table instead")
    p.add_argument("--constants", default=None,
                   help="decay scale constants, e.g. D=1,K=2,C=1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true",
                   help="also render the table to a PNG next to --out")
    p.set_defaults(func=cmd_growth)

    p = subs.add_parser("certify", help="edge-length admissibility report")
    _common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_certify)

    return parser


def main(argv=None) -> int:
    _pin_blas()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except ValidationError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 2
    except NumericalError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 3
    except OSError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
