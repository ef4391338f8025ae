"""Command line interface.

Subcommands read a config file (see :mod:`spps.config`), run one
computation and print eigenvalues to stdout or write CSV.  Exit codes are 0
on success, 2 for bad configuration and 3 when a numerical method fails.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .darboux import darboux_chain, darboux_kernel
from .dirac import DiracSpec, dirac_solve
from .errors import ConvergenceError, InputError, SingularSolutionError, SppsError
from .expr import parse_potential_expr
from .grid import GridFn
from .powers import family_for_potential
from .roots import Disk
from .spectral import SLProblemSpec, WellSpec, char_polynomial, find_roots, magnitude_map, problem_family, solve_well
from .transmutation import Kernel2D, apply_kernel, cos_sin_kernels, goursat_kernel, kernel_constant_q, reparametrize_h

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
KERNEL_MODES = ("constant", "goursat", "reparam", "darboux", "chain", "apply")


def _num(v: float) -> str:
    return repr(float(v))


def format_eigenvalue(z: complex) -> str:
    return f"{z.real:.14e} {z.imag:.14e}"


def csv_text(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_num(v) for v in row) + "\n")
    return out.getvalue()


def functions_csv(x, named) -> str:
    """CSV with an ``x`` column and ``re_<name>, im_<name>`` per function."""
    header = ["x"]
    cols = [np.asarray(x, dtype=float)]
    for name, values in named:
        values = np.asarray(values, dtype=complex)
        header += [f"re_{name}", f"im_{name}"]
        cols += [values.real, values.imag]
    return csv_text(header, zip(*cols))


def kernel_csv(K: Kernel2D) -> str:
    meta = (f"a={_num(K.a)};nodes={K.nodes};h_re={_num(K.h.real)};h_im={_num(K.h.imag)};"
            f"domain={'half' if K.half else 'full'}")
    header = [meta]
    for j in range(K.nodes):
        header += [f"re[{j}]", f"im[{j}]"]
    inter = np.empty((K.nodes, 2 * K.nodes))
    inter[:, 0::2] = K.values.real
    inter[:, 1::2] = K.values.imag
    return csv_text(header, (np.concatenate([[xi], row]) for xi, row in zip(K.axis, inter)))


def read_kernel_csv(path) -> Kernel2D:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read kernel {path}: {exc}") from None
    try:
        meta = dict(item.split("=", 1) for item in lines[0].split(",", 1)[0].split(";"))
        a = float(meta["a"])
        nodes = int(meta["nodes"])
        h = complex(float(meta["h_re"]), float(meta["h_im"]))
        half = meta["domain"] == "half"
        data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        if data.shape != (nodes, 2 * nodes + 1):
            raise ValueError(f"expected {nodes} rows of {2 * nodes + 1} fields")
    except (KeyError, ValueError, IndexError) as exc:
        raise InputError(f"malformed kernel file {path}: {exc}") from None
    return Kernel2D(a, data[:, 1::2] + 1j * data[:, 2::2], h, half)


def _sl_spec(cfg: RunConfig) -> SLProblemSpec:
    return SLProblemSpec(
        a=cfg["a"], b=cfg["b"], q=cfg["q"], alpha=cfg["alpha"], beta1=cfg["beta1"], beta2=cfg["beta2"],
        beta1p=cfg["beta1p"], beta2p=cfg["beta2p"], phi_poly=cfg["phi_poly"], x0=cfg["x0"],
        N=cfg["N"], M=cfg["M"], convention=cfg["convention"], lambda0=cfg["lambda0"],
    )


def _eigen_lines(roots) -> str:
    return "".join(format_eigenvalue(z) + "\n" for z in roots)


def run_solve_sl(cfg: RunConfig, args) -> tuple[str, bool]:
    spec = _sl_spec(cfg)
    poly = char_polynomial(spec, problem_family(spec))
    center = cfg.get("region_center", poly.center)
    radius = cfg.get("region_radius", poly.trust_radius)
    return _eigen_lines(find_roots(poly, Disk(center, radius))), False


def run_solve_well(cfg: RunConfig, args) -> tuple[str, bool]:
    expr = parse_potential_expr(cfg["q"])
    left = cfg["left"]
    spec = WellSpec(cfg["alpha1"], cfg["alpha2"], cfg["width"], lambda x: expr(x + left),
                    N=cfg["N"], M=cfg["M"], scan=cfg["scan"])
    return _eigen_lines([complex(v) for v in solve_well(spec)]), False


def run_char_map(cfg: RunConfig, args) -> tuple[str, bool]:
    spec = _sl_spec(cfg)
    poly = char_polynomial(spec, problem_family(spec))
    rect = (cfg["re_min"], cfg["re_max"], cfg["im_min"], cfg["im_max"])
    re, im, vals = magnitude_map(poly, rect, cfg["nx"], cfg["ny"], threads=args.threads or 1)
    header = ["im\\re"] + [_num(r) for r in re]
    return csv_text(header, (np.concatenate([[y], row]) for y, row in zip(im, vals))), True


def run_powers(cfg: RunConfig, args) -> tuple[str, bool]:
    q = GridFn.from_function(parse_potential_expr(cfg["q"]), cfg["a"], cfg["b"], cfg["M"])
    x0 = cfg.get("x0", cfg["a"])
    fam = family_for_potential(q, q.node_index(x0), cfg["N"])
    named = [(f"phi{k}", fam.phi(k).values) for k in range(fam.N + 1)]
    named += [(f"psi{k}", fam.psi(k).values) for k in range(fam.N + 1)]
    return functions_csv(q.x, named), True


def run_kernel(cfg: RunConfig, args) -> tuple[str, bool]:
    mode = args.mode
    needs = {"constant": ["a"], "goursat": ["a"], "chain": [], "reparam": ["input", "h_new"],
             "darboux": ["input", "f"], "apply": ["input", "u"]}[mode]
    missing = [k for k in needs if cfg.get(k) is None]
    if missing:
        raise InputError(f"kernel {mode} needs keys: {', '.join(missing)}")
    nodes = cfg["nodes"]
    if mode == "constant":
        K = kernel_constant_q(cfg["c"], cfg["h"], cfg["a"], nodes)
    elif mode == "goursat":
        q = GridFn.from_function(parse_potential_expr(cfg["q"]), -cfg["a"], cfg["a"], cfg["M"])
        K = goursat_kernel(q, cfg["h"], nodes, tol=cfg["tol"])
    elif mode == "chain":
        K = darboux_chain(cfg["n_max"], cfg.get("a", 0.5), nodes)[-1]
    else:
        K = read_kernel_csv(cfg["input"])
        if mode == "reparam":
            K = reparametrize_h(K, cfg["h_new"])
        elif mode == "darboux":
            f = K.grid_fn(parse_potential_expr(cfg["f"])(K.axis))
            K = darboux_kernel(K, f)
        else:
            u = K.grid_fn(parse_potential_expr(cfg["u"])(K.axis))
            return functions_csv(K.axis, [("Tu", apply_kernel(K, u).values)]), True
    if cfg["kind"] != "full":
        Kc, Ks = cos_sin_kernels(K, cfg["h_c"])
        K = Kc if cfg["kind"] == "cos" else Ks
    return kernel_csv(K), True


def run_dirac(cfg: RunConfig, args) -> tuple[str, bool]:
    S = GridFn.from_function(parse_potential_expr(cfg["S"]), cfg["a"], cfg["b"], cfg["M"])
    spec = DiracSpec(cfg["m"], S, cfg["E"], cfg["C1"], cfg["C2"])
    sol = dirac_solve(spec, cfg["N"])
    return functions_csv(S.x, [("Psi1", sol.Psi1.values), ("Psi2", sol.Psi2.values)]), True


COMMANDS = {
    "solve-sl": run_solve_sl,
    "solve-well": run_solve_well,
    "char-map": run_char_map,
    "powers": run_powers,
    "kernel": run_kernel,
    "dirac": run_dirac,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spps", description="Spectral parameter power series solvers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "kernel":
            p.add_argument("mode", choices=KERNEL_MODES)
        p.add_argument("config", help="INI or JSON run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        if name != "kernel":
            p.add_argument("--N", type=int)
        p.add_argument("--M", type=int)
        if name == "kernel":
            p.add_argument("--tol", type=float)
        p.add_argument("--threads", type=int, default=1)
        if name == "char-map":
            for flag in ("re-min", "re-max", "im-min", "im-max"):
                p.add_argument(f"--{flag}", type=float)
            p.add_argument("--nx", type=int)
            p.add_argument("--ny", type=int)
    return parser


def _overrides(args) -> dict:
    keys = {"N": "N", "M": "M", "tol": "tol", "re_min": "re_min", "re_max": "re_max",
            "im_min": "im_min", "im_max": "im_max", "nx": "nx", "ny": "ny"}
    return {key: getattr(args, attr) for attr, key in keys.items() if getattr(args, attr, None) is not None}


def run_command(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise InputError("--threads must be at least 1")
        cfg = load_config(args.config, args.command).with_overrides(**_overrides(args))
        text, _ = COMMANDS[args.command](cfg, args)
    except InputError as exc:
        print(f"spps: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, SingularSolutionError, SppsError) as exc:
        print(f"spps: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"spps: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    try:
        code = run_command()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); drop the rest quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)
