"""Command-line front end.

Usage:
    alpharep figure --id 1 --alpha 1 --out fig1.csv      Figure data as CSV (+ .meta.json)
    alpharep matrix --alpha 0.5 --cutoff 12 --out m.csv  Displaced-basis coefficient matrix
    alpharep gate cz --a 1 --b 1 --out cz.json           Run a heralded gate
    alpharep selftest                                    Oracle and invariant checks

Exit status: 0 ok, 1 self-test failure, 2 invalid arguments, 3 numerical guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import alpha as arep
from . import gates
from .errors import AlphaRepError, TruncationRiskError, ZeroProbabilityBranch
from .figures import FIGURE_IDS, figure_table
from .selftest import format_table, run_selftest

EXIT_OK, EXIT_SELFTEST, EXIT_ARGS, EXIT_GUARD = 0, 1, 2, 3

FORMULAS = {
    1: "P_ln(alpha) = exp(-|alpha|^2) |c_ln(alpha)|^2, l = 1",
    2: "P_ln(alpha) = exp(-|alpha|^2) |c_ln(alpha)|^2, l = 3",
    3: "P_n(delta, r) = tanh(r)^(2n) N_n^2 exp(-sinh(r)^2 |delta|^2) / cosh(r)^2, "
       "N_n^2 = sum_l |delta|^(2l) n! / ((n-l)! (l!)^2)",
    4: "P_n+(alpha) = exp(-x) x^(n-1) |alpha - (n - x)|^2 / (2 n!), x = |alpha|^2",
    5: "P_n-(alpha) = exp(-x) x^(n-1) |alpha + (n - x)|^2 / (2 n!), x = |alpha|^2",
    7: "P_1(delta, s) / P_k(delta, s), k = 2..k_max",
}

GATE_FORMULAS = {
    "cz": "heralded control-sign: a|g>|0>(a1|0>+b1|1>) + b|-g>|0>(-a1|0>+b1|1>), a1 = -delta*/sqrt(1+|delta|^2)",
    "hadamard": "((a+b)/sqrt2)|Phi+> + ((a-b)/sqrt2)|Phi->",
    "macro-micro": "|0> x (a q+ + (-1)^n b q-), mode 0 projected on |n>",
    "reverse": "((a+b)/sqrt2)|tA> + ((a-b)/sqrt2)|-tA>, qubit mode projected on |1>",
}


class UsageError(Exception):
    pass


def num(x) -> str:
    """12 significant digits, '.' decimal point, no grouping."""
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        if z.imag == 0:
            return num(z.real)
        return f"{z.real:.12g}{z.imag:+.12g}j"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, float, complex, np.number)):
        return num(obj)
    return str(obj)


def read_config(path) -> dict:
    """Line-oriented ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def merge_config(args, casts: dict):
    """Fill flags left unset on the command line from ``--config``."""
    if not getattr(args, "config", None):
        return
    for key, value in read_config(args.config).items():
        if key not in casts:
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, casts[key](value))
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {value!r}") from exc


def parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(s)


def parse_cutoffs(s: str) -> tuple:
    return tuple(int(x) for x in s.replace(" ", "").split(",") if x)


def metadata(args, params: dict, formula: str) -> dict:
    meta = {"tool": "alpharep", "version": __version__, "command": args.command, "params": params, "formula": formula}
    if not args.no_timestamp:
        meta["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def write_text(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def dump_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def emit_table(args, header, rows, meta: dict):
    """CSV plus ``<out>.meta.json`` sidecar, or one JSON document."""
    cells = [[num(v) for v in row] for row in rows]
    if args.format == "json":
        text = dump_json({"metadata": meta, "columns": header, "rows": cells})
        if args.out:
            write_text(args.out, text)
        else:
            sys.stdout.write(text)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(cells)
    text = buf.getvalue()
    if args.out:
        write_text(args.out, text)
        write_text(str(args.out) + ".meta.json", dump_json(meta))
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_figure(args) -> int:
    merge_config(args, {"id": int, "alpha": complex, "delta": complex, "r": float, "k_max": int, "n_max": int})
    if args.id is None:
        raise UsageError("--id is required")
    if args.id not in FIGURE_IDS:
        raise UsageError(f"--id must be one of {FIGURE_IDS}")
    k_max = 7 if args.k_max is None else args.k_max
    n_max = 30 if args.n_max is None else args.n_max
    if k_max < 2 or n_max < 1:
        raise UsageError("--k-max must be >= 2 and --n-max >= 1")
    if args.r is not None and args.r <= 0:
        raise UsageError("--r must be > 0")
    alpha = None if args.alpha is None else _real_if_possible(args.alpha)
    delta = None if args.delta is None else _real_if_possible(args.delta)
    table = figure_table(args.id, alpha=alpha, delta=delta, r=args.r, k_max=k_max, n_max=n_max)
    params = {"id": args.id, "alpha": args.alpha, "delta": args.delta, "r": args.r, "k_max": k_max, "n_max": n_max}
    meta = metadata(args, params, FORMULAS[args.id])
    meta["table"] = table.meta
    meta["columns"] = table.header
    emit_table(args, table.header, table.rows, meta)
    return EXIT_OK


def _real_if_possible(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def cmd_matrix(args) -> int:
    merge_config(args, {"alpha": complex, "cutoff": int})
    if args.alpha is None or args.cutoff is None:
        raise UsageError("--alpha and --cutoff are required")
    if args.cutoff < 1:
        raise UsageError("--cutoff must be >= 1")
    m = arep.alpha_matrix(args.alpha, args.cutoff)
    header = ["l"]
    for n in range(args.cutoff):
        header += [f"re_c_l{n}", f"im_c_l{n}"]
    rows = []
    for l in range(args.cutoff):
        row = [l]
        for c in m.coeffs[l]:
            row += [c.real, c.imag]
        rows.append(row)
    params = {"alpha": args.alpha, "cutoff": args.cutoff}
    meta = metadata(args, params, "exp(-|alpha|^2/2) c_ln(alpha) = <n, alpha|l>")
    meta.update(
        prefactor=m.prefactor,
        guarded_rows=m.guarded_size(),
        unitarity_residual=m.unitarity_residual(),
        oracle_residual=m.oracle_residual(),
    )
    emit_table(args, header, rows, meta)
    return EXIT_OK


GATE_CASTS = {
    "s": float,
    "bs_r": float,
    "alpha": complex,
    "phi": float,
    "a": complex,
    "b": complex,
    "n": int,
    "T": float,
    "apd": parse_bool,
    "cutoffs": parse_cutoffs,
}


def cmd_gate(args) -> int:
    merge_config(args, GATE_CASTS)
    s = 0.1 if args.s is None else args.s
    bs_r = 0.05 if args.bs_r is None else args.bs_r
    phi = math.pi / 2 if args.phi is None else args.phi
    if args.alpha is not None:
        alpha = args.alpha
    else:
        alpha = math.sinh(s) * math.cosh(s) * (1 if args.kind == "cz" else -1)
    a = 1.0 if args.a is None else args.a
    b = 0.0 if args.b is None else args.b
    if a == 0 and b == 0:
        raise UsageError("control amplitudes a, b cannot both vanish")
    config = gates.GateConfig(s=s, bs_r=bs_r, phi=phi, alpha=alpha, cutoffs=args.cutoffs)
    control = gates.Qubit2.normalized(a, b)
    warnings = []
    if args.kind == "cz":
        report = gates.run_cz(config, control, apd=bool(args.apd))
    elif args.kind == "hadamard":
        report = gates.run_hadamard_hybrid(config, control)
    elif args.kind == "macro-micro":
        report = gates.run_hadamard_macro_micro(config, control, args.n)
    else:
        report = gates.run_reverse_hadamard(config, control, T=args.T)
    if args.apd and args.kind != "cz":
        warnings.append("--apd only affects the cz gate; ignored")
    warnings += report.warnings
    params = {
        **config.as_dict(),
        "a": control.a,
        "b": control.b,
        "n": args.n,
        "T": args.T,
        "apd": bool(args.apd),
    }
    doc = {
        "kind": args.kind,
        "params": params,
        "success_probability": report.success_probability,
        "fidelity": report.fidelity,
        "ideal_description": report.ideal_description,
        "warnings": warnings,
        "extras": report.extras,
        "metadata": {k: v for k, v in metadata(args, params, GATE_FORMULAS[args.kind]).items() if k != "params"},
    }
    text = dump_json(doc)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(inject_fault=args.inject_fault)
    print(format_table(results))
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_SELFTEST


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-timestamp", action="store_true", help="omit generated_at for byte-identical reruns")
    p.add_argument("--config", help="key = value parameter file; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alpharep", description="Displaced-number-state toolkit and gate simulator")
    parser.add_argument("--version", action="version", version=f"alpharep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="write figure data")
    p.add_argument("--id", type=int)
    p.add_argument("--alpha", type=complex)
    p.add_argument("--delta", type=complex)
    p.add_argument("--r", type=float)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    _common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("matrix", help="write the displaced-basis coefficient matrix")
    p.add_argument("--alpha", type=complex)
    p.add_argument("--cutoff", type=int)
    _common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("gate", help="run a heralded gate and write a JSON report")
    p.add_argument("kind", choices=tuple(GATE_FORMULAS))
    p.add_argument("--s", type=float)
    p.add_argument("--bs-r", dest="bs_r", type=float)
    p.add_argument("--alpha", type=complex)
    p.add_argument("--phi", type=float)
    p.add_argument("--a", type=complex)
    p.add_argument("--b", type=complex)
    p.add_argument("--n", type=int, help="photons measured in mode 0 (macro-micro)")
    p.add_argument("--T", type=float, help="transmissivity of the reverse splitter")
    p.add_argument("--apd", action="store_const", const=True, default=None, help="on/off detector herald (cz)")
    p.add_argument("--cutoffs", type=parse_cutoffs, help="comma-separated cutoffs of the four modes")
    _common(p)
    p.set_defaults(func=cmd_gate, format="json")

    p = sub.add_parser("selftest", help="run the oracle and invariant checks")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest, no_timestamp=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"alpharep: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (TruncationRiskError, ZeroProbabilityBranch) as exc:
        print(f"alpharep: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (AlphaRepError, ValueError) as exc:
        print(f"alpharep: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
