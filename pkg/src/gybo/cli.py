"""Command-line front end.

Exit codes: 0 all checks pass, 1 verification mismatch, 2 usage error,
3 I/O or schema error, 4 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4
FLOAT_DIGITS = 12


class UsageError(Exception):
    pass


class SchemaError(Exception):
    pass


def _plain(obj):
    """Recursively convert to JSON-safe builtins with rounded floats."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        x = float(f"{x:.{FLOAT_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True)


def _complex(text: str) -> complex:
    """Parse ``1+2j`` or ``1+2i``."""
    return complex(re.sub(r"i$", "j", text.strip().replace(" ", "")))


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = _complex(value)
        except ValueError:
            raise UsageError(f"cannot parse value of --param {item!r}") from None
    return out


def _parse_tols(items) -> dict:
    from .ybe_verify import DEFAULT_TOLS

    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            name, value = "gybe", item
        if name not in DEFAULT_TOLS:
            raise UsageError(f"unknown tolerance {name!r}; choose from {sorted(DEFAULT_TOLS)}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"cannot parse tolerance {item!r}") from None
    return out


# --------------------------------------------------------------------------
# state files

def read_state(path: str):
    """Load a state file ``{"num_qubits": n, "amplitudes": [[re, im], ...]}``."""
    from .tensor_core import PureState

    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) != {"num_qubits", "amplitudes"}:
        raise SchemaError(f"{path}: expected an object with keys num_qubits and amplitudes")
    n, amps = data["num_qubits"], data["amplitudes"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"{path}: num_qubits must be a positive integer")
    if not isinstance(amps, list) or len(amps) != 2 ** n:
        raise SchemaError(f"{path}: amplitudes must list {2 ** n} entries")
    vec = []
    for i, a in enumerate(amps):
        if (not isinstance(a, list) or len(a) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in a)):
            line = _line_of_entry(text, i)
            raise SchemaError(f"{path}: line {line}: amplitude {i} must be [re, im]")
        vec.append(complex(a[0], a[1]))
    return PureState(n, vec)


def _line_of_entry(text: str, index: int) -> int:
    # best effort: line of the index-th inner "[" after the amplitudes key
    start = text.find('"amplitudes"')
    pos = text.find("[", start) + 1
    for _ in range(index + 1):
        nxt = text.find("[", pos)
        if nxt < 0:
            break
        pos = nxt + 1
    return text.count("\n", 0, pos) + 1


def write_state(state, path: str):
    data = {"num_qubits": state.num_qubits,
            "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


# --------------------------------------------------------------------------
# verify

def _verify_one(job):
    from .ybe_verify import verify_case

    cid, params, tols, seed, timings = job
    return verify_case(cid, params, tols, seed=seed, timings=timings).to_dict()


def _row(r: dict) -> dict:
    c = r["checks"]
    return {
        "case": r["case_id"],
        "gybe_residual": c.get("gybe_residual"),
        "spectrum_match": c.get("spectrum_match"),
        "diagonalizable": c.get("diagonalizable"),
        "unitarity_deviation": c.get("unitarity_deviation"),
        "class": c.get("slocc", {}).get("class"),
        "unitarizability": c.get("unitarizability", {}).get("verdict"),
        "passed": r["passed"],
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return "" if v is None else str(v)


def render(reports: list[dict], fmt: str) -> str:
    if fmt == "json":
        return dumps(reports)
    rows = [_row(r) for r in reports]
    cols = list(rows[0]) if rows else list(_row({"case_id": "", "checks": {}, "passed": True}))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue().rstrip("\n")
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(row[k]) for k in cols) + " |")
    for r in reports:
        for m in r["mismatches"]:
            lines.append(f"\n- {r['case_id']}: {m}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    from .operator_zoo import CASES

    if bool(args.all) == bool(args.case):
        raise UsageError("give either --all or at least one --case")
    ids = list(CASES) if args.all else args.case
    unknown = [c for c in ids if c not in CASES]
    if unknown:
        raise UsageError(f"unknown case id(s): {', '.join(unknown)}")
    params = _parse_params(args.param)
    tols = _parse_tols(args.tol)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    jobs = []
    for cid in ids:
        own = {k: v for k, v in params.items() if k in CASES[cid].free_params}
        if not args.all and set(params) - set(own):
            raise UsageError(f"case {cid} has no parameter(s) {sorted(set(params) - set(own))}")
        jobs.append((cid, own, tols, args.seed, args.timings))
    if args.jobs == 1 or len(jobs) == 1:
        reports = [_verify_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_one, jobs))  # map keeps submission order
    print(render(reports, args.format))
    failed = [r for r in reports if not r["passed"]]
    for r in failed:
        for m in r["mismatches"]:
            print(f"mismatch {r['case_id']}: {m}", file=sys.stderr)
    return EXIT_MISMATCH if failed else EXIT_OK


# --------------------------------------------------------------------------
# other subcommands

def cmd_classify(args) -> int:
    from .slocc import analyze_output

    state = read_state(args.path)
    if state.norm == 0:
        raise SchemaError(f"{args.path}: zero state")
    print(dumps(analyze_output(state, tau_tol=args.tau_tol)))
    return EXIT_OK


def cmd_search(args) -> int:
    from .search import get_family, minimize

    try:
        fam = get_family(args.family, args.n)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0])) from None
    try:
        start = [_complex(s) for s in args.start]
    except ValueError:
        raise UsageError(f"cannot parse start values {args.start}") from None
    if len(start) == 1 and len(fam.param_names) > 1:
        start = start * len(fam.param_names)
    if len(start) != len(fam.param_names):
        raise UsageError(f"family {fam.name} takes {len(fam.param_names)} start values")
    print(f"searching {fam.name} over {', '.join(fam.param_names)} from {args.start}",
          file=sys.stderr)
    res = minimize(fam, start, max_iter=args.max_iter)
    out = {"family": fam.name, "param_names": list(fam.param_names), **res.to_dict()}
    print(dumps(out))
    return EXIT_OK if res.converged else EXIT_NUMERIC


def cmd_probe(args) -> int:
    from .search import get_family, manifold_probe

    try:
        fam = get_family(args.family, args.n)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0])) from None
    res = manifold_probe(fam, args.samples, args.seed, tol=args.probe_tol)
    print(dumps(res.to_dict()))
    return EXIT_OK


def cmd_powers(args) -> int:
    from .ybe_verify import power_formula_check

    sign = {"+": 1, "-": -1, "+1": 1, "-1": -1}.get(args.sign)
    if sign is None:
        raise UsageError("sign must be + or -")
    print(f"comparing powers 1..{args.nmax}", file=sys.stderr)
    dev = power_formula_check(sign, args.nmax)
    print(dumps({"sign": sign, "nmax": args.nmax, "max_deviation": dev}))
    return EXIT_OK if dev < 1e-10 else EXIT_MISMATCH


def cmd_spectrum(args) -> int:
    from .operator_zoo import CASES, instantiate_case
    from .spectral import check_spectrum, eigen

    if args.case not in CASES:
        raise UsageError(f"unknown case id {args.case!r}")
    inst = instantiate_case(args.case, **_parse_params(args.param))
    ev = eigen(inst.R)
    out = {"case_id": args.case,
           "clusters": [{"value": c.value, "algebraic": c.algebraic, "geometric": c.geometric}
                        for c in ev.clusters],
           "diagonalizable": ev.diagonalizable, "max_residual": ev.max_residual}
    claim = CASES[args.case].claimed_spectrum(dict(inst.resolved_params))
    if claim is not None:
        sc = check_spectrum(inst.R, claim, eigenvalues=ev.eigenvalues)
        out["claimed"] = claim.to_dict()
        out["match"] = sc.ok
        out["scale"] = sc.scale
        out["max_deviation"] = sc.max_deviation
    print(dumps(out))
    return EXIT_OK if claim is None or out["match"] else EXIT_MISMATCH


def cmd_cases(args) -> int:
    from .operator_zoo import registry_listing

    print(dumps(registry_listing()))
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gybo", description=(
        "Construct generalized Yang-Baxter operators and check their claimed properties."))
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification pipeline on registered cases")
    v.add_argument("--case", action="append", help="case id (repeatable)")
    v.add_argument("--all", action="store_true", help="every registered case")
    v.add_argument("--tol", action="append", metavar="[NAME=]VALUE",
                   help="tolerance override; a bare value sets the gYBE tolerance")
    v.add_argument("--format", choices=("json", "markdown", "csv"), default="markdown")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--param", action="append", metavar="NAME=VALUE")
    v.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (breaks byte-identical output)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="SLOCC class of a state file")
    c.add_argument("path")
    c.add_argument("--tau-tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("search", help="minimize the gYBE residual over a family")
    s.add_argument("family")
    s.add_argument("--start", nargs="+", default=["0.3"])
    s.add_argument("--n", type=int, default=None, help="n for the Un family")
    s.add_argument("--max-iter", type=int, default=4000)
    s.set_defaults(func=cmd_search)

    pr = sub.add_parser("probe", help="sample a solution manifold")
    pr.add_argument("family")
    pr.add_argument("--samples", type=int, default=100)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--n", type=int, default=None)
    pr.add_argument("--probe-tol", type=float, default=1e-8)
    pr.set_defaults(func=cmd_probe)

    pw = sub.add_parser("powers", help="closed-form powers of the unitary W generator")
    pw.add_argument("sign")
    pw.add_argument("--nmax", type=int, default=12)
    pw.set_defaults(func=cmd_powers)

    sp = sub.add_parser("spectrum", help="eigenvalues and multiplicities of a case")
    sp.add_argument("case")
    sp.add_argument("--param", action="append", metavar="NAME=VALUE")
    sp.set_defaults(func=cmd_spectrum)

    ca = sub.add_parser("cases", help="list registered cases")
    ca.set_defaults(func=cmd_cases)
    return p


def main(argv=None) -> int:
    from .operator_zoo import BranchResolutionError, DomainError
    from .spectral import EigenSolverError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"gybo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, OSError) as exc:
        print(f"gybo: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EigenSolverError, BranchResolutionError) as exc:
        print(f"gybo: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
