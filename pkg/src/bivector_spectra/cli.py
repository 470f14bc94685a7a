"""Command-line front end: ``bivector-spectra {analyze,decompose,rotor,verify}``.

Exit codes: 0 success, 1 numerical failure, 2 Jordan-type or unsupported
input, 3 parse error. ``--json`` switches to a versioned JSON document.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .algebra import (Multivector, Signature, Tolerance, format_multivector,
                      parse_multivector)
from .decomp import decompose, eigen_pairs
from .errors import (GAError, GradeError, JordanesqueError, NonInvertible,
                     NumericalFailure, ParseError, RequiresEigenPairing, SignatureMismatch,
                     Undefined, Unsupported)
from .rotor import cayley, exp_bivector, exp_simple, tangent_decomposition
from .spectral import spectrum
from .verify import SUITES

SCHEMA = "bivector-spectra/1"

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_UNSUPPORTED = 2
EXIT_PARSE = 3


# -- JSON with 17 significant digits ------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if all(ch not in s for ch in ".en"):
        s += ".0"
    return s


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON; floats keep 17 significant digits, complex numbers
    become ``{"re": .., "im": ..}``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": float(obj.real), "im": float(obj.imag)}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cnum(z) -> complex | float:
    z = complex(z.real + 0.0, z.imag + 0.0)  # drop negative zeros
    return z.real if z.imag == 0 else z


def _fmt_c(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return format(z.real, ".17g")
    if z.real == 0:
        return format(z.imag, ".17g") + "i"
    return f"{z.real:.17g}{z.imag:+.17g}i"


# -- report builders ----------------------------------------------------------

def _analysis(B: Multivector, tol: Tolerance) -> dict:
    spec = spectrum(B, tol)
    ladder = spec.ladder
    report = {
        "input": format_multivector(B),
        "signature": str(B.sig),
        "k": spec.k,
        "effective_dimension": spec.effective_dimension,
        "is_pseudo_null": spec.is_pseudo_null,
        "ladder": [{"j": j, "grade": 2 * j, "value": format_multivector(W)}
                   for j, W in enumerate(ladder.W)],
        "char_poly": {"c": [_cnum(x) for x in spec.charpoly.c],
                      "q": [_cnum(x) for x in spec.q_coeffs]},
        "spectrum": [{"mu": _cnum(mu), "multiplicity": m} for mu, m in spec.pairs],
    }
    return report, spec


def _classify(B, spec, tol) -> tuple[str, list[str]]:
    warnings = []
    if spec.is_pseudo_null:
        label = "pseudo-null"
    else:
        label = "regular"
    if any(m > 1 for mu, m in spec.pairs if mu != 0):
        try:
            eigen_pairs(B, spec, tol)
            warnings.append("repeated eigenvalues: decomposition parts are not unique")
        except JordanesqueError as exc:
            label = "jordanesque"
            warnings.append(f"Jordan-type adjoint action: {exc}")
    return label, warnings


def cmd_analyze(B: Multivector, tol: Tolerance, args) -> tuple[dict, int]:
    report, spec = _analysis(B, tol)
    label, warnings = _classify(B, spec, tol)
    report["classification"] = label
    report["warnings"] = warnings
    return report, EXIT_OK


def _part_json(p) -> dict:
    return {"b": format_multivector(p.b), "mu": _cnum(p.mu), "method": p.method,
            "square": _cnum((p.b * p.b).scalar_part), "is_real": p.is_real}


def cmd_decompose(B: Multivector, tol: Tolerance, args) -> tuple[dict, int]:
    report, spec = _analysis(B, tol)
    dec = decompose(B, tol, spec)
    report["parts"] = [_part_json(p) for p in dec.parts]
    report["residual"] = dec.residual
    return report, EXIT_OK


def cmd_rotor(B: Multivector, tol: Tolerance, args) -> tuple[dict, int]:
    report = {"input": format_multivector(B), "signature": str(B.sig), "method": args.method}
    if args.method == "cayley":
        R = cayley(B, tol)
    else:
        R = exp_bivector(B, tol)
        if R.method == "exp":
            dec = decompose(B, tol)
            report["factors"] = [format_multivector(exp_simple(p.b, tol).value)
                                 for p in dec.parts]
        if R.error_bound is not None:
            report["series_error_bound"] = R.error_bound
    report["construction"] = R.method
    report["rotor"] = format_multivector(R.value)
    report["norm_residual"] = R.norm_residual()
    try:
        s, T = tangent_decomposition(R, tol)
        report["tangent"] = {"scalar": _cnum(s), "T": format_multivector(T)}
    except Undefined as exc:
        report["tangent"] = {"error": str(exc)}
    return report, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    records = []
    for name in names:
        count = args.count if args.count is not None else DEFAULT_COUNTS[name]
        for rec in SUITES[name](args.seed, count, args.max_dim):
            d = rec.to_json()
            d["suite"] = name
            records.append(d)
    ok = all(r["pass"] for r in records)
    report = {"suite": args.suite, "seed": args.seed, "max_dim": args.max_dim,
              "pass": ok, "report": records}
    return report, EXIT_OK if ok else EXIT_NUMERICAL


DEFAULT_COUNTS = {"ch": 500, "simplicial": 10, "spectral": 200}


# -- text output ----------------------------------------------------------------

def _print_text(cmd: str, report: dict, out):
    if cmd == "verify":
        width = max(len(r["check"]) for r in report["report"]) if report["report"] else 5
        print(f"{'suite':<11}{'signature':<10}{'check':<{width + 2}}max_residual  pass", file=out)
        for r in report["report"]:
            print(f"{r['suite']:<11}{r['signature']:<10}{r['check']:<{width + 2}}"
                  f"{r['max_residual']:<14.3e}{'yes' if r['pass'] else 'NO'}", file=out)
        print(f"overall: {'PASS' if report['pass'] else 'FAIL'}", file=out)
        return
    print(f"signature  {report['signature']}", file=out)
    print(f"input      {report['input']}", file=out)
    if "spectrum" in report:
        print(f"k          {report['k']} (effective dimension "
              f"{report['effective_dimension']})", file=out)
        print(f"null part  {'yes' if report['is_pseudo_null'] else 'no'}", file=out)
        for row in report["ladder"]:
            print(f"  W{row['j']:<2} {row['value']}", file=out)
        q = report["char_poly"]["q"]
        print("Q_k coeffs " + ", ".join(_fmt_c(x) for x in q), file=out)
        print("spectrum   " + ", ".join(f"+-{_fmt_c(s['mu'])} (x{s['multiplicity']})"
                                        for s in report["spectrum"]), file=out)
    if "classification" in report:
        print(f"class      {report['classification']}", file=out)
        for w in report["warnings"]:
            print(f"warning    {w}", file=out)
    if "parts" in report:
        print("parts", file=out)
        for p in report["parts"]:
            print(f"  [{p['method']}] mu={_fmt_c(p['mu'])}  b = {p['b']}", file=out)
        print(f"residual   {report['residual']:.3e}", file=out)
    if "rotor" in report:
        print(f"rotor      {report['rotor']}  ({report['construction']})", file=out)
        for f in report.get("factors", []):
            print(f"  factor   {f}", file=out)
        print(f"|R~R - 1|  {report['norm_residual']:.3e}", file=out)
        t = report["tangent"]
        if "error" in t:
            print(f"tangent    undefined: {t['error']}", file=out)
        else:
            print(f"tangent    <R>_0 = {_fmt_c(t['scalar'])}, T = {t['T']}", file=out)


# -- entry point ----------------------------------------------------------------

def _error_code(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, (JordanesqueError, Unsupported, RequiresEigenPairing, GradeError,
                        SignatureMismatch, Undefined)):
        return EXIT_UNSUPPORTED
    return EXIT_NUMERICAL


def _error_body(exc: BaseException) -> dict:
    code = getattr(exc, "code", "error")
    body = {"code": code, "message": str(exc), "paper_note": getattr(exc, "note", "")}
    if isinstance(exc, JordanesqueError):
        body["evidence"] = {
            "spectrum": [{"mu": _cnum(mu), "multiplicity": m} for mu, m in exc.spectrum or []],
            "eigenvector_counts": {_fmt_c(_cnum(k)): {"plus": v[0], "minus": v[1], "multiplicity": v[2]}
                                   for k, v in exc.eigenvector_counts.items()},
        }
    return body


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bivector-spectra",
        description="Spectra, invariant decompositions and rotors of bivectors.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--tol", type=float, default=1e-10,
                        help="relative zero tolerance (default 1e-10)")
    expr = argparse.ArgumentParser(add_help=False)
    expr.add_argument("--sig", required=True, help="signature as p,q,r")
    expr.add_argument("expr", nargs="?", help="bivector expression, e.g. 'e12 + 2*e34'")
    expr.add_argument("--expr", dest="expr_opt", help="bivector expression")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common, expr], help="wedge ladder and spectrum")
    sub.add_parser("decompose", parents=[common, expr], help="invariant decomposition")
    rot = sub.add_parser("rotor", parents=[common, expr], help="rotor from a bivector")
    rot.add_argument("--method", choices=["exp", "cayley"], default="exp")
    ver = sub.add_parser("verify", parents=[common], help="randomised identity checks")
    ver.add_argument("--suite", choices=["ch", "simplicial", "spectral", "all"], default="all")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--count", type=int, default=None,
                     help="samples (ch, spectral) or bivectors per signature (simplicial)")
    ver.add_argument("--max-dim", type=int, default=6)
    return parser


COMMANDS = {"analyze": cmd_analyze, "decompose": cmd_decompose, "rotor": cmd_rotor}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    tol = Tolerance(rel_eps=args.tol)
    try:
        if args.command == "verify":
            report, code = cmd_verify(args)
        else:
            text = args.expr_opt if args.expr_opt is not None else args.expr
            if text is None:
                parser.error("a bivector expression is required")
            if args.expr_opt is not None and args.expr is not None:
                parser.error("give the expression either positionally or with --expr")
            try:
                sig = Signature.parse(args.sig)
            except ValueError as exc:
                raise ParseError(f"bad signature {args.sig!r}: {exc}") from exc
            B = parse_multivector(text, sig)
            if not B.is_bivector(tol):
                raise GradeError(f"expected a bivector, got grades {sorted(B.grades_present)}")
            report, code = COMMANDS[args.command](B, tol, args)
    except (GAError, NonInvertible, NumericalFailure) as exc:
        code = _error_code(exc)
        body = _error_body(exc)
        if args.json:
            print(to_json({"schema": SCHEMA, "command": args.command, "error": body}), file=out)
        else:
            print(f"error [{body['code']}]: {body['message']}", file=err)
            if body["paper_note"]:
                print(f"note: {body['paper_note']}", file=err)
        return code
    if args.json:
        print(to_json({"schema": SCHEMA, "command": args.command, **report}), file=out)
    else:
        _print_text(args.command, report, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
