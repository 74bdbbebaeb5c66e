"""Command line interface: ``contrakit <command> ...``.

Modules are given as JSON, either by invariants or by a relation matrix::

    {"invariants": {"rank": 1, "torsion": [12]}}
    {"presentation": [[2, 0], [0, 3]]}
    {"presentation": [], "ngens": 2}

Atom expressions use the printed grammar (``"Prod{all}[Zp^1] + Z/4"``).
Every command prints one JSON document (or a text rendering of it).  The
exit status is 0 on success, 1 when a verification check fails and 2 on a
usage, schema or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib.metadata import PackageNotFoundError, version

from .acceptance import CRITERIA, SCALES, verify_all
from .atoms.cotorsion import UnknownCorpusEntry, cotorsion_envelope, envelope_report, flat_cover_corpus
from .atoms.expr import ParseError, parse
from .atoms.matlis import NotPPrimary, duality_report, matlis_dual
from .atoms.rules import classify, flags_atoms
from .fpmod import FPModule
from .functors import (
    cech_complex, check_properties, delta_multi, delta_s, gamma_I, gamma_s, lambda_s, to_atoms,
)
from .padlab.lab import SCENARIOS, run_scenario
from .reports import dumps, jsonable


class SchemaError(ValueError):
    """A JSON payload that does not match the expected shape; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UsageError(ValueError):
    pass


def tool_version() -> str:
    try:
        return version("contrakit")
    except PackageNotFoundError:
        return "unknown"


# ---------------------------------------------------------------------------
# payload parsing


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    return value


def module_from_json(text: str) -> FPModule:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object with 'invariants' or 'presentation'")
    if "invariants" in data:
        inv = data["invariants"]
        if not isinstance(inv, dict):
            raise SchemaError("$.invariants", "expected an object")
        rank = _int(inv.get("rank", 0), "$.invariants.rank")
        if rank < 0:
            raise SchemaError("$.invariants.rank", "must be nonnegative")
        torsion = inv.get("torsion", [])
        if not isinstance(torsion, list):
            raise SchemaError("$.invariants.torsion", "expected a list")
        for i, d in enumerate(torsion):
            if _int(d, f"$.invariants.torsion[{i}]") < 2:
                raise SchemaError(f"$.invariants.torsion[{i}]", f"invariant {d} must be at least 2")
        return FPModule.from_invariants(rank, torsion)
    if "presentation" in data:
        rows = data["presentation"]
        if not isinstance(rows, list):
            raise SchemaError("$.presentation", "expected a list of rows")
        width = None
        for i, row in enumerate(rows):
            if not isinstance(row, list):
                raise SchemaError(f"$.presentation[{i}]", "expected a list of integers")
            for j, x in enumerate(row):
                _int(x, f"$.presentation[{i}][{j}]")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise SchemaError(f"$.presentation[{i}]", f"expected {width} entries, got {len(row)}")
        ngens = data.get("ngens")
        if ngens is not None:
            _int(ngens, "$.ngens")
            if width is not None and ngens != width:
                raise SchemaError("$.ngens", f"disagrees with the row width {width}")
        if not rows and ngens is None:
            raise SchemaError("$.ngens", "required when the presentation has no rows")
        return FPModule(rows, ngens)
    raise SchemaError("$", "expected 'invariants' or 'presentation'")


def _key_values(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            raise UsageError(f"value of {k} must be an integer") from None
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_functor(args) -> tuple[dict, bool]:
    name = args.name
    gens = args.gens
    if name == "cech":
        if not gens:
            raise UsageError("cech needs --gens")
        return {"complex": cech_complex(gens)}, True
    m = _module(args)
    if name == "delta-multi":
        if not gens:
            raise UsageError("delta-multi needs --gens")
        cert = {}
        value = delta_multi(m, gens, cert)
        ok = cert["order_independent"] and cert["equals_gcd"] and cert.get("equals_product", True)
        return {"output_atoms": str(value), "certificate": cert}, ok
    if name == "gamma" and gens:
        sub, incl, cert = gamma_I(m, gens)
        return {"output": str(sub), "inclusion": incl, "certificate": cert}, cert["iterated_equals_kernel"]
    s = _need_s(args)
    if name == "gamma":
        sub, incl = gamma_s(m, s)
        return {"output": str(sub), "output_atoms": str(to_atoms(sub)), "inclusion": incl}, True
    if name == "lambda":
        cert = {}
        return {"output_atoms": str(lambda_s(m, s, cert)), "certificate": cert}, cert.get("stable", True)
    if name == "delta":
        cert = {}
        value, adj = delta_s(m, s, cert)
        ok = all(cert.get(k, True) for k in ("lim1_certified", "agree", "lambda_stable",
                                              "power_series_truncation"))
        return {"output_atoms": str(value), "adjunction": adj, "certificate": cert}, ok
    raise UsageError(f"unknown functor {name!r}")


def cmd_check(args):
    m = _module(args)
    flags = check_properties(m, _need_s(args))
    return {"module": str(m), "s": flags.s, "flags": flags.flags, "witnesses": flags.witnesses}, True


def cmd_envelope(args):
    m = _module(args)
    env, mapd, coker = cotorsion_envelope(m)
    rep = envelope_report(m)
    return {"envelope": str(env), "map": mapd, "cokernel": coker, "report": rep}, rep.passed


def cmd_cover(args):
    try:
        rep = flat_cover_corpus(args.cover_name, args.precision)
    except UnknownCorpusEntry as exc:
        raise UsageError(f"unknown corpus entry {exc.args[0]!r}") from None
    return {"report": rep}, rep.passed


def cmd_dual(args):
    m = _module(args)
    try:
        dual = matlis_dual(m)
    except NotPPrimary as exc:
        raise UsageError(str(exc)) from None
    rep = duality_report(m)
    return {"dual": str(dual), "report": rep}, rep.passed


def cmd_classify(args):
    x = parse(args.atoms)
    c = classify(x)
    return {"input": str(x), "classification": c, "flags": flags_atoms(x)}, True


def cmd_lab(args):
    params = _key_values(args.params)
    params.setdefault("seed", args.seed)
    try:
        rep = run_scenario(args.scenario, **params)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return {"report": rep}, rep.passed


def cmd_verify(args):
    only = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    if only and any(i not in CRITERIA for i in only):
        raise UsageError(f"criteria must be among {sorted(CRITERIA)}")
    results = verify_all(args.seed, args.scale, only)
    return {"scale": args.scale, "criteria": [r.to_json(timing=False) for r in results],
            "seconds": {str(r.index): round(r.seconds, 3) for r in results}}, \
        all(r.passed for r in results)


def _module(args) -> FPModule:
    if args.module is None:
        text = sys.stdin.read()
        if not text.strip():
            raise UsageError("a module is required (--module or standard input)")
        return module_from_json(text)
    return module_from_json(args.module)


def _need_s(args) -> int:
    if args.s is None:
        raise UsageError("--s is required")
    return args.s


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    mod = _Parser(add_help=False)
    mod.add_argument("--module", help="module JSON; read from standard input when omitted")

    parser = _Parser(prog="contrakit", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    f = sub.add_parser("functor", parents=[common, mod], help="Gamma, Lambda, Delta and Cech data")
    f.add_argument("name", choices=("gamma", "lambda", "delta", "delta-multi", "cech"))
    f.add_argument("--s", type=int)
    f.add_argument("--gens", type=lambda t: [int(x) for x in t.split(",")])
    f.set_defaults(run=cmd_functor)

    c = sub.add_parser("check", parents=[common, mod], help="the six s-adic properties")
    c.add_argument("--s", type=int)
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("envelope", parents=[common, mod], help="cotorsion envelope")
    e.set_defaults(run=cmd_envelope)

    cv = sub.add_parser("cover", parents=[common], help="verify a corpus flat cover or envelope")
    cv.add_argument("--name", dest="cover_name", required=True)
    cv.add_argument("--precision", type=int, default=12)
    cv.set_defaults(run=cmd_cover)

    d = sub.add_parser("dual", parents=[common, mod], help="Matlis dual of a finite p-group")
    d.set_defaults(run=cmd_dual)

    k = sub.add_parser("classify", parents=[common], help="normal form of an atom expression")
    k.add_argument("atoms")
    k.set_defaults(run=cmd_classify)

    lab = sub.add_parser("lab", parents=[common], help="sequence and summation experiments")
    lab.add_argument("scenario", choices=SCENARIOS)
    lab.add_argument("params", nargs="*", help="key=value integers: p, N, M, K, trials")
    lab.set_defaults(run=cmd_lab)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    v.add_argument("--scale", choices=SCALES, default="desk")
    v.add_argument("--criteria", help="comma separated criterion numbers")
    v.set_defaults(run=cmd_verify)
    return parser


def render_text(doc: dict) -> str:
    lines = []

    def walk(prefix, x):
        if isinstance(x, dict):
            for k in sorted(x):
                walk(f"{prefix}.{k}" if prefix else k, x[k])
        elif isinstance(x, list) and x and all(isinstance(v, dict) for v in x):
            for i, v in enumerate(x):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(x)}")

    walk("", doc)
    return "\n".join(lines)


def run(argv=None) -> tuple[int, dict]:
    """Parse, dispatch and return ``(exit status, report document)``."""
    parser = build_parser()
    start = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a command is required")
        result, ok = args.run(args)
    except (UsageError, SchemaError, ParseError) as exc:
        doc = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SchemaError):
            doc["path"] = exc.path
        if isinstance(exc, ParseError):
            doc["position"] = getattr(exc, "position", None)
        return 2, doc
    request = {k: v for k, v in vars(args).items() if k not in ("run", "format")}
    doc = {"request": request, "result": jsonable(result), "pass": ok, "seed": args.seed,
           "version": tool_version(), "timing": round(time.perf_counter() - start, 3)}
    return (0 if ok else 1), doc


def main(argv=None) -> int:
    status, doc = run(argv)
    fmt = "json"
    if argv is None:
        argv = sys.argv[1:]
    if "--format" in argv:
        i = argv.index("--format")
        if i + 1 < len(argv):
            fmt = argv[i + 1]
    out = sys.stderr if status == 2 else sys.stdout
    print(render_text(doc) if fmt == "text" else dumps(doc), file=out)
    return status


if __name__ == "__main__":
    sys.exit(main())
