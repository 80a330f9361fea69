"""Command-line entry point: ``exmix <subcommand> ...``.

Exit codes: 0 success / check passed, 1 the mathematics says no (measure does
not represent the law, law not extendible, ...), 2 usage or input errors.
All rationals in output are ``"p/q"`` strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__
from .dyson import build_pair, build_w, verify_hompol
from .exactla import RatMatrix, SizeError, parse_rat, rat_to_str
from .extend import ExtensionProblem, extend_check, gaussian_extension_check
from .measureops import laplace, moment, validate_mixing
from .measures import (
    CylinderEvent,
    ExchangeableLaw,
    FunctionTable,
    SchemaError,
    SignedMixingMeasure,
)
from .mixing import FAMILIES, canonical_xi, cone_parametrize, psi_of_type, tv_norm, tv_sweep
from .typecomb import Alphabet, TypeVector, enumerate_types

FIXTURES = {
    "ex1-uniform-permutation": ("ex1.json", "verify --law fixtures/ex1.json --measure fixtures/nonu-i.json"),
    "nonu-i": ("nonu-i.json", "verify --law fixtures/ex1.json --measure fixtures/nonu-i.json"),
    "nonu-ii": ("nonu-ii.json", "verify --law fixtures/ex1.json --measure fixtures/nonu-ii.json"),
    "nonu-iii": ("nonu-iii.json", "verify --law fixtures/ex1.json --measure fixtures/nonu-iii.json"),
    "lastex1": ("lastex1.json", "extend --law fixtures/lastex1.json"),
    "lastex2": ("lastex2.json", "gauss-check --from fixtures/lastex2.json"),
}


class UsageError(Exception):
    """Operational failure; maps to exit code 2."""


def fixture_dir() -> Path:
    return Path(str(resources.files("exmix") / "fixtures"))


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and p.parts and p.parts[0] == "fixtures":
        bundled = fixture_dir().joinpath(*p.parts[1:])
        if bundled.exists():
            return bundled
    return p


def _read_json(path: str):
    p = _resolve(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _parse_inline(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _with_source(path: str, fn: Callable):
    try:
        return fn()
    except SchemaError as exc:
        raise UsageError(f"{path}: {exc}") from None


def load_law(path: str) -> ExchangeableLaw:
    data = _read_json(path)
    return _with_source(path, lambda: ExchangeableLaw.from_json(data))


def load_measure(path: str, alphabet: Alphabet | None = None) -> SignedMixingMeasure:
    data = _read_json(path)
    return _with_source(path, lambda: SignedMixingMeasure.from_json(data, alphabet))


def save_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def _values_table(data, path: str) -> dict[str, Fraction]:
    values = data.get("values", data) if isinstance(data, dict) else None
    if not isinstance(values, dict):
        raise UsageError(f"{path}: values: expected an object mapping symbols to rationals")
    out = {}
    for k, v in values.items():
        try:
            out[str(k)] = parse_rat(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"{path}: values.{k}: {exc}") from None
    return out


def _matrix_by_type(M: RatMatrix, types) -> dict:
    keys = [str(t) for t in types]
    return {r: {c: rat_to_str(v) for c, v in zip(keys, row)} for r, row in zip(keys, M.rows)}


# -- subcommands; each returns (result document, exit code) ------------------


def cmd_dyson(args) -> tuple[dict, int]:
    if args.n < 1 or args.d < 1:
        raise UsageError("--n and --d must be positive")
    out: dict = {"n": args.n, "d": args.d}
    code = 0
    if args.emit == "w" and not args.check:
        W = build_w(args.n, args.d)
        types = enumerate_types(args.n, args.d)
        out["index"] = [str(t) for t in types]
        out["W"] = _matrix_by_type(W, types)
        return out, 0
    pair = build_pair(args.n, args.d)
    out["index"] = [str(t) for t in pair.index]
    if args.emit in ("w", "both"):
        out["W"] = _matrix_by_type(pair.W, pair.index)
    if args.emit in ("m", "both"):
        out["M"] = _matrix_by_type(pair.M, pair.index)
    if args.check:
        report = verify_hompol(args.n, args.d)
        ident = RatMatrix.identity(pair.W.nrows)
        inverse_ok = pair.M @ pair.W == ident and pair.W @ pair.M == ident
        row_sums_ok = all(sum(r) == args.n**args.n for r in pair.W.rows)
        out["check"] = {"hompol": report.to_json(), "inverse": inverse_ok, "row_sums": row_sums_ok}
        code = 0 if report.passed and inverse_ok and row_sums_ok else 1
    return out, code


def cmd_mix(args) -> tuple[dict, int]:
    law = load_law(args.law)
    out: dict = {}
    if args.emit == "psi":
        if not args.type:
            raise UsageError("--emit psi needs --type")
        try:
            eps = TypeVector.parse(args.type)
        except ValueError as exc:
            raise UsageError(f"--type: {exc}") from None
        if eps.n != law.n or eps.d != law.d:
            raise UsageError(f"--type {args.type} is not a type of mass {law.n} over {law.d} symbols")
        measure = psi_of_type(build_pair(law.n, law.d), eps, law.alphabet)
        out["type"] = eps.to_json()
        out["psi"] = measure.to_json()
    else:
        measure = canonical_xi(law)
        out["xi"] = measure.to_json()
    if args.tv:
        out["tv"] = _tv_json(tv_norm(measure))
    if args.cone:
        values = _values_table(_read_json(args.cone), args.cone)
        missing = [s for s in law.alphabet.symbols if s not in values]
        if missing:
            raise UsageError(f"{args.cone}: no value for symbols {missing}")
        try:
            out["cone"] = cone_parametrize(measure, values, law.n).to_json()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return out, 0


def _tv_json(tv):
    if isinstance(tv, tuple):
        return {"lower": rat_to_str(tv[0]), "upper": rat_to_str(tv[1])}
    return rat_to_str(tv)


def cmd_verify(args) -> tuple[dict, int]:
    law = load_law(args.law)
    xi = load_measure(args.measure, law.alphabet)
    if xi.d != law.d:
        raise UsageError(f"measure has {xi.d} coordinates, law has {law.d} symbols")
    res = validate_mixing(xi, law)
    return res.to_json(), 0 if res.passed else 1


def cmd_moments(args) -> tuple[dict, int]:
    xi = load_measure(args.measure)
    data = _parse_inline(args.event, "--event")
    try:
        event = CylinderEvent.from_json(data)
        value = moment(xi, event)
    except SchemaError as exc:
        raise UsageError(f"--event: {exc}") from None
    return {"k": event.k, "sets": [sorted(s) for s in event.sets], "value": rat_to_str(value)}, 0


def cmd_laplace(args) -> tuple[dict, int]:
    xi = load_measure(args.measure)
    data = _read_json(args.f)
    table = _with_source(args.f, lambda: FunctionTable.from_json(data))
    if args.tolerance is not None:
        table = FunctionTable(table.values, args.tolerance)
    res = _with_source(args.f, lambda: laplace(xi, table))
    out = {"value": res.value, "error_bound": res.error_bound, "tolerance": res.tolerance}
    return out, 0 if res.within_tolerance else 1


def cmd_tv_sweep(args) -> tuple[dict, int]:
    if args.n_max < 1:
        raise UsageError("--n-max must be positive")
    return tv_sweep(args.family, args.n_max).to_json(), 0


def cmd_extend(args) -> tuple[dict, int]:
    law = load_law(args.law)
    target = args.target
    if target is None:
        target = _read_json(args.law).get("target")
        if not isinstance(target, int):
            raise UsageError("--target is required (the law file has no integer 'target')")
    try:
        res = extend_check(ExtensionProblem(law, target))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"n": law.n, "target": target, **res.to_json()}, 0 if res.extendible else 1


def cmd_gauss_check(args) -> tuple[dict, int]:
    raw = list(args.epsilon or [])
    if args.source:
        data = _read_json(args.source)
        eps = data.get("epsilon") if isinstance(data, dict) else None
        raw += eps if isinstance(eps, list) else [eps]
    if not raw:
        raise UsageError("give --epsilon or --from")
    results = []
    for text in raw:
        try:
            e = parse_rat(text)
            check = gaussian_extension_check(e)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"epsilon {text!r}: {exc}") from None
        results.append({"epsilon": rat_to_str(e), **check.to_json()})
    code = 1 if any(r["status"] == "inconsistent" for r in results) else 0
    return {"checks": results}, code


def cmd_cone(args) -> tuple[dict, int]:
    xi = load_measure(args.measure)
    values = _values_table(_read_json(args.values), args.values)
    missing = [s for s in xi.alphabet.symbols if s not in values]
    if missing:
        raise UsageError(f"{args.values}: no value for symbols {missing}")
    try:
        cone = cone_parametrize(xi, values, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = cone.to_json()
    out["total_mass"] = rat_to_str(cone.total_mass())
    return out, 0


def cmd_fixtures(args) -> tuple[dict, int]:
    if args.show:
        if args.show not in FIXTURES:
            raise UsageError(f"unknown fixture {args.show!r}; see 'fixtures --list'")
        return json.loads((fixture_dir() / FIXTURES[args.show][0]).read_text()), 0
    if args.dump:
        target = Path(args.dump)
        target.mkdir(parents=True, exist_ok=True)
        for fname, _ in FIXTURES.values():
            (target / fname).write_text((fixture_dir() / fname).read_text())
    return {
        "fixtures": [{"name": name, "file": f"fixtures/{fname}", "reproduce": cmd} for name, (fname, cmd) in FIXTURES.items()]
    }, 0


# -- output -------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, list) and all(isinstance(x, (str, int)) for x in v):
        sep = "; " if any("," in str(x) for x in v) else ", "
        return "(" + sep.join(map(str, v)) + ")"
    return v if isinstance(v, str) else json.dumps(v)


def _grid(header: list[str], rows: list[list[str]], indent: str) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    fmt = lambda cells: (indent + "  ".join(c.ljust(w) for c, w in zip(cells, widths))).rstrip()
    return [fmt(header)] + [fmt(r) for r in rows]


def _render(obj: dict, indent: str = "") -> list[str]:
    lines = []
    for key, value in obj.items():
        if isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
            cols = list(dict.fromkeys(k for r in value for k in r))
            lines.append(f"{indent}{key}:")
            lines += _grid(cols, [[_cell(r.get(c, "")) for c in cols] for r in value], indent + "  ")
        elif isinstance(value, dict) and value and all(isinstance(r, dict) for r in value.values()):
            cols = list(dict.fromkeys(k for r in value.values() for k in r))
            if all(not isinstance(v, (dict, list)) for r in value.values() for v in r.values()):
                lines.append(f"{indent}{key}:")
                rows = [[str(name)] + [_cell(r.get(c, "")) for c in cols] for name, r in value.items()]
                lines += _grid([""] + cols, rows, indent + "  ")
            else:
                lines.append(f"{indent}{key}:")
                lines += _render(value, indent + "  ")
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines += _render(value, indent + "  ")
        else:
            lines.append(f"{indent}{key}: {_cell(value)}")
    return lines


def render_table(result: dict) -> str:
    """Aligned text rendering of a result document."""
    return "\n".join(_render(result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exmix", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "table"), default="json")
    # also accepted after the subcommand; SUPPRESS keeps the global value otherwise
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[fmt])

    p = add("dyson", help="multinomial Dyson matrix W and its inverse M")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--emit", choices=("w", "m", "both"), default="both")
    p.add_argument("--check", action="store_true", help="rank, M W = W M = I, row sums n**n")
    p.set_defaults(func=cmd_dyson)

    p = add("mix", help="canonical mixing measure (or per-type psi) of a law")
    p.add_argument("--law", required=True)
    p.add_argument("--emit", choices=("xi", "psi"), default="xi")
    p.add_argument("--type", help='type vector for --emit psi, e.g. "1,1"')
    p.add_argument("--tv", action="store_true")
    p.add_argument("--cone", metavar="VALUES_JSON")
    p.set_defaults(func=cmd_mix)

    p = add("verify", help="does a measure represent a law exactly?")
    p.add_argument("--law", required=True)
    p.add_argument("--measure", required=True)
    p.set_defaults(func=cmd_verify)

    p = add("moments", help="moment functional C_k of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--event", required=True, help='e.g. \'{"sets": [["1"], ["2"]]}\'')
    p.set_defaults(func=cmd_moments)

    p = add("laplace", help="Laplace functional of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_laplace)

    p = add("tv-sweep", help="TV norm of canonical measures for n = 1..N")
    p.add_argument("--family", choices=FAMILIES, default="uniform_permutation")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_tv_sweep)

    p = add("extend", help="exact extendibility of a law to N coordinates")
    p.add_argument("--law", required=True)
    p.add_argument("--target", type=int)
    p.set_defaults(func=cmd_extend)

    p = add("gauss-check", help="Gaussian extension check for variances 1+epsilon")
    p.add_argument("--epsilon", action="append")
    p.add_argument("--from", dest="source", metavar="JSON")
    p.set_defaults(func=cmd_gauss_check)

    p = add("cone", help="sorted-cone coordinates of an atomic measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_cone)

    p = add("fixtures", help="bundled example files")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--show", metavar="NAME")
    g.add_argument("--dump", metavar="DIR")
    p.set_defaults(func=cmd_fixtures)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        result, code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except SizeError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except SchemaError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if args.format == "table":
        if args.command == "fixtures" and not args.show:
            print("\n".join(f["name"] for f in result["fixtures"]), file=stdout)
        else:
            print(render_table(result), file=stdout)
    else:
        doc = {"header": {"tool": "exmix", "version": __version__}, "command": args.command, "result": result}
        print(json.dumps(doc, indent=2), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
