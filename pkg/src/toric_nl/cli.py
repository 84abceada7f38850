"""Command line interface. Every command prints one JSON envelope.

Exit codes: 0 success, 1 structural or parse error, 2 fan validation
failure, 3 class not ample, 4 unsupported dimension.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .cox import (
    CoxPolynomial,
    EmptyGradedPieceError,
    NotHomogeneousError,
    PolynomialSyntaxError,
    format_monomial,
    graded_basis,
    parse_polynomial,
    random_section,
)
from .divisor import anticanonical_class, is_ample_class, is_fano
from .fan import (
    Fan,
    FanStructureError,
    FanValidationError,
    checked,
    class_group,
    picard_number,
    validate_fan,
)
from .jacobian import (
    NotAmpleError,
    UnsupportedDimensionError,
    k3_hodge_summary,
    nl_check,
    primitive_hodge_dims,
)
from .quasismooth import DEFAULT_BUDGET, DEFAULT_PRIME, singular_witness_search

EXIT_OK, EXIT_STRUCTURE, EXIT_VALIDATION, EXIT_NOT_AMPLE, EXIT_DIMENSION = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, detail=None):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.detail = detail


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def load_fan_text(text: str) -> Fan:
    """Parse the fan JSON format: ``{"name"?, "dim", "rays", "cones"}``, cones 1-based."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_STRUCTURE, "parse_error",
                       f"line {exc.lineno}, column {exc.colno}: {exc.msg}",
                       {"line": exc.lineno, "column": exc.colno})
    if not isinstance(data, dict):
        raise CliError(EXIT_STRUCTURE, "structure_error", "fan file must hold a JSON object")
    missing = [k for k in ("dim", "rays", "cones") if k not in data]
    if missing:
        raise CliError(EXIT_STRUCTURE, "structure_error", f"fan file lacks {', '.join(missing)}")

    def int_lists(key):
        val = data[key]
        if not isinstance(val, list) or not all(
            isinstance(row, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in row)
            for row in val
        ):
            raise CliError(EXIT_STRUCTURE, "structure_error", f"{key!r} must be a list of integer lists")
        return val

    if not isinstance(data["dim"], int) or isinstance(data["dim"], bool):
        raise CliError(EXIT_STRUCTURE, "structure_error", "'dim' must be an integer")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise CliError(EXIT_STRUCTURE, "structure_error", "'name' must be a string")
    try:
        return Fan.from_data(data["dim"], int_lists("rays"), int_lists("cones"), name=name, one_based=True)
    except FanStructureError as exc:
        raise CliError(EXIT_STRUCTURE, "structure_error", str(exc))


def fan_to_json(fan: Fan) -> str:
    data = {"dim": fan.dim, "rays": [list(r) for r in fan.rays],
            "cones": [[i + 1 for i in c] for c in fan.cones]}
    if fan.name is not None:
        data = {"name": fan.name, **data}
    return json.dumps(data)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_STRUCTURE, "io_error", f"cannot read {path}: {exc.strerror}")


def _valid_fan(text: str) -> Fan:
    fan = load_fan_text(text)
    try:
        return checked(fan)
    except FanValidationError as exc:
        raise CliError(EXIT_VALIDATION, "validation_error", str(exc), exc.report.to_dict())


def _polynomial(fan: Fan, text: str) -> CoxPolynomial:
    try:
        terms = parse_polynomial(text, fan.n)
        return CoxPolynomial.from_terms(fan, terms)
    except PolynomialSyntaxError as exc:
        raise CliError(EXIT_STRUCTURE, "parse_error", str(exc),
                       {"line": exc.line, "column": exc.column})
    except (NotHomogeneousError, ValueError) as exc:
        raise CliError(EXIT_STRUCTURE, "structure_error", str(exc))


def _parse_class(fan: Fan, text: str):
    """``"2,2,2"`` or with torsion residues ``"4:1"``."""
    cg = class_group(fan)
    free_txt, _, tors_txt = text.partition(":")
    try:
        free = [int(x) for x in free_txt.split(",") if x.strip()]
        tors = [int(x) for x in tors_txt.split(",") if x.strip()]
        return cg.make(free, tors)
    except ValueError as exc:
        raise CliError(EXIT_STRUCTURE, "parse_error", f"bad class {text!r}: {exc}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fan(args, texts, warnings):
    fan = load_fan_text(texts["fan"])
    if args.action == "validate":
        report = validate_fan(fan)
        result = {"valid": report.ok, "report": report.to_dict()}
        if not report.ok:
            raise CliError(EXIT_VALIDATION, "validation_error", report.summary(), result)
        return result
    fan = _valid_fan(texts["fan"])
    if args.action == "picard":
        return {"picard": picard_number(fan)}
    cg = class_group(fan)
    return {
        "free_rank": cg.free_rank,
        "torsion": list(cg.torsion),
        "degree_map": [list(r) for r in cg.degree_map],
        "variable_degrees": [d.to_list() for d in cg.variable_degrees()],
        "anticanonical_class": anticanonical_class(fan).to_list(),
    }


def cmd_cox(args, texts, warnings):
    fan = _valid_fan(texts["fan"])
    beta = _parse_class(fan, args.degree)
    if args.action == "basis":
        basis = graded_basis(fan, beta)
        return {"class": beta.to_list(), "count": len(basis),
                "monomials": [format_monomial(m) for m in basis.monomials]}
    try:
        f = random_section(fan, beta, args.seed)
    except EmptyGradedPieceError as exc:
        raise CliError(EXIT_STRUCTURE, "empty_graded_piece", str(exc))
    text = f.to_text()
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    return {"class": beta.to_list(), "seed": args.seed, "terms": len(f), "polynomial": text}


def _ample_or_abort(fan, f, warnings):
    if f.degree.is_zero() or not (amp := is_ample_class(fan, f.degree)).ample:
        raise CliError(EXIT_NOT_AMPLE, "not_ample", f"class {f.degree} is not ample")
    if not amp.cartier:
        warnings.append(f"class {f.degree} is ample but its representative is not Cartier; "
                        "results are computed for the Q-Cartier class")
    return amp


def cmd_hodge(args, texts, warnings):
    fan = _valid_fan(texts["fan"])
    f = _polynomial(fan, texts["poly"])
    amp = _ample_or_abort(fan, f, warnings)
    summary = primitive_hodge_dims(fan, f, args.rank_method)
    result = {
        "class": f.degree.to_list(),
        "anticanonical_class": anticanonical_class(fan).to_list(),
        "cartier": amp.cartier,
        "hodge": summary.to_dict(),
        "k3": None,
    }
    if fan.dim == 3 and f.degree == anticanonical_class(fan) and is_fano(fan):
        result["k3"] = k3_hodge_summary(fan, f, args.rank_method).to_dict()
    return result


def cmd_nl_check(args, texts, warnings):
    fan = _valid_fan(texts["fan"])
    if fan.dim != 3:
        raise CliError(EXIT_DIMENSION, "unsupported_dimension",
                       f"the criterion is implemented for 3-dimensional fans, got {fan.dim}")
    f = _polynomial(fan, texts["poly"])
    _ample_or_abort(fan, f, warnings)
    try:
        witness = singular_witness_search(fan, f, prime=args.prime, budget=args.budget,
                                          seed=args.seed)
    except ValueError as exc:
        raise CliError(EXIT_STRUCTURE, "structure_error", str(exc))
    if witness.found:
        verdict = "input may be singular"
        warnings.append(f"singular point found over GF({args.prime}) at {list(witness.witness)}; "
                        "the input may not be quasi-smooth")
    else:
        verdict = "no singular point found"
        warnings.append("quasi-smoothness is checked heuristically over a finite field only")
    if witness.fell_back:
        warnings.append("exhaustive search exceeded the budget; randomized search was used")
    report = nl_check(fan, f, args.rank_method, shortcut=not args.no_shortcut)
    return {"quasismooth": witness.to_dict(), "verdict": verdict, "nl": report.to_dict()}


COMMANDS = {"fan": cmd_fan, "cox": cmd_cox, "hodge": cmd_hodge, "nl-check": cmd_nl_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-nl",
        description="Class groups, Jacobian rings and the Noether-Lefschetz test "
                    "for hypersurfaces in complete simplicial toric varieties.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="JSON output (the default)")
        p.add_argument("--pretty", action="store_true", help="render the envelope as text")

    p = sub.add_parser("fan", help="validate a fan, compute its class group or Picard number")
    p.add_argument("action", choices=["validate", "classgroup", "picard"])
    p.add_argument("fan_file")
    common(p)

    p = sub.add_parser("cox", help="graded monomial bases and random sections")
    p.add_argument("action", choices=["basis", "random"])
    p.add_argument("fan_file")
    p.add_argument("--class", dest="degree", required=True,
                   help="class as comma-separated free part, optionally ':' torsion residues")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="also write the random polynomial to this file")
    common(p)

    for name, helptext in (("hodge", "primitive Hodge numbers via the Jacobian ring"),
                           ("nl-check", "Noether-Lefschetz surjectivity criterion")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("fan_file")
        p.add_argument("poly_file")
        p.add_argument("--rank-method", choices=["exact", "modular"], default=None)
        if name == "nl-check":
            p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
            p.add_argument("--seed", type=int, default=0, help="seed for randomized search")
            p.add_argument("--no-shortcut", action="store_true",
                           help="always decide by rank computation")
        common(p)
    return parser


def _digest(args, texts) -> str:
    skip = {"json", "pretty", "output", "fan_file", "poly_file"}
    payload = {
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in skip},
        "files": {k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(texts.items())},
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run(argv=None) -> tuple[int, dict]:
    """Run a command; returns the exit code and the envelope."""
    args = build_parser().parse_args(argv)
    command = args.command + (f" {args.action}" if hasattr(args, "action") else "")
    warnings: list[str] = []
    envelope = {"command": command, "inputs_digest": None, "result": None,
                "warnings": warnings, "version": __version__}
    code = EXIT_OK
    try:
        texts = {"fan": _read(args.fan_file)}
        if hasattr(args, "poly_file"):
            texts["poly"] = _read(args.poly_file)
        envelope["inputs_digest"] = _digest(args, texts)
        envelope["result"] = COMMANDS[args.command](args, texts, warnings)
    except CliError as exc:
        code = exc.code
        envelope["error"] = {"kind": exc.kind, "message": str(exc), "detail": exc.detail}
    except NotAmpleError as exc:
        code = EXIT_NOT_AMPLE
        envelope["error"] = {"kind": "not_ample", "message": str(exc), "detail": None}
    except UnsupportedDimensionError as exc:
        code = EXIT_DIMENSION
        envelope["error"] = {"kind": "unsupported_dimension", "message": str(exc), "detail": None}
    return code, envelope


def render_pretty(env: dict) -> str:
    lines = [f"{env['command']}  (toric-nl {env['version']})"]

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v)):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {json.dumps(v)}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {json.dumps(v)}")

    if env.get("error"):
        lines.append(f"error ({env['error']['kind']}): {env['error']['message']}")
    if env.get("result") is not None:
        walk(env["result"], 1)
    for w in env["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def main(argv=None) -> int:
    code, env = run(argv)
    args_pretty = "--pretty" in (argv if argv is not None else sys.argv[1:])
    if args_pretty:
        print(render_pretty(env))
    else:
        print(json.dumps(env, sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
