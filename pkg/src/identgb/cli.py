"""Command-line interface: ``identgb <subcommand>``."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .bench import ORDERINGS, emit_report, run_bench
from .builtin import LIGHT, HEAVY, get_model, model_names
from .generator import generate
from .groebner import GBTimeout, buchberger, f4
from .groebner.field import DEFAULT_PRIME, check_prime
from .identifiability import DEFAULT_TIMEOUT, IdentConfig, identify, model_weights, standard_weights
from .model import ModelError, ParseError, format_model, parse_model
from .polysys import PolySystem
from .weights import WeightMap, compute_levels

EXIT_OK, EXIT_PARSE, EXIT_TIMEOUT, EXIT_INVARIANT = 0, 2, 3, 4


class InvariantViolation(RuntimeError):
    pass


def load_model(ref: str):
    """A path to a model file or the name of a builtin model."""
    if os.path.exists(ref):
        with open(ref) as fh:
            return parse_model(fh.read())
    return get_model(ref)


def _prime(text: str) -> int:
    try:
        return check_prime(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _bound(text: str):
    if text == "auto":
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("prolongation must be an integer or 'auto'") from None
    if k < 0:
        raise argparse.ArgumentTypeError("prolongation must be non-negative")
    return k


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_stats(path, stats):
    if path:
        with open(path, "w") as fh:
            json.dump(stats.to_json(), fh, indent=2)


# ---------------------------------------------------------------- subcommands


def cmd_parse(a):
    m = load_model(a.model)
    if a.output == "json":
        _emit(json.dumps({
            "name": m.name,
            "states": list(m.states),
            "params": list(m.params),
            "inputs": list(m.inputs),
            "odes": {x: m.odes[x].to_str() for x in m.states},
            "outputs": {y: g.to_str() for y, g in m.outputs},
        }, indent=2))
    else:
        _emit(format_model(m))
    return EXIT_OK


def _weights_of(m, a):
    if a.weights == "standard":
        return standard_weights(m, a.seed, a.prime)
    return model_weights(m, a.weights)


def cmd_weights(a):
    if a.weights == "none":
        a.weights = "standard"
    names = list(model_names()) if a.all else [a.model]
    if not a.all and a.model is None:
        raise ModelError("a model is required unless --all is given")
    out = {}
    for ref in names:
        m = load_model(ref)
        w = _weights_of(m, a)
        out[m.name] = {"weights": w.nontrivial(), "levels": dict(compute_levels(m).levels)}
    if a.output == "json":
        _emit(json.dumps(out if a.all else out[next(iter(out))], indent=2))
    else:
        for name, d in out.items():
            ws = ", ".join(f"{s}:{k}" for s, k in d["weights"].items()) or "(all 1)"
            _emit(f"{name}: {ws}")
    return EXIT_OK


def cmd_generate(a):
    m = load_model(a.model)
    ss = generate(m, prime=a.prime, seed=a.seed, bounds=a.prolongation, fix_nonidentifiable=not a.no_fix)
    S = ss.system
    if a.weights != "none" and a.strategy == "substitute":
        S = S.substitute_weights(model_weights(m, a.weights, ss.local))
    if a.output == "json":
        _emit(json.dumps({
            "model": m.name,
            "polys": S.num_polys,
            "vars": S.num_vars,
            "bounds": {m.outputs[i][0]: k for i, k in ss.bounds.items()},
            "fixed": ss.fixed,
            "local": sorted(ss.local),
            "system": S.to_text(),
        }, indent=2))
    else:
        _emit(S.to_text())
    return EXIT_OK


def _parse_weight_text(text: str) -> dict[str, int]:
    text = text.strip()
    if text.startswith("{"):
        return {k: int(v) for k, v in json.loads(text).items()}
    out = {}
    for item in re.split(r"[,\s]+", text):
        if not item:
            continue
        name, sep, k = item.replace(":", "=").partition("=")
        if not sep:
            raise ParseError(f"bad weight entry {item!r}", 1, 1)
        out[name.strip()] = int(k)
    return out


def cmd_gb(a):
    text = sys.stdin.read() if a.system == "-" else open(a.system).read()
    S = PolySystem.from_text(text)
    kind = {"degrevlex": "degrevlex", "diffdrl": "diff_degrevlex", "weighted": "weighted"}[a.ordering]
    if kind == "weighted":
        if a.weights_spec in (None, "auto"):
            m = get_model(S.name)
            ss = generate(m, prime=S.prime, seed=a.seed)
            w = model_weights(m, "standard", ss.local)
        else:
            w = WeightMap(_parse_weight_text(open(a.weights_spec).read()))
        o = S.ordering("weighted", S.variable_weights(w))
    else:
        o = S.ordering(kind)
    polys = S.to_fp(o)
    if a.engine == "buchberger":
        basis = buchberger(polys, S.ring(o))
        stats = None
    else:
        basis, stats = f4(polys, S.ring(o), timeout=a.timeout)
        _write_stats(a.stats_json, stats)
    if a.check and not basis.satisfies_certificate():
        raise InvariantViolation("basis fails the S-polynomial certificate")
    lines = sorted(S.format_poly(g.as_dict(), o) for g in basis)
    if a.output == "json":
        _emit(json.dumps({"basis": lines, "stats": stats.to_json() if stats else None}, indent=2))
    else:
        _emit("\n".join(lines))
    return EXIT_OK


def cmd_identify(a):
    m = load_model(a.model)
    cfg = IdentConfig(
        weights=a.weights,
        strategy=a.strategy,
        prime=a.prime,
        seed=a.seed,
        bounds=a.prolongation,
        timeout=DEFAULT_TIMEOUT if a.timeout is None else a.timeout,
    )
    r = identify(m, cfg)
    _write_stats(a.stats_json, r.stats)
    if a.output == "json":
        _emit(json.dumps(r.to_json(), indent=2))
    else:
        for s, v in r.verdicts.items():
            _emit(f"{s}: {v}")
        if not r.completed:
            _emit("# incomplete: Groebner basis computation timed out")
    for s, v in r.verdicts.items():
        if v == "global" and s not in r.local:
            raise InvariantViolation(f"{s} is global but not locally identifiable")
    return EXIT_OK if r.completed else EXIT_TIMEOUT


def cmd_bench(a):
    if a.models:
        models = a.models
    else:
        models = list(LIGHT) if a.tier == "light" else list(HEAVY) if a.tier == "heavy" else list(LIGHT + HEAVY)
    configs = a.orderings.split(",") if a.orderings else ["diff-degrevlex", "weighted"]
    for c in configs:
        if c not in ORDERINGS:
            raise ModelError(f"unknown ordering label {c!r}")
    rows = run_bench(models, configs, a.timeout, a.prime, a.seed, a.strategy)
    fmt = {"text": "text", "json": "json", "csv": "csv"}[a.output]
    sys.stdout.write(emit_report(rows, fmt).decode())
    if a.stats_json:
        with open(a.stats_json, "w") as fh:
            json.dump([{"model": r.model, "ordering": r.ordering, **r.stats} for r in rows], fh, indent=2)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=_prime, default=DEFAULT_PRIME)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--prolongation", type=_bound, default=None, metavar="N|auto")
    common.add_argument("--timeout", type=float, default=None, metavar="SEC")
    common.add_argument("--output", choices=("text", "json", "csv"), default="text")
    common.add_argument("--stats-json", default=None, metavar="PATH")

    wopts = argparse.ArgumentParser(add_help=False)
    wopts.add_argument("--weights", choices=("none", "standard", "inverted"), default="standard")
    wopts.add_argument("--strategy", choices=("substitute", "native"), default="substitute")

    p = argparse.ArgumentParser(prog="identgb", description="Weighted orderings for identifiability Groebner bases.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[common], help="parse and pretty-print a model")
    sp.add_argument("model", help="model file or builtin name")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("weights", parents=[common, wopts], help="print the weight table of a model")
    sp.add_argument("model", nargs="?")
    sp.add_argument("--all", action="store_true", help="every builtin model")
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("generate", parents=[common, wopts], help="print the specialized polynomial system")
    sp.add_argument("model")
    sp.add_argument("--no-fix", action="store_true", help="keep non-identifiable symbols as unknowns")
    sp.set_defaults(func=cmd_generate, weights="none")

    sp = sub.add_parser("gb", parents=[common], help="Groebner basis of a system file ('-' for stdin)")
    sp.add_argument("system")
    sp.add_argument("--ordering", choices=("degrevlex", "diffdrl", "weighted"), default="diffdrl")
    sp.add_argument("--weights", dest="weights_spec", default=None, metavar="FILE|auto")
    sp.add_argument("--engine", choices=("f4", "buchberger"), default="f4")
    sp.add_argument("--check", action="store_true", help="verify the S-polynomial certificate")
    sp.set_defaults(func=cmd_gb)

    sp = sub.add_parser("identify", parents=[common, wopts], help="identifiability verdicts")
    sp.add_argument("model")
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("bench", parents=[common, wopts], help="F4 counters with and without weights")
    sp.add_argument("models", nargs="*")
    sp.add_argument("--tier", choices=("light", "heavy", "all"), default="light")
    sp.add_argument("--orderings", default=None, help="comma-separated: " + ",".join(ORDERINGS))
    sp.set_defaults(func=cmd_bench, output="csv")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.func(a)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GBTimeout as exc:
        print("timeout: Groebner basis computation exceeded its deadline", file=sys.stderr)
        _write_stats(getattr(a, "stats_json", None), exc.stats)
        return EXIT_TIMEOUT
    except (InvariantViolation, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
