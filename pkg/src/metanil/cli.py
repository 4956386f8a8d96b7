"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse error (word text or JSON),
3 domain error, 4 verification failure.  Specs and data are passed as JSON:
inline, as @path, or as '-' for stdin.
"""

from __future__ import annotations

import argparse
import json
import sys

from .autos import (
    GenInnerData,
    apply_endo,
    apply_gen_inner,
    compose_endo,
    compose_gen_inner,
    gen_inner_from_json,
    gen_inner_to_json,
    gen_inner_to_spec,
    invert_gen_inner,
    invert_ia,
    is_inner,
    spec_from_json,
    spec_to_json,
)
from .core import collect_text, element_from_text, element_to_json
from .normality import NotGeneralizedInner, synthesize_gen_inner
from .verify import SUITES, CliConfig, oracle_selftest, verify_paper
from .words import DomainError, GroupParams, ParseError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _payload(arg: str | None) -> str:
    if arg is None or arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def _load_json(arg: str | None) -> dict:
    text = _payload(arg)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos)
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", 0)
    return obj


def _load_map(arg: str | None, params: GroupParams):
    """An automorphism payload: AutoSpec ('images') or pair data ('pairs')."""
    obj = _load_json(arg)
    if "images" in obj:
        return spec_from_json(obj, params)
    if "pairs" in obj:
        return gen_inner_from_json(obj, params)
    raise ParseError("payload must contain 'images' or 'pairs'", 0)


def build_parser() -> _ArgumentParser:
    top = _ArgumentParser(prog="metanil", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--rank", type=int, default=2, help="number of generators")
        p.add_argument(
            "--class", dest="nilclass", type=int, default=3, help="nilpotency class"
        )
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("nf", help="canonical form of a word")
    common(p)
    p.add_argument("word")

    p = sub.add_parser("eq", help="decide equality of two words in the group")
    common(p)
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("apply", help="apply an automorphism payload to an element")
    common(p)
    p.add_argument("spec", help="JSON payload (inline, @file or -)")
    p.add_argument("element", help="word or element JSON")

    p = sub.add_parser("compose", help="compose two automorphism payloads (g o f)")
    common(p)
    p.add_argument("spec_g")
    p.add_argument("spec_f")

    p = sub.add_parser("invert", help="invert an IA spec or pair data")
    common(p)
    p.add_argument("spec")

    p = sub.add_parser("is-inner", help="decide whether an IA spec is a conjugation")
    common(p)
    p.add_argument("spec")

    p = sub.add_parser(
        "synthesize",
        help="decide generalized-inner-ness and synthesize witness data",
    )
    common(p)
    p.add_argument("spec")

    p = sub.add_parser("oracle-selftest", help="kernel audit and oracle agreement")
    common(p)

    p = sub.add_parser("verify-paper", help="run a pinned verification suite")
    common(p)
    p.add_argument(
        "--suite",
        choices=sorted(SUITES) + ["all"],
        default="all",
    )
    return top


def _emit_report(rep, as_json: bool) -> int:
    if as_json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        print("\n".join(rep.lines()))
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _run(args) -> int:
    params = GroupParams(args.rank, args.nilclass)
    cfg = CliConfig(
        rank=args.rank,
        nilclass=args.nilclass,
        json_out=args.json,
        seed=args.seed,
        samples=args.samples,
    )
    cmd = args.command

    if cmd == "nf":
        elt = collect_text(args.word, params)
        print(json.dumps(element_to_json(elt)) if args.json else str(elt))
        return EXIT_OK

    if cmd == "eq":
        lhs = collect_text(args.word1, params)
        rhs = collect_text(args.word2, params)
        same = lhs == rhs
        if args.json:
            print(json.dumps({"equal": same}))
        else:
            print("equal" if same else "not equal")
        return EXIT_OK

    if cmd == "apply":
        mapping = _load_map(args.spec, params)
        x = element_from_text(_payload(args.element), params)
        if isinstance(mapping, GenInnerData):
            img = apply_gen_inner(mapping, x)
        else:
            img = apply_endo(mapping, x)
        print(json.dumps(element_to_json(img)) if args.json else str(img))
        return EXIT_OK

    if cmd == "compose":
        g = _load_map(args.spec_g, params)
        f = _load_map(args.spec_f, params)
        if isinstance(g, GenInnerData) and isinstance(f, GenInnerData):
            comp = compose_gen_inner(g, f)
            print(json.dumps(gen_inner_to_json(comp), indent=None))
        else:
            gs = gen_inner_to_spec(g) if isinstance(g, GenInnerData) else g
            fs = gen_inner_to_spec(f) if isinstance(f, GenInnerData) else f
            print(json.dumps(spec_to_json(compose_endo(gs, fs))))
        return EXIT_OK

    if cmd == "invert":
        mapping = _load_map(args.spec, params)
        if isinstance(mapping, GenInnerData):
            print(json.dumps(gen_inner_to_json(invert_gen_inner(mapping))))
        else:
            print(json.dumps(spec_to_json(invert_ia(mapping))))
        return EXIT_OK

    if cmd == "is-inner":
        mapping = _load_map(args.spec, params)
        if isinstance(mapping, GenInnerData):
            mapping = gen_inner_to_spec(mapping)
        u = is_inner(mapping)
        if args.json:
            print(
                json.dumps(
                    {
                        "inner": u is not None,
                        "conjugator": None if u is None else element_to_json(u),
                    }
                )
            )
        else:
            print("not inner" if u is None else f"inner: conjugation by {u}")
        return EXIT_OK

    if cmd == "synthesize":
        mapping = _load_map(args.spec, params)
        if isinstance(mapping, GenInnerData):
            mapping = gen_inner_to_spec(mapping)
        res = synthesize_gen_inner(mapping)
        if isinstance(res, NotGeneralizedInner):
            if args.json:
                print(json.dumps(res.to_json()))
            else:
                print(
                    "not generalized inner: witness generator "
                    f"{res.witness_generator}, layer {res.layer}"
                )
        else:
            if args.json:
                print(json.dumps(gen_inner_to_json(res)))
            else:
                pairs = ", ".join(f"({u}; {lam})" for u, lam in res.pairs)
                print(f"generalized inner: [{pairs}]")
        return EXIT_OK

    if cmd == "oracle-selftest":
        return _emit_report(oracle_selftest(cfg), args.json)

    if cmd == "verify-paper":
        if args.suite == "all":
            reports = [verify_paper(name, cfg) for name in sorted(SUITES)]
            code = EXIT_OK
            if args.json:
                print(json.dumps([r.to_json() for r in reports], indent=2))
            for rep in reports:
                if not args.json:
                    print("\n".join(rep.lines()))
                if not rep.ok:
                    code = EXIT_VERIFY
            return code
        return _emit_report(verify_paper(args.suite, cfg), args.json)

    raise AssertionError(f"unhandled command {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, TypeError, ValueError) as exc:
        # structurally broken payloads (missing keys, wrong value types)
        print(f"parse error: invalid payload: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
