"""
Thin command-line client for the workbench service.

By default the service runs in-process (no server needed); ``--server URL``
points the same client at a remote instance.  Exit status partitions the
outcomes: 0 = verdict or result produced (including ``distinct``),
1 = inconclusive or truncated at budget, 2 = usage or parse error,
3 = theorem-violation abort (indicates a bug, never a fact about braids).

JSON goes to stdout with sorted keys and no volatile fields, so identical
commands produce byte-identical output; timing is reported on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import httpx

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _budget_payload(args) -> dict:
    return {"max_nodes": args.max_nodes, "max_len": args.max_len, "slack": args.slack}


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        payload = dict(payload)
        wall = payload.pop("wall_time_s", None)
        if wall is not None:
            print(f"wall_time_s: {wall}", file=sys.stderr)
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _post(args, path: str, payload: dict) -> dict:
    t0 = time.perf_counter()
    with _client(args.server) as client:
        response = client.post(path, json=payload)
    elapsed = time.perf_counter() - t0
    print(f"request: {path} ({elapsed:.3f}s)", file=sys.stderr)
    if response.status_code == 400 or response.status_code == 422:
        body = response.json()
        detail = body.get("detail", body)
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if response.status_code >= 500:
        body = response.json()
        print(f"ABORT: {body.get('error', 'violation')}: {body.get('detail', '')}", file=sys.stderr)
        raise SystemExit(EXIT_VIOLATION)
    return response.json()


def _steps_text(steps) -> str:
    if not steps:
        return "(empty chain)"
    return " ; ".join(f"{s['rule']}{'' if s['forward'] else '~'}@{s['position']}" for s in steps)


def cmd_parse(args) -> int:
    body = _post(args, "/v1/parse", {"n": args.n, "word": args.word, "calc": args.calc})
    _emit(args, body, [body["word"]])
    return EXIT_OK


def cmd_perm(args) -> int:
    body = _post(args, "/v1/perm", {"n": args.n, "word": args.word})
    _emit(args, body, [body["one_line"]])
    return EXIT_OK


def cmd_nf(args) -> int:
    body = _post(args, "/v1/nf", {"n": args.n, "word": args.word})
    _emit(args, body, [body["text"]])
    return EXIT_OK


def cmd_equal(args) -> int:
    payload = {
        "calc": args.calc,
        "n": args.n,
        "left": args.left,
        "right": args.right,
        "budget": _budget_payload(args),
    }
    body = _post(args, "/v1/equal", payload)
    lines = [f"{body['status']} ({body['reason']}; nodes={body['nodes']}, cap={body['cap']})"]
    if body.get("witness"):
        lines.append("witness: " + _steps_text(body["witness"]))
    _emit(args, body, lines)
    return EXIT_INCONCLUSIVE if body["status"] == "inconclusive" else EXIT_OK


def cmd_eta(args) -> int:
    body = _post(args, "/v1/eta", {"n": args.n, "word": args.word, "colored": args.colored})
    _emit(args, body, [body["text"]])
    return EXIT_OK


def cmd_reduce(args) -> int:
    payload = {
        "n": args.n,
        "word": args.word,
        "strategy": args.strategy,
        "seed": args.seed,
        "budget": _budget_payload(args),
    }
    body = _post(args, "/v1/reduce", payload)
    tag = "" if body["exhaustive"] else f" (irreducible at budget: nodes={body['nodes']}, cap={body['cap']})"
    _emit(args, body, [f"{body['start']}  ->  {body['result']}  [{len(body['moves'])} deletion(s)]{tag}"])
    return EXIT_OK if body["exhaustive"] else EXIT_INCONCLUSIVE


def cmd_diamond(args) -> int:
    payload = {
        "n": args.n,
        "alpha": args.alpha,
        "beta": args.beta,
        "gamma": args.gamma,
        "budget": _budget_payload(args),
    }
    body = _post(args, "/v1/diamond", payload)
    lines = [f"{body['kind']}"]
    if body["kind"] == "m-equal":
        lines.append("witness: " + _steps_text(body.get("witness")))
    elif body["kind"] == "valley":
        lines.append(f"eta: {body['eta_word']}")
    _emit(args, body, lines)
    return EXIT_INCONCLUSIVE if body["kind"] == "inconclusive" else EXIT_OK


def cmd_inject(args) -> int:
    from .diamond import report_to_csv

    budget = {"max_nodes": args.max_nodes, "max_len": None, "slack": args.slack}
    payload = {"n": args.n, "max_len": args.max_len, "jobs": args.jobs, "budget": budget}
    body = _post(args, "/v1/inject", payload)
    lines = [
        f"words={body['words']} classes={body['classes']} cross_pairs={body['pairs']['cross_class']}",
        f"verdicts: {body['pairs']['verdicts']}",
        f"violations: {len(body['violations'])}",
        "",
    ]
    lines.extend(report_to_csv(body).rstrip("\n").splitlines())
    _emit(args, body, lines)
    return EXIT_OK


def cmd_closure(args) -> int:
    payload = {
        "calc": args.calc,
        "n": args.n,
        "word": args.word,
        "length_preserving_only": args.length_preserving,
        "budget": _budget_payload(args),
    }
    body = _post(args, "/v1/closure", payload)
    lines = [f"{len(body['words'])} word(s), cap={body['cap']}, truncated={body['truncated']}"]
    lines.extend(body["words"])
    _emit(args, body, lines)
    return EXIT_INCONCLUSIVE if body["truncated"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singbraid",
        description="Workbench for singular braid calculi on the disk.",
        epilog="Exit status: 0 verdict/result, 1 inconclusive at budget, 2 usage/parse error, 3 violation abort.",
    )
    parser.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, calc=False, budget=False):
        p.add_argument("--n", type=int, required=True, help="strand count")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if calc:
            p.add_argument("--calc", choices=("B", "SB", "M", "SG"), required=calc == "required", default=None)
        if budget:
            p.add_argument("--max-nodes", type=int, default=200_000)
            p.add_argument("--max-len", type=int, default=None)
            p.add_argument("--slack", type=int, default=2)

    p = sub.add_parser("parse", help="validate a word and print its canonical spelling")
    common(p, calc=True)
    p.add_argument("word")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("perm", help="underlying permutation of a word")
    common(p)
    p.add_argument("word")
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("nf", help="left-weighted normal form of a classical word")
    common(p)
    p.add_argument("word")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("equal", help="equality verdict in the chosen calculus")
    common(p, calc="required", budget=True)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_equal)

    p = sub.add_parser("eta", help="desingularization of a word into a formal sum")
    common(p)
    p.add_argument("word")
    p.add_argument("--colored", action="store_true", help="two-color variant with (black, white) markers")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("reduce", help="delete opposite pairs until irreducible")
    common(p, budget=True)
    p.add_argument("word")
    p.add_argument("--strategy", choices=("deterministic", "randomized"), default="deterministic")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("diamond", help="resolve a peak alpha <- beta -> gamma")
    common(p, budget=True)
    p.add_argument("alpha")
    p.add_argument("beta")
    p.add_argument("gamma")
    p.set_defaults(func=cmd_diamond)

    p = sub.add_parser("inject", help="desk-scale embedding experiment over black-only words")
    common(p)
    p.add_argument("--max-len", dest="max_len", type=int, required=True, help="enumerate words up to this length")
    p.add_argument("--max-nodes", type=int, default=200_000)
    p.add_argument("--slack", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("closure", help="budget-bounded rewrite closure of a word")
    common(p, calc="required", budget=True)
    p.add_argument("word")
    p.add_argument("--length-preserving", action="store_true")
    p.set_defaults(func=cmd_closure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and getattr(args, "verb", "") == "reduce" and args.strategy == "randomized":
        parser.error("--seed is required with --strategy randomized")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
