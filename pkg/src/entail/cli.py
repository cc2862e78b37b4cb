"""Command line front end: ask, eval, teach and serve.

Configuration precedence is flags over ``ENTAIL_*`` environment variables
over built-in defaults.  Exit codes: 0 success, 1 usage error, 2 runtime
failure (backend unreachable, dataset malformed, search failure).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from entail.backend import Backend
from entail.core import ProofNode, SearchConfig
from entail.errors import (
    BackendError,
    ContractError,
    DatasetError,
    DeclarativizationError,
    QuestionError,
)
from entail.memory import MemoryStore, context_for_question
from entail.pipeline import (
    QuestionRecord,
    answer,
    build_hypotheses,
    entailer_pick,
    evaluate,
    load_dataset,
    resolve_options,
)
from entail import proofio

ENV_PREFIX = "ENTAIL_"


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit 1 instead of argparse's 2."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _env(name: str, default: str | None = None) -> str | None:
    return os.environ.get(ENV_PREFIX + name, default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entail", description="entailment proof search over a model backend")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--backend",
            default=_env("BACKEND"),
            help="mock:<kb.json> or remote:<base-url> (env ENTAIL_BACKEND)",
        )
        p.add_argument("--max-depth", type=int, default=int(_env("MAX_DEPTH", "3")))
        p.add_argument("--k-root", type=int, default=int(_env("K_ROOT", "6")))
        p.add_argument("--k-inner", type=int, default=int(_env("K_INNER", "1")))
        p.add_argument("--threshold", type=float, default=float(_env("THRESHOLD", "0.5")))
        p.add_argument("--temperature", type=float, default=float(_env("TEMPERATURE", "2.0")))
        p.add_argument("--top-p", type=float, default=float(_env("TOP_P", "0.95")))
        p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
        p.add_argument(
            "--mode",
            choices=["direct", "entailer", "combined"],
            default=_env("MODE", "entailer"),
        )
        p.add_argument("--use-memory", action="store_true", default=_env("USE_MEMORY") == "1")
        p.add_argument("--memory-path", default=_env("MEMORY_PATH", "memory.jsonl"))
        p.add_argument("--format", choices=["text", "json"], default=_env("FORMAT", "text"))

    ask = sub.add_parser("ask", help="answer one question and print its proof")
    add_common(ask)
    ask.add_argument("--question", required=True)
    ask.add_argument(
        "--options",
        nargs="+",
        default=None,
        help='answer options, space separated or one "a,b,c" string; omit for open-ended',
    )
    ask.add_argument("--open-ended", action="store_true")
    ask.add_argument("--n-candidates", type=int, default=None)

    ev = sub.add_parser("eval", help="score a JSONL dataset and print metrics")
    add_common(ev)
    ev.add_argument("--dataset", required=True)

    teach = sub.add_parser("teach", help="store a belief correction, then optionally re-ask")
    add_common(teach)
    teach.add_argument("--statement", required=True)
    polarity = teach.add_mutually_exclusive_group(required=True)
    polarity.add_argument(
        "--true", dest="asserted_true", action="store_true", help="assert the statement is true"
    )
    polarity.add_argument(
        "--false", dest="asserted_true", action="store_false", help="assert the statement is false"
    )
    teach.add_argument("--note", default=None)
    teach.add_argument("--question", default=None, help="re-ask this question with memory on")
    teach.add_argument("--options", nargs="+", default=None)

    serve = sub.add_parser("serve", help="run the HTTP service")
    add_common(serve)
    serve.add_argument("--port", type=int, default=int(_env("PORT", "8000")))
    serve.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    serve.add_argument("--proof-path", default=_env("PROOF_PATH", "proofs.jsonl"))
    serve.add_argument("--timeout", type=float, default=float(_env("TIMEOUT", "120")))

    return parser


def make_backend(spec: str | None) -> Backend:
    if not spec:
        raise ContractError("no backend configured; pass --backend or set ENTAIL_BACKEND")
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ContractError(f"backend spec {spec!r} is not mock:<path> or remote:<url>")
    if kind == "mock":
        from entail.backend.mock import MockBackend, load_kb

        return MockBackend(load_kb(arg))
    if kind == "remote":
        from entail.backend.remote import RemoteBackend

        return RemoteBackend(arg)
    raise ContractError(f"unknown backend kind {kind!r}; expected mock or remote")


def cfg_from_args(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        max_depth=args.max_depth,
        k_root=args.k_root,
        k_inner=args.k_inner,
        filter_threshold=args.threshold,
        temperature=args.temperature,
        top_p=args.top_p,
        seed=args.seed,
    )


def render_proof(node: ProofNode, indent: int = 0) -> str:
    pad = "  " * indent
    lines = [
        f"{pad}{node.statement.text}  "
        f"[{node.branch}{' forced' if node.forced else ''}  "
        f"overall={node.overall:.3f} s_d={node.s_d:.3f} s_r={node.s_r:.3f}]"
    ]
    for child in node.children:
        lines.append(render_proof(child, indent + 1))
    return "\n".join(lines)


def render_result_text(result) -> str:
    lines = [f"question: {result.question}", f"mode: {result.mode}"]
    for i, outcome in enumerate(result.per_option):
        marker = "*" if i == result.chosen_index else " "
        if outcome.error is not None:
            lines.append(f" {marker} [{i}] {outcome.option}  (error: {outcome.error})")
            continue
        lines.append(
            f" {marker} [{i}] {outcome.option}  "
            f"score={outcome.selection_score():.3f} s_d={outcome.s_d:.3f}"
        )
    lines.append(f"chosen: [{result.chosen_index}] {result.chosen.option}")
    lines.append(f"faithful: {str(result.faithful).lower()}")
    best = result.per_option[entailer_pick(result.per_option)]
    if best.proof is not None:
        lines.append("proof:")
        lines.append(render_proof(best.proof, indent=1))
    return "\n".join(lines)


def _parse_options(raw: list[str] | None) -> tuple[str, ...] | None:
    if not raw:
        return None
    if len(raw) == 1 and "," in raw[0]:
        raw = [part.strip() for part in raw[0].split(",") if part.strip()]
    return tuple(raw)


def _record_from_args(args: argparse.Namespace) -> QuestionRecord:
    options = _parse_options(args.options)
    return QuestionRecord(
        id="cli",
        question=args.question,
        options=options,
        open_ended=bool(getattr(args, "open_ended", False) or options is None),
        n_candidates=getattr(args, "n_candidates", None),
    )


def _context_from_memory(args, backend, record, cfg):
    if not args.use_memory:
        return None
    store = MemoryStore(args.memory_path)
    options = resolve_options(backend, record, cfg)
    hypotheses = build_hypotheses(backend, record.question, options)
    return context_for_question(store, record.question, hypotheses)


def cmd_ask(args: argparse.Namespace) -> int:
    backend = make_backend(args.backend)
    cfg = cfg_from_args(args)
    record = _record_from_args(args)
    context = _context_from_memory(args, backend, record, cfg)
    result = answer(backend, record, cfg, args.mode, context)
    if args.format == "json":
        print(json.dumps(proofio.result_to_dict(result), indent=2, sort_keys=True))
    else:
        print(render_result_text(result))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    backend = make_backend(args.backend)
    cfg = cfg_from_args(args)
    questions = load_dataset(args.dataset)

    provider = None
    if args.use_memory:
        store = MemoryStore(args.memory_path)

        def provider(record: QuestionRecord, hypotheses):
            return context_for_question(store, record.question, hypotheses)

    metrics = evaluate(backend, questions, cfg, args.mode, context_provider=provider)
    if args.format == "json":
        print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    else:
        print(metrics.format_table())
    return 0


def cmd_teach(args: argparse.Namespace) -> int:
    from entail.core import Statement

    store = MemoryStore(args.memory_path)
    override = store.add_override(
        Statement(args.statement), args.asserted_true, note=args.note
    )
    if args.format == "json":
        payload = {"stored": {"key": override.key, **override.to_json()}}
    else:
        print(f"stored: {override.effective_statement().text} (key {override.key})")
        payload = None

    if args.question:
        backend = make_backend(args.backend)
        cfg = cfg_from_args(args)
        options = _parse_options(args.options)
        record = QuestionRecord(
            id="teach", question=args.question, options=options, open_ended=options is None
        )
        hypotheses = build_hypotheses(backend, record.question, resolve_options(backend, record, cfg))
        context = context_for_question(store, record.question, hypotheses)
        result = answer(backend, record, cfg, args.mode, context)
        if args.format == "json":
            payload["result"] = proofio.result_to_dict(result)
        else:
            print(render_result_text(result))
    if payload is not None:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from entail.proofio import ProofStore
    from entail.server import create_app

    backend = make_backend(args.backend)
    app = create_app(
        backend,
        MemoryStore(args.memory_path),
        ProofStore(args.proof_path),
        default_cfg=cfg_from_args(args),
        request_timeout_s=args.timeout,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"ask": cmd_ask, "eval": cmd_eval, "teach": cmd_teach, "serve": cmd_serve}
    try:
        return handlers[args.command](args)
    except (
        BackendError,
        ContractError,
        DatasetError,
        DeclarativizationError,
        QuestionError,
        OSError,
    ) as exc:
        print(f"entail: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
