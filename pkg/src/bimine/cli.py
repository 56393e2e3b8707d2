"""Command-line front end.

Subcommands: train, tune, mine, align, eval, sample, stats, bench.
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 runtime
failure. Validation failures never leave partial output files; a write
failure mid-run renames the output to <name>.partial before exiting.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import logging
import os
import sys
from typing import IO, Iterator

from .aligner import (
    ENGINES,
    MiningParams,
    format_path,
    load_matrix_tsv,
    run_engine,
)
from .classifier import load_model, model_to_json, train
from .corpus import SeedCorpus, load_document_pairs, load_seed_corpus, normalize, tokenize
from .errors import BimineError, DataError
from .lexicon import load_lexicon
from .metrics import bleu_report, nist_report, sample_test_set
from .miner import MinerConfig, mine_corpus, report_to_json
from .tuner import load_gold_set, tune, tune_result_to_json

log = logging.getLogger(__name__)


class _SinkFailure(Exception):
    """A write to an output file failed after output had started."""


# ---------------------------------------------------------------- flag types


def _prob(s: str) -> float:
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{s} is not in [0, 1]")
    return v


def _nonneg(s: str) -> float:
    v = float(s)
    if v < 0.0:
        raise argparse.ArgumentTypeError(f"{s} is negative")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s} is not >= 1")
    return v


def _float_list(s: str) -> list[float]:
    parts = [p for p in s.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    return [float(p) for p in parts]


def _int_list(s: str) -> list[int]:
    parts = [p for p in s.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    out = []
    for p in parts:
        v = int(p)
        if v < 1:
            raise argparse.ArgumentTypeError(f"{p} is not >= 1")
        out.append(v)
    return out


def _engine_list(s: str) -> list[str]:
    parts = [p.strip() for p in s.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    for p in parts:
        if p not in ENGINES:
            raise argparse.ArgumentTypeError(
                f"unknown engine {p!r}; choose from {', '.join(ENGINES)}"
            )
    return parts


# ------------------------------------------------------------------- helpers


@contextlib.contextmanager
def _sink(path: str) -> Iterator[IO[str]]:
    """Open an output file; on a mid-write failure, move it to .partial."""
    fh = open(path, "w", encoding="utf-8")
    try:
        with fh:
            yield fh
    except OSError as exc:
        marker = path + ".partial"
        with contextlib.suppress(OSError):
            os.replace(path, marker)
        raise _SinkFailure(
            f"writing {path} failed ({exc}); partial output moved to {marker}"
        ) from exc


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _figure_dir(args) -> str | None:
    if not getattr(args, "figures", None):
        return None
    os.makedirs(args.figures, exist_ok=True)
    return args.figures


def _load_oriented_lexicon(path: str, model) -> object:
    return load_lexicon(path, model.direction[0], model.direction[1])


def _check_doc_directions(docs, model) -> None:
    want = tuple(model.direction)
    for pair in docs:
        have = (pair.source.lang, pair.target.lang)
        if have != want:
            raise DataError(
                f"document pair {pair.id!r} direction {have} does not match "
                f"model direction {want}"
            )


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n").rstrip("\r") for line in fh]


def _read_confidences(tsv_path: str) -> list[float]:
    confs = []
    with open(tsv_path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) == 5:
                confs.append(float(parts[2]))
    return confs


# ------------------------------------------------------------------ handlers


def _cmd_train(args) -> int:
    corpus = load_seed_corpus(args.src, args.tgt)
    lex = load_lexicon(args.lexicon, args.src_lang, args.tgt_lang)
    if args.reverse:
        corpus = SeedCorpus(
            pairs=[(t, s) for (s, t) in corpus.pairs], dropped=corpus.dropped
        )
        lex = lex.reversed()
    model = train(
        corpus,
        lex,
        negatives_per_positive=args.negatives,
        epochs=args.epochs,
        seed=args.seed,
    )
    with _sink(args.out) as fh:
        fh.write(model_to_json(model))
    payload = {
        "seed": args.seed,
        "pairs": len(corpus.pairs),
        "dropped": corpus.dropped,
        "direction": list(model.direction),
        "default_threshold": model.default_threshold,
        "default_penalty": model.default_penalty,
        "model": args.out,
    }
    if args.json:
        _emit_json(payload)
    else:
        print(f"seed: {args.seed}")
        print(
            f"trained on {payload['pairs']} pairs ({payload['dropped']} blank "
            f"lines dropped), direction {model.direction[0]}->{model.direction[1]}"
        )
        print(
            f"default threshold {model.default_threshold:.2f}, "
            f"default penalty {model.default_penalty:.2f}"
        )
        print(f"model written to {args.out}")
    return 0


def _cmd_tune(args) -> int:
    model = load_model(args.model)
    lex = _load_oriented_lexicon(args.lexicon, model)
    dev = load_gold_set(args.gold)
    _check_doc_directions(dev.docs, model)
    result = tune(model, lex, dev, thresholds=args.thresholds, penalties=args.penalties)
    with _sink(args.out) as fh:
        fh.write(tune_result_to_json(result))
    fig_dir = _figure_dir(args)
    if fig_dir:
        from .figures import save_tune_heatmap

        save_tune_heatmap(result, os.path.join(fig_dir, "tune_f1.png"))
    payload = {
        "best": {"threshold": result.best.threshold, "penalty": result.best.penalty},
        "precision": result.precision,
        "recall": result.recall,
        "f1": result.f1,
        "grid_points": len(result.trace),
        "out": args.out,
    }
    if args.json:
        _emit_json(payload)
    else:
        print(
            f"best threshold {result.best.threshold:g}, "
            f"penalty {result.best.penalty:g}"
        )
        print(
            f"precision {result.precision:.4f}, recall {result.recall:.4f}, "
            f"f1 {result.f1:.4f} over {len(result.trace)} grid points"
        )
        print(f"trace written to {args.out}")
    return 0


def _cmd_mine(args) -> int:
    forward = load_model(args.model)
    backward = load_model(args.model_rev) if args.model_rev else None
    if backward is not None:
        expect = (forward.direction[1], forward.direction[0])
        if tuple(backward.direction) != expect:
            raise DataError(
                f"--model-rev direction {tuple(backward.direction)} is not the "
                f"reverse of --model direction {tuple(forward.direction)}"
            )
    lex = _load_oriented_lexicon(args.lexicon, forward)
    loader_skips: list[str] = []
    docs = list(
        load_document_pairs(args.docs, on_skip=lambda pid, why: loader_skips.append(pid))
    )
    _check_doc_directions(docs, forward)
    threshold = args.threshold if args.threshold is not None else forward.default_threshold
    penalty = args.penalty if args.penalty is not None else forward.default_penalty
    cfg = MinerConfig(
        params=MiningParams(threshold, penalty),
        workers=args.workers,
        engine=args.engine,
        wavefront_workers=args.wavefront_workers,
    )
    with _sink(args.out) as fh:
        report = mine_corpus(iter(docs), forward, backward, lex, cfg, fh)
    report.docs_skipped += len(loader_skips)
    if args.report:
        with _sink(args.report) as fh:
            fh.write(report_to_json(report))
    fig_dir = _figure_dir(args)
    if fig_dir:
        from .figures import save_confidence_histogram

        save_confidence_histogram(
            _read_confidences(args.out),
            os.path.join(fig_dir, "mining_confidences.png"),
        )
    payload = {
        "pairs_emitted": report.pairs_emitted,
        "docs_processed": report.docs_processed,
        "docs_skipped": report.docs_skipped,
        "per_direction": dict(report.per_direction),
        "unique_src_tokens": report.unique_src_tokens,
        "unique_tgt_tokens": report.unique_tgt_tokens,
        "threshold": threshold,
        "penalty": penalty,
        "wall_clock_seconds": report.wall_clock_seconds,
        "out": args.out,
    }
    if args.json:
        _emit_json(payload)
    else:
        print(
            f"mined {report.pairs_emitted} pairs from {report.docs_processed} "
            f"documents ({report.docs_skipped} skipped) at threshold "
            f"{threshold:g}, penalty {penalty:g}"
        )
        print(
            f"directions: {report.per_direction['forward']} forward, "
            f"{report.per_direction['backward']} backward; unique tokens "
            f"{report.unique_src_tokens} src / {report.unique_tgt_tokens} tgt"
        )
        print(f"wall clock {report.wall_clock_seconds:.2f}s; output in {args.out}")
    return 0


def _cmd_align(args) -> int:
    S = load_matrix_tsv(args.matrix)
    path = run_engine(args.engine, S, args.penalty, args.wavefront_workers)
    if args.json:
        _emit_json(
            {
                "total_cost": path.total_cost,
                "moves": [
                    {"op": mv.op, "i": mv.i, "j": mv.j} for mv in path.moves
                ],
            }
        )
    else:
        print("\n".join(format_path(path, S)))
    return 0


def _cmd_eval(args) -> int:
    hyp = _read_lines(args.hyp)
    ref = _read_lines(args.ref)
    if args.metric == "bleu":
        report = bleu_report(hyp, ref, args.max_n if args.max_n else 4)
    else:
        report = nist_report(hyp, ref, args.max_n if args.max_n else 5)
    if args.json:
        _emit_json(report)
    elif args.metric == "bleu":
        precisions = ", ".join(
            "n/a" if p is None else f"{p:.4f}"
            for p in report["details"]["precisions"]
        )
        print(f"BLEU = {report['score'] * 100:.2f}")
        print(
            f"precisions: {precisions}; brevity {report['details']['brevity']:.4f}; "
            f"lengths {report['details']['hyp_len']}/{report['details']['ref_len']}"
        )
    else:
        print(f"NIST = {report['score']:.4f}")
        print(
            f"brevity {report['details']['brevity']:.4f}; "
            f"lengths {report['details']['hyp_len']}/{report['details']['ref_len']}"
        )
    return 0


def _cmd_sample(args) -> int:
    corpus = load_seed_corpus(args.src, args.tgt)
    pairs = [(s.raw, t.raw) for s, t in corpus.pairs]
    split = sample_test_set(pairs, args.segments, args.per_segment, args.seed)
    outputs = {
        args.out_test + ".src": [p[0] for p in split.test],
        args.out_test + ".tgt": [p[1] for p in split.test],
        args.out_rest + ".src": [p[0] for p in split.remainder],
        args.out_rest + ".tgt": [p[1] for p in split.remainder],
    }
    for path, lines in outputs.items():
        with _sink(path) as fh:
            for line in lines:
                fh.write(line + "\n")
    payload = {
        "seed": args.seed,
        "test_pairs": len(split.test),
        "remainder_pairs": len(split.remainder),
        "dropped_blank": corpus.dropped,
        "out_test": args.out_test,
        "out_rest": args.out_rest,
    }
    if args.json:
        _emit_json(payload)
    else:
        print(f"seed: {args.seed}")
        print(
            f"test {len(split.test)} pairs, remainder {len(split.remainder)} "
            f"pairs ({corpus.dropped} blank lines dropped)"
        )
        print(f"written to {args.out_test}.src/.tgt and {args.out_rest}.src/.tgt")
    return 0


def _cmd_stats(args) -> int:
    pairs_count = 0
    src_tokens: set[str] = set()
    tgt_tokens: set[str] = set()
    directions: dict[str, int] = {}
    doc_ids: set[str] = set()
    conf_sum = 0.0
    with open(args.pairs, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise DataError(
                    f"{args.pairs}: line {lineno}: expected 5 tab-separated "
                    f"fields, got {len(parts)}"
                )
            src, tgt, conf_s, doc_id, direction = parts
            try:
                conf = float(conf_s)
            except ValueError as exc:
                raise DataError(
                    f"{args.pairs}: line {lineno}: bad confidence {conf_s!r}"
                ) from exc
            pairs_count += 1
            conf_sum += conf
            src_tokens.update(tokenize(normalize(src)))
            tgt_tokens.update(tokenize(normalize(tgt)))
            directions[direction] = directions.get(direction, 0) + 1
            doc_ids.add(doc_id)
    payload = {
        "pairs": pairs_count,
        "unique_src_tokens": len(src_tokens),
        "unique_tgt_tokens": len(tgt_tokens),
        "documents": len(doc_ids),
        "per_direction": directions,
        "mean_confidence": (conf_sum / pairs_count) if pairs_count else 0.0,
    }
    if args.json:
        _emit_json(payload)
    else:
        print(f"pairs: {pairs_count}")
        print(f"documents: {len(doc_ids)}")
        print(
            f"unique tokens: {len(src_tokens)} src / {len(tgt_tokens)} tgt"
        )
        print(f"mean confidence: {payload['mean_confidence']:.4f}")
        for name in sorted(directions):
            print(f"direction {name}: {directions[name]}")
    return 0


def _cmd_bench(args) -> int:
    forward = load_model(args.model)
    backward = load_model(args.model_rev) if args.model_rev else None
    lex = _load_oriented_lexicon(args.lexicon, forward)
    docs = list(load_document_pairs(args.docs))
    _check_doc_directions(docs, forward)
    threshold = args.threshold if args.threshold is not None else forward.default_threshold
    penalty = args.penalty if args.penalty is not None else forward.default_penalty
    params = MiningParams(threshold, penalty)
    rows = []
    for engine in args.engines:
        for workers in args.workers:
            wf = args.wavefront_workers if engine == "wavefront" else 1
            cfg = MinerConfig(
                params=params, workers=workers, engine=engine, wavefront_workers=wf
            )
            sink = io.StringIO()
            report = mine_corpus(iter(docs), forward, backward, lex, cfg, sink)
            label = f"{engine}, workers={workers}"
            if engine == "wavefront":
                label += f", wavefront_workers={wf}"
            rows.append(
                {
                    "label": label,
                    "engine": engine,
                    "workers": workers,
                    "wavefront_workers": wf,
                    "seconds": report.wall_clock_seconds,
                    "pairs": report.pairs_emitted,
                }
            )
    fig_dir = _figure_dir(args)
    if fig_dir:
        from .figures import save_bench_chart

        save_bench_chart(rows, os.path.join(fig_dir, "bench_times.png"))
    if args.json:
        _emit_json({"rows": rows, "documents": len(docs)})
    else:
        width = max(len(r["label"]) for r in rows)
        print(f"{'configuration':<{width}}  {'seconds':>9}  {'pairs':>8}")
        for r in rows:
            print(f"{r['label']:<{width}}  {r['seconds']:>9.2f}  {r['pairs']:>8}")
    return 0


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bimine",
        description="Mine parallel sentence pairs from comparable document pairs.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument(
        "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train a pair classifier")
    p.add_argument("--src", required=True, help="seed corpus source side")
    p.add_argument("--tgt", required=True, help="seed corpus target side")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--src-lang", default="src")
    p.add_argument("--tgt-lang", default="tgt")
    p.add_argument(
        "--reverse",
        action="store_true",
        help="train the target-to-source model instead",
    )
    p.add_argument("--negatives", type=_positive_int, default=2)
    p.add_argument("--epochs", type=_positive_int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("tune", parents=[common], help="grid-search threshold/penalty")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--gold", required=True, help="gold-aligned dev set JSONL")
    p.add_argument("--out", required=True, help="trace JSON path")
    p.add_argument("--thresholds", type=_float_list, default=None)
    p.add_argument("--penalties", type=_float_list, default=None)
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("mine", parents=[common], help="mine a document-pair corpus")
    p.add_argument("--docs", required=True, help="document pairs JSONL")
    p.add_argument("--model", required=True, help="forward model")
    p.add_argument("--model-rev", default=None, help="backward model (optional)")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True, help="mined pairs TSV path")
    p.add_argument("--threshold", type=_prob, default=None)
    p.add_argument("--penalty", type=_nonneg, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--engine", choices=ENGINES, default="sequential")
    p.add_argument("--wavefront-workers", type=_positive_int, default=1)
    p.add_argument("--report", default=None, help="report JSON path")
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("align", parents=[common], help="align one debug matrix")
    p.add_argument("--matrix", required=True, help="TSV of similarity cells")
    p.add_argument("--penalty", type=_nonneg, required=True)
    p.add_argument("--engine", choices=ENGINES, default="sequential")
    p.add_argument("--wavefront-workers", type=_positive_int, default=1)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("eval", parents=[common], help="score hypotheses vs references")
    p.add_argument("--metric", choices=("bleu", "nist"), required=True)
    p.add_argument("--hyp", required=True, help="one sentence per line")
    p.add_argument("--ref", required=True, help="one sentence per line")
    p.add_argument("--max-n", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sample", parents=[common], help="draw a segment test set")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--segments", type=_positive_int, default=200)
    p.add_argument("--per-segment", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-test", required=True, help="test prefix (.src/.tgt added)")
    p.add_argument("--out-rest", required=True, help="remainder prefix")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("stats", parents=[common], help="summarize a mined TSV")
    p.add_argument("--pairs", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", parents=[common], help="time engines and workers")
    p.add_argument("--docs", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--model-rev", default=None)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--engines", type=_engine_list, default=list(ENGINES))
    p.add_argument("--workers", type=_int_list, default=[1, 2, 4])
    p.add_argument("--wavefront-workers", type=_positive_int, default=1)
    p.add_argument("--threshold", type=_prob, default=None)
    p.add_argument("--penalty", type=_nonneg, default=None)
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    p.set_defaults(func=_cmd_bench)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if (exc.code or 0) == 0 else 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except _SinkFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BimineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything else is a runtime failure
        print(f"unexpected error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
