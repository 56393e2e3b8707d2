"""End-to-end mining: score, align, filter, merge directions, report.

A corpus run streams document pairs, mines each with the forward model
(and a backward model when given), merges the two directions per document
with exact-text dedup, and writes TSV records in a deterministic order:
documents in input order, pairs by source sentence index. Worker count
only changes wall clock, never output bytes.
"""

from __future__ import annotations

import functools
import json
import logging
import multiprocessing
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable

from .aligner import (
    ENGINES,
    MinedPair,
    MiningParams,
    build_similarity_matrix,
    extract_pairs,
    run_engine,
)
from .classifier import ClassifierModel
from .corpus import DocumentPair, tokenize
from .errors import DataError, ResourceLimitError
from .lexicon import Lexicon

__all__ = [
    "MinedPair",
    "MinerConfig",
    "MiningReport",
    "bidirectional_merge",
    "count_unique_tokens",
    "format_pair_line",
    "mine_corpus",
    "mine_document",
    "report_to_json",
]

log = logging.getLogger(__name__)


@dataclass
class MinerConfig:
    params: MiningParams
    workers: int = 1
    engine: str = "sequential"
    wavefront_workers: int = 1
    seed: int = 42

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError(f"workers {self.workers} must be >= 1")
        if self.wavefront_workers < 1:
            raise ValueError(
                f"wavefront_workers {self.wavefront_workers} must be >= 1"
            )
        if self.engine not in ENGINES:
            raise ValueError(
                f"unknown engine {self.engine!r}; choose one of {ENGINES}"
            )


@dataclass
class MiningReport:
    pairs_emitted: int = 0
    unique_src_tokens: int = 0
    unique_tgt_tokens: int = 0
    docs_processed: int = 0
    docs_skipped: int = 0
    wall_clock_seconds: float = 0.0
    per_direction: dict[str, int] = field(
        default_factory=lambda: {"forward": 0, "backward": 0}
    )


def mine_document(
    pair: DocumentPair, model: ClassifierModel, lex: Lexicon, cfg: MinerConfig
) -> list[MinedPair]:
    """Mine one document pair with one model.

    A model whose direction matches (target lang, source lang) is applied
    to the swapped pair and its output re-oriented and tagged "backward".
    The lexicon must be oriented like the model.
    """
    fwd = (pair.source.lang, pair.target.lang)
    bwd = (pair.target.lang, pair.source.lang)
    direction = tuple(model.direction)
    if direction == fwd:
        oriented = pair
        tag = "forward"
    elif direction == bwd:
        oriented = DocumentPair(id=pair.id, source=pair.target, target=pair.source)
        tag = "backward"
    else:
        raise DataError(
            f"model direction {direction} matches neither {fwd} nor {bwd} "
            f"for document pair {pair.id!r}"
        )
    if tuple(lex.direction) != direction:
        raise DataError(
            f"lexicon direction {tuple(lex.direction)} does not match model "
            f"direction {direction}"
        )
    S = build_similarity_matrix(oriented, model, lex)
    path = run_engine(cfg.engine, S, cfg.params.penalty, cfg.wavefront_workers)
    mined = extract_pairs(path, S, oriented, cfg.params)
    if tag == "forward":
        return mined
    return [
        MinedPair(
            src=rec.tgt,
            tgt=rec.src,
            confidence=rec.confidence,
            doc_id=rec.doc_id,
            direction="backward",
            src_index=rec.tgt_index,
            tgt_index=rec.src_index,
        )
        for rec in mined
    ]


def _better(challenger: MinedPair, incumbent: MinedPair) -> bool:
    if challenger.confidence != incumbent.confidence:
        return challenger.confidence > incumbent.confidence
    # exact tie: forward wins; otherwise first seen stays
    return challenger.direction == "forward" and incumbent.direction == "backward"


def bidirectional_merge(
    forward: list[MinedPair], backward: list[MinedPair]
) -> list[MinedPair]:
    """Deduplicated union of two directional pair lists.

    Key is the normalized text of both sides; duplicates keep the higher
    confidence, with the forward tag winning exact ties. Output is sorted
    by (doc_id, source index, target index).
    """
    best: dict[tuple[str, str], MinedPair] = {}
    for rec in list(forward) + list(backward):
        key = (rec.src.normalized, rec.tgt.normalized)
        cur = best.get(key)
        if cur is None or _better(rec, cur):
            best[key] = rec
    return sorted(
        best.values(), key=lambda r: (r.doc_id, r.src_index, r.tgt_index)
    )


def _mine_task(
    pair: DocumentPair,
    forward: ClassifierModel,
    backward: ClassifierModel | None,
    lex: Lexicon,
    cfg: MinerConfig,
) -> tuple[list[MinedPair], str | None]:
    """Worker body: mine one document, both directions, merged.

    Returns (pairs, None) or ([], reason) when the document is skipped.
    Must stay a module-level function so process pools can pickle it.
    """
    if not pair.source.sentences or not pair.target.sentences:
        side = "src" if not pair.source.sentences else "tgt"
        return ([], f"document pair {pair.id!r}: empty {side} side")
    try:
        fwd_pairs = mine_document(pair, forward, lex, cfg)
        if backward is None:
            return (fwd_pairs, None)
        bwd_pairs = mine_document(pair, backward, lex.reversed(), cfg)
        return (bidirectional_merge(fwd_pairs, bwd_pairs), None)
    except ResourceLimitError as exc:
        return ([], str(exc))


def format_pair_line(rec: MinedPair) -> str:
    return (
        f"{_sanitize(rec.src.raw)}\t{_sanitize(rec.tgt.raw)}\t"
        f"{rec.confidence:.6f}\t{_sanitize(rec.doc_id)}\t{rec.direction}\n"
    )


_FIELD_BREAKS = re.compile(r"[\t\n\r]")


def _sanitize(text: str) -> str:
    return _FIELD_BREAKS.sub(" ", text)


def mine_corpus(
    doc_pairs: Iterable[DocumentPair],
    forward: ClassifierModel,
    backward: ClassifierModel | None,
    lex: Lexicon,
    cfg: MinerConfig,
    out: IO[str],
) -> MiningReport:
    """Mine a whole corpus and write TSV records to ``out``.

    Documents are distributed over ``cfg.workers`` processes; results are
    written in input order regardless of scheduling, so output bytes do
    not depend on the worker count. Per-document failures (oversized
    matrix, empty side) are counted in docs_skipped, not fatal.
    """
    start = time.perf_counter()
    report = MiningReport()
    if backward is not None:
        lex.reversed()  # warm the cache so workers inherit it
    task = functools.partial(
        _mine_task, forward=forward, backward=backward, lex=lex, cfg=cfg
    )
    src_tokens: set[str] = set()
    tgt_tokens: set[str] = set()

    def consume(results: Iterable[tuple[list[MinedPair], str | None]]) -> None:
        for mined, skip_reason in results:
            if skip_reason is not None:
                log.warning("skipping: %s", skip_reason)
                report.docs_skipped += 1
                continue
            report.docs_processed += 1
            for rec in mined:
                out.write(format_pair_line(rec))
                report.pairs_emitted += 1
                report.per_direction[rec.direction] += 1
                src_tokens.update(tokenize(rec.src.normalized))
                tgt_tokens.update(tokenize(rec.tgt.normalized))

    if cfg.workers == 1:
        consume(map(task, doc_pairs))
    else:
        # numba's threading layer does not survive fork once initialized,
        # so the wavefront engine gets fresh interpreters.
        ctx = multiprocessing.get_context(
            "spawn" if cfg.engine == "wavefront" else "fork"
        )
        with ProcessPoolExecutor(max_workers=cfg.workers, mp_context=ctx) as pool:
            consume(pool.map(task, doc_pairs, chunksize=8))

    report.unique_src_tokens = len(src_tokens)
    report.unique_tgt_tokens = len(tgt_tokens)
    report.wall_clock_seconds = time.perf_counter() - start
    return report


def count_unique_tokens(pairs: list[MinedPair]) -> tuple[int, int]:
    """Distinct normalized token counts on each side of the mined pairs."""
    src_tokens: set[str] = set()
    tgt_tokens: set[str] = set()
    for rec in pairs:
        src_tokens.update(tokenize(rec.src.normalized))
        tgt_tokens.update(tokenize(rec.tgt.normalized))
    return (len(src_tokens), len(tgt_tokens))


def report_to_json(report: MiningReport) -> str:
    payload = {
        "pairs_emitted": report.pairs_emitted,
        "unique_src_tokens": report.unique_src_tokens,
        "unique_tgt_tokens": report.unique_tgt_tokens,
        "docs_processed": report.docs_processed,
        "docs_skipped": report.docs_skipped,
        "wall_clock_seconds": report.wall_clock_seconds,
        "per_direction": dict(report.per_direction),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
