"""Grid search for mining parameters against a gold-aligned dev set.

Threshold and penalty are selected by maximizing F1 of the mined
(document, i, j) index triples against the gold triples. Similarity
matrices are computed once per document and alignments once per penalty;
grid points only re-filter the cached paths, so the search is cheap and
its trace is assembled in a fixed grid order (threshold outer ascending,
penalty inner ascending).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .aligner import MiningParams, build_similarity_matrix, extract_pairs, nw_align
from .classifier import THRESHOLD_GRID, ClassifierModel
from .corpus import DocumentPair, parse_document_pair
from .errors import DataError
from .lexicon import Lexicon

DEFAULT_THRESHOLDS = THRESHOLD_GRID
DEFAULT_PENALTIES = (0.05, 0.1, 0.2, 0.4, 0.8, 1.6)


@dataclass
class GoldSet:
    """Dev documents plus, per document, the set of true (i, j) index pairs."""

    docs: list[DocumentPair]
    gold: list[set[tuple[int, int]]]

    def __post_init__(self) -> None:
        if len(self.docs) != len(self.gold):
            raise ValueError(
                f"{len(self.docs)} documents but {len(self.gold)} gold sets"
            )
        for doc, cells in zip(self.docs, self.gold):
            n = len(doc.source.sentences)
            m = len(doc.target.sentences)
            for i, j in cells:
                if not (0 <= i < n and 0 <= j < m):
                    raise ValueError(
                        f"gold pair ({i}, {j}) out of bounds for document "
                        f"{doc.id!r} ({n}x{m})"
                    )


@dataclass(frozen=True)
class TunePoint:
    threshold: float
    penalty: float
    precision: float
    recall: float
    f1: float


@dataclass
class TuneResult:
    best: MiningParams
    precision: float
    recall: float
    f1: float
    trace: list[TunePoint]


def f_measure(
    predicted: set[tuple], gold: set[tuple]
) -> tuple[float, float, float]:
    """Precision, recall, F1 of predicted index triples against gold.

    Both sets empty counts as a perfect (1, 1, 1). An empty side with a
    non-empty other side scores 0 for the undefined ratio.
    """
    predicted = set(predicted)
    gold = set(gold)
    if not predicted and not gold:
        return (1.0, 1.0, 1.0)
    inter = len(predicted & gold)
    precision = inter / len(predicted) if predicted else 0.0
    recall = inter / len(gold) if gold else 0.0
    if precision + recall == 0.0:
        return (precision, recall, 0.0)
    return (precision, recall, 2.0 * precision * recall / (precision + recall))


def tune(
    model: ClassifierModel,
    lex: Lexicon,
    dev: GoldSet,
    thresholds: list[float] | None = None,
    penalties: list[float] | None = None,
    reuse_cache: bool = True,
) -> TuneResult:
    """Evaluate every (threshold, penalty) grid point on the dev set.

    Returns the argmax by f1; ties break toward the higher threshold, then
    the lower penalty. ``reuse_cache=False`` recomputes matrices and
    alignments at every grid point (slow; exists to show the cache does
    not change results).
    """
    if not dev.docs:
        raise DataError("gold set is empty")
    t_grid = list(DEFAULT_THRESHOLDS if thresholds is None else thresholds)
    p_grid = list(DEFAULT_PENALTIES if penalties is None else penalties)
    if not t_grid or not p_grid:
        raise ValueError("parameter grid is empty")
    for t in t_grid:
        for p in p_grid:
            MiningParams(t, p)  # validates ranges up front

    gold_keys = {
        (d, i, j) for d, cells in enumerate(dev.gold) for (i, j) in cells
    }

    matrices: dict[int, object] = {}
    paths: dict[tuple[int, float], object] = {}

    def get_matrix(d: int):
        if not reuse_cache:
            return build_similarity_matrix(dev.docs[d], model, lex)
        if d not in matrices:
            matrices[d] = build_similarity_matrix(dev.docs[d], model, lex)
        return matrices[d]

    def get_path(d: int, penalty: float, S):
        if not reuse_cache:
            return nw_align(S, penalty)
        key = (d, penalty)
        if key not in paths:
            paths[key] = nw_align(S, penalty)
        return paths[key]

    trace: list[TunePoint] = []
    for t in t_grid:
        for p in p_grid:
            params = MiningParams(t, p)
            predicted: set[tuple[int, int, int]] = set()
            for d, doc in enumerate(dev.docs):
                S = get_matrix(d)
                path = get_path(d, p, S)
                for mp in extract_pairs(path, S, doc, params):
                    predicted.add((d, mp.src_index, mp.tgt_index))
            prec, rec, f1 = f_measure(predicted, gold_keys)
            trace.append(TunePoint(t, p, prec, rec, f1))

    best = max(trace, key=lambda r: (r.f1, r.threshold, -r.penalty))
    return TuneResult(
        best=MiningParams(best.threshold, best.penalty),
        precision=best.precision,
        recall=best.recall,
        f1=best.f1,
        trace=trace,
    )


def load_gold_set(path: str) -> GoldSet:
    """Read a gold set: document-pair JSONL with an extra "gold" index list."""
    docs: list[DocumentPair] = []
    gold: list[set[tuple[int, int]]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(
                    f"{path}: line {lineno}: invalid JSON ({exc.msg})"
                ) from exc
            pair = parse_document_pair(obj, path, lineno)
            if not pair.source.sentences or not pair.target.sentences:
                raise DataError(
                    f"{path}: line {lineno}: empty document side in gold set"
                )
            raw = obj.get("gold")
            if not isinstance(raw, list):
                raise DataError(f"{path}: line {lineno}: missing field 'gold'")
            n = len(pair.source.sentences)
            m = len(pair.target.sentences)
            cells: set[tuple[int, int]] = set()
            for entry in raw:
                if (
                    not isinstance(entry, list)
                    or len(entry) != 2
                    or not all(isinstance(v, int) for v in entry)
                ):
                    raise DataError(
                        f"{path}: line {lineno}: gold entries must be [i, j] "
                        f"integer pairs"
                    )
                i, j = entry
                if not (0 <= i < n and 0 <= j < m):
                    raise DataError(
                        f"{path}: line {lineno}: gold pair ({i}, {j}) out of "
                        f"bounds for a {n}x{m} document pair"
                    )
                cells.add((i, j))
            docs.append(pair)
            gold.append(cells)
    if not docs:
        raise DataError(f"{path}: empty gold set")
    return GoldSet(docs=docs, gold=gold)


def tune_result_to_json(result: TuneResult) -> str:
    payload = {
        "best": {
            "threshold": result.best.threshold,
            "penalty": result.best.penalty,
        },
        "precision": result.precision,
        "recall": result.recall,
        "f1": result.f1,
        "trace": [
            {
                "threshold": r.threshold,
                "penalty": r.penalty,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
            }
            for r in result.trace
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
