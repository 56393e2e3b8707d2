"""Monotone sentence alignment over a classifier-scored similarity matrix.

The core is a min-cost global alignment DP:

    C[i][j] = min(C[i-1][j-1] + (1 - S[i-1][j-1]),
                  C[i-1][j] + penalty,
                  C[i][j-1] + penalty)

with C[0][0] = 0 and border costs k * penalty. A diagonal move matches
source sentence i-1 with target sentence j-1; the two gap moves skip one
sentence on one side at the price of `penalty`. Paths never move upward
or leftward, so alignments are monotone and 1-1.

Three engines share one traceback and produce comparable results:

* ``nw_align``: plain row-major evaluation.
* ``nw_align_wavefront``: evaluates the matrix by anti-diagonals of tiles;
  tiles on one diagonal have no mutual dependencies and run concurrently,
  with a barrier between diagonals. Output is bit-identical to ``nw_align``
  for any worker count because every cell computes the identical float64
  expression from identical predecessors.
* ``search_align``: uniform-cost search over the same move set, used to
  cross-check DP optimality (paths may differ on ties; costs agree).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .classifier import ClassifierModel, confidence, extract_features
from .corpus import DocumentPair, Sentence
from .errors import DataError, ResourceLimitError
from .lexicon import Lexicon

# Cost matrices larger than this are refused instead of thrashing swap.
MAX_CELLS = 25_000_000

_TILE = 128

ENGINES = ("sequential", "wavefront", "search")


@dataclass
class SimilarityMatrix:
    """n x m grid of classifier confidences for one document pair."""

    cells: np.ndarray

    def __post_init__(self) -> None:
        cells = np.ascontiguousarray(np.asarray(self.cells, dtype=np.float64))
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError("similarity matrix must be 2-D with n, m >= 1")
        if cells.size > MAX_CELLS:
            raise ResourceLimitError(
                f"similarity matrix {cells.shape[0]}x{cells.shape[1]} exceeds "
                f"the {MAX_CELLS} cell limit"
            )
        if not np.all((cells >= 0.0) & (cells <= 1.0)):
            raise ValueError("similarity cells must lie in [0, 1]")
        self.cells = cells

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def m(self) -> int:
        return self.cells.shape[1]


@dataclass(frozen=True)
class Move:
    """One path step: op "D" (match i,j), "GS" (skip source i), "GT" (skip target j)."""

    op: str
    i: int = -1
    j: int = -1


@dataclass
class AlignmentPath:
    moves: list[Move]
    total_cost: float


@dataclass(frozen=True)
class MiningParams:
    threshold: float
    penalty: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if self.penalty < 0.0:
            raise ValueError(f"penalty {self.penalty} must be >= 0")


@dataclass(frozen=True)
class MinedPair:
    """One extracted sentence pair with its confidence and provenance."""

    src: Sentence
    tgt: Sentence
    confidence: float
    doc_id: str
    direction: str = "forward"
    src_index: int = 0
    tgt_index: int = 0


@njit(cache=True)
def _nw_costs(S, penalty):
    n, m = S.shape
    C = np.empty((n + 1, m + 1), dtype=np.float64)
    for i in range(n + 1):
        C[i, 0] = i * penalty
    for j in range(1, m + 1):
        C[0, j] = j * penalty
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            best = C[i - 1, j - 1] + (1.0 - S[i - 1, j - 1])
            alt = C[i - 1, j] + penalty
            if alt < best:
                best = alt
            alt = C[i, j - 1] + penalty
            if alt < best:
                best = alt
            C[i, j] = best
    return C


@njit(parallel=True, cache=True)
def _nw_costs_wavefront(S, penalty, tile):
    # Tiles on one anti-diagonal of the tile grid depend only on tiles from
    # earlier diagonals, so each diagonal is a parallel region with an
    # implicit barrier at its end. Cell arithmetic is identical to
    # _nw_costs, which makes the result bit-exact regardless of scheduling.
    n, m = S.shape
    C = np.empty((n + 1, m + 1), dtype=np.float64)
    for i in range(n + 1):
        C[i, 0] = i * penalty
    for j in range(1, m + 1):
        C[0, j] = j * penalty
    nbi = (n + tile - 1) // tile
    nbj = (m + tile - 1) // tile
    for d in range(nbi + nbj - 1):
        lo = d - (nbj - 1)
        if lo < 0:
            lo = 0
        hi = d
        if hi > nbi - 1:
            hi = nbi - 1
        for t in prange(hi - lo + 1):
            bi = lo + t
            bj = d - bi
            i1 = min(n, (bi + 1) * tile)
            j1 = min(m, (bj + 1) * tile)
            for i in range(bi * tile + 1, i1 + 1):
                for j in range(bj * tile + 1, j1 + 1):
                    best = C[i - 1, j - 1] + (1.0 - S[i - 1, j - 1])
                    alt = C[i - 1, j] + penalty
                    if alt < best:
                        best = alt
                    alt = C[i, j - 1] + penalty
                    if alt < best:
                        best = alt
                    C[i, j] = best
    return C


def _traceback(C: np.ndarray, S: np.ndarray, penalty: float) -> list[Move]:
    """Recover the optimal path from a filled cost matrix.

    Tie-break order: diagonal, then skip-source (move down), then
    skip-target (move right). Exact float comparison is sound because each
    C cell was assigned the value of one of these three expressions.
    """
    i = C.shape[0] - 1
    j = C.shape[1] - 1
    moves: list[Move] = []
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            c = C[i, j]
            if c == C[i - 1, j - 1] + (1.0 - S[i - 1, j - 1]):
                moves.append(Move("D", i - 1, j - 1))
                i -= 1
                j -= 1
            elif c == C[i - 1, j] + penalty:
                moves.append(Move("GS", i=i - 1))
                i -= 1
            else:
                moves.append(Move("GT", j=j - 1))
                j -= 1
        elif i > 0:
            moves.append(Move("GS", i=i - 1))
            i -= 1
        else:
            moves.append(Move("GT", j=j - 1))
            j -= 1
    moves.reverse()
    return moves


def _check_penalty(penalty: float) -> float:
    penalty = float(penalty)
    if not penalty >= 0.0:
        raise ValueError(f"penalty {penalty} must be >= 0")
    return penalty


def nw_align(S: SimilarityMatrix, penalty: float) -> AlignmentPath:
    """Minimum-cost monotone alignment, evaluated row by row."""
    penalty = _check_penalty(penalty)
    C = _nw_costs(S.cells, penalty)
    return AlignmentPath(_traceback(C, S.cells, penalty), float(C[S.n, S.m]))


def nw_align_wavefront(
    S: SimilarityMatrix, penalty: float, workers: int = 1
) -> AlignmentPath:
    """Same result as nw_align, evaluated by anti-diagonal tiles in parallel.

    `workers` is capped at the runtime's available thread count; the output
    does not depend on the effective worker count.
    """
    penalty = _check_penalty(penalty)
    if workers < 1:
        raise ValueError(f"workers {workers} must be >= 1")
    effective = max(1, min(workers, numba.config.NUMBA_NUM_THREADS))
    prev = numba.get_num_threads()
    numba.set_num_threads(effective)
    try:
        C = _nw_costs_wavefront(S.cells, penalty, _TILE)
    finally:
        numba.set_num_threads(prev)
    return AlignmentPath(_traceback(C, S.cells, penalty), float(C[S.n, S.m]))


def search_align(S: SimilarityMatrix, penalty: float) -> AlignmentPath:
    """Uniform-cost search over the alignment lattice.

    Explores nodes in (cost, i, j) order, so results are deterministic.
    The returned cost matches nw_align within 1e-9; the path may differ
    when several paths tie.
    """
    penalty = _check_penalty(penalty)
    cells = S.cells
    n, m = S.n, S.m
    dist = np.full((n + 1, m + 1), np.inf)
    dist[0, 0] = 0.0
    # parent move per node: 0 diagonal, 1 skip-source, 2 skip-target
    parent = np.full((n + 1, m + 1), -1, dtype=np.int8)
    heap: list[tuple[float, int, int]] = [(0.0, 0, 0)]
    while heap:
        c, i, j = heapq.heappop(heap)
        if i == n and j == m:
            break
        if c > dist[i, j]:
            continue
        if i < n and j < m:
            nc = c + (1.0 - cells[i, j])
            if nc < dist[i + 1, j + 1]:
                dist[i + 1, j + 1] = nc
                parent[i + 1, j + 1] = 0
                heapq.heappush(heap, (float(nc), i + 1, j + 1))
        if i < n:
            nc = c + penalty
            if nc < dist[i + 1, j]:
                dist[i + 1, j] = nc
                parent[i + 1, j] = 1
                heapq.heappush(heap, (float(nc), i + 1, j))
        if j < m:
            nc = c + penalty
            if nc < dist[i, j + 1]:
                dist[i, j + 1] = nc
                parent[i, j + 1] = 2
                heapq.heappush(heap, (float(nc), i, j + 1))
    moves: list[Move] = []
    i, j = n, m
    while i > 0 or j > 0:
        p = parent[i, j]
        if p == 0:
            moves.append(Move("D", i - 1, j - 1))
            i -= 1
            j -= 1
        elif p == 1:
            moves.append(Move("GS", i=i - 1))
            i -= 1
        else:
            moves.append(Move("GT", j=j - 1))
            j -= 1
    moves.reverse()
    return AlignmentPath(moves, float(dist[n, m]))


def run_engine(
    engine: str, S: SimilarityMatrix, penalty: float, wavefront_workers: int = 1
) -> AlignmentPath:
    if engine == "sequential":
        return nw_align(S, penalty)
    if engine == "wavefront":
        return nw_align_wavefront(S, penalty, wavefront_workers)
    if engine == "search":
        return search_align(S, penalty)
    raise ValueError(f"unknown engine {engine!r}; choose one of {ENGINES}")


def build_similarity_matrix(
    pair: DocumentPair, model: ClassifierModel, lex: Lexicon
) -> SimilarityMatrix:
    """Score every candidate sentence pair of one document pair."""
    direction = (pair.source.lang, pair.target.lang)
    if tuple(model.direction) != direction:
        raise DataError(
            f"model direction {tuple(model.direction)} does not match document "
            f"pair {pair.id!r} direction {direction}"
        )
    n = len(pair.source.sentences)
    m = len(pair.target.sentences)
    if n == 0 or m == 0:
        raise DataError(f"document pair {pair.id!r} has an empty side")
    if n * m > MAX_CELLS:
        raise ResourceLimitError(
            f"document pair {pair.id!r} needs a {n}x{m} matrix, over the "
            f"{MAX_CELLS} cell limit"
        )
    src_pos = [i / max(1, n - 1) for i in range(n)]
    tgt_pos = [j / max(1, m - 1) for j in range(m)]
    cells = np.empty((n, m), dtype=np.float64)
    for i, src in enumerate(pair.source.sentences):
        for j, tgt in enumerate(pair.target.sentences):
            f = extract_features(src, tgt, src_pos[i], tgt_pos[j], lex)
            cells[i, j] = confidence(model, f)
    return SimilarityMatrix(cells)


def extract_pairs(
    path: AlignmentPath,
    S: SimilarityMatrix,
    pair: DocumentPair,
    params: MiningParams,
) -> list[MinedPair]:
    """Emit one MinedPair per diagonal move whose confidence clears the threshold."""
    out: list[MinedPair] = []
    src_sents = pair.source.sentences
    tgt_sents = pair.target.sentences
    for mv in path.moves:
        if mv.op != "D":
            continue
        conf = float(S.cells[mv.i, mv.j])
        if conf >= params.threshold:
            out.append(
                MinedPair(
                    src=src_sents[mv.i],
                    tgt=tgt_sents[mv.j],
                    confidence=conf,
                    doc_id=pair.id,
                    direction="forward",
                    src_index=mv.i,
                    tgt_index=mv.j,
                )
            )
    return out


def load_matrix_tsv(path: str) -> SimilarityMatrix:
    """Read the debug matrix format: one row per line, tab-separated decimals."""
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            try:
                row = [float(v) for v in line.split("\t")]
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: not a decimal ({exc})") from exc
            if rows and len(row) != len(rows[0]):
                raise DataError(
                    f"{path}: line {lineno}: expected {len(rows[0])} columns, "
                    f"got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: empty matrix")
    try:
        return SimilarityMatrix(np.array(rows, dtype=np.float64))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def format_path(path: AlignmentPath, S: SimilarityMatrix) -> list[str]:
    """Render a path in the debug format: D i j cost / GS i / GT j / TOTAL."""
    lines = []
    for mv in path.moves:
        if mv.op == "D":
            lines.append(f"D {mv.i} {mv.j} {1.0 - float(S.cells[mv.i, mv.j]):.6f}")
        elif mv.op == "GS":
            lines.append(f"GS {mv.i}")
        else:
            lines.append(f"GT {mv.j}")
    lines.append(f"TOTAL {path.total_cost:.6f}")
    return lines
