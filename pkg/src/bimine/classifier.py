"""Translation-pair classifier: features, training, calibrated confidence.

The model is a linear logistic classifier over 7 bounded features. Training
builds positives from a line-aligned seed corpus and negatives by sampling
mismatched pairs (half uniform, half near-offset), then fits weights with
plain SGD under logistic loss. Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass

from .corpus import SeedCorpus, Sentence
from .errors import DataError
from .lexicon import Lexicon, coverage

log = logging.getLogger(__name__)

SCHEMA_ID = "pairwise-v1"
FEATURE_COUNT = 7
MODEL_VERSION = 1

# Smallest / largest values confidence may return; keeps the output inside
# the open interval (0, 1) even for extreme margins.
_P_MIN = 1e-300
_P_MAX = 1.0 - 2.0**-53

THRESHOLD_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
DEFAULT_PENALTY = 0.2


@dataclass
class FeatureVector:
    values: list[float]
    schema_id: str = SCHEMA_ID


@dataclass
class ClassifierModel:
    schema_id: str
    weights: list[float]
    bias: float
    direction: tuple[str, str]
    default_threshold: float
    default_penalty: float
    version: int = MODEL_VERSION
    trained_on: dict | None = None


def _punct_count(tokens: list[str]) -> int:
    return sum(1 for t in tokens if not any(c.isalnum() for c in t))


def _digit_set(tokens: list[str]) -> set[str]:
    return {t for t in tokens if t.isdigit()}


def _ratio_min_max(a: int, b: int) -> float:
    if a == 0 and b == 0:
        return 1.0
    return min(a, b) / max(a, b)


def extract_features(
    src: Sentence,
    tgt: Sentence,
    src_pos: float,
    tgt_pos: float,
    lex: Lexicon,
) -> FeatureVector:
    """Compute the 7-feature vector for one candidate sentence pair.

    Order: token-length ratio, src->tgt lexicon coverage, tgt->src coverage
    (reverse lookup), digit-token Jaccard, punctuation-count ratio,
    positional proximity, constant 1. All values lie in [0, 1]. Positions
    are fractions of document length (0 for singleton documents).
    """
    src_digits = _digit_set(src.tokens)
    tgt_digits = _digit_set(tgt.tokens)
    if src_digits or tgt_digits:
        digit_overlap = len(src_digits & tgt_digits) / len(src_digits | tgt_digits)
    else:
        digit_overlap = 1.0
    values = [
        _ratio_min_max(len(src.tokens), len(tgt.tokens)),
        coverage(lex, src.tokens, tgt.tokens),
        coverage(lex.reversed(), tgt.tokens, src.tokens),
        digit_overlap,
        _ratio_min_max(_punct_count(src.tokens), _punct_count(tgt.tokens)),
        1.0 - abs(src_pos - tgt_pos),
        1.0,
    ]
    return FeatureVector(values=values)


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def confidence(model: ClassifierModel, f: FeatureVector) -> float:
    """sigmoid(weights . values + bias), clamped inside the open interval."""
    if f.schema_id != model.schema_id:
        raise DataError(
            f"feature schema {f.schema_id!r} does not match model schema "
            f"{model.schema_id!r}"
        )
    z = model.bias
    for w, x in zip(model.weights, f.values):
        z += w * x
    return min(max(_sigmoid(z), _P_MIN), _P_MAX)


def _f1_at(scores: list[tuple[float, int]], threshold: float) -> float:
    tp = fp = fn = 0
    for p, y in scores:
        pred = 1 if p >= threshold else 0
        if pred and y:
            tp += 1
        elif pred:
            fp += 1
        elif y:
            fn += 1
    if tp == 0:
        return 0.0
    prec = tp / (tp + fp)
    rec = tp / (tp + fn)
    return 2.0 * prec * rec / (prec + rec)


def _near_index(i: int, n: int, rng: random.Random) -> int:
    offset = rng.randint(1, 3) * rng.choice((-1, 1))
    j = i + offset
    if not 0 <= j < n:
        j = i - offset
    return j


def train(
    corpus: SeedCorpus,
    lex: Lexicon,
    negatives_per_positive: int = 2,
    epochs: int = 20,
    seed: int = 42,
) -> ClassifierModel:
    """Train a translation-pair classifier from a line-aligned seed corpus.

    Positives are the aligned pairs; per positive, ``negatives_per_positive``
    mismatched pairs are sampled (half uniform over other lines, half offset
    by 1-3 lines). 10% of the examples are held out to pick the default
    confidence threshold (the F1-maximizing point of a 0.05-step grid).
    """
    n = len(corpus.pairs)
    if n < 10:
        raise DataError(f"seed corpus has {n} pairs; need at least 10")
    if negatives_per_positive < 1:
        raise ValueError("negatives_per_positive must be >= 1")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")

    rng = random.Random(seed)
    denom = max(1, n - 1)
    pos_of = [i / denom for i in range(n)]

    examples: list[tuple[list[float], int]] = []
    for i, (src, tgt) in enumerate(corpus.pairs):
        f = extract_features(src, tgt, pos_of[i], pos_of[i], lex)
        examples.append((f.values, 1))
        near = negatives_per_positive // 2
        uniform = negatives_per_positive - near
        for _ in range(uniform):
            j = rng.randrange(n - 1)
            if j >= i:
                j += 1
            g = extract_features(src, corpus.pairs[j][1], pos_of[i], pos_of[j], lex)
            examples.append((g.values, 0))
        for _ in range(near):
            j = _near_index(i, n, rng)
            g = extract_features(src, corpus.pairs[j][1], pos_of[i], pos_of[j], lex)
            examples.append((g.values, 0))

    rng.shuffle(examples)
    n_held = max(1, int(0.1 * len(examples)))
    held, train_set = examples[:n_held], examples[n_held:]

    weights = [0.0] * FEATURE_COUNT
    bias = 0.0
    step = 0
    for _ in range(epochs):
        rng.shuffle(train_set)
        for x, y in train_set:
            z = bias
            for k in range(FEATURE_COUNT):
                z += weights[k] * x[k]
            g = _sigmoid(z) - y
            lr = 0.1 / (1.0 + 0.01 * step)
            for k in range(FEATURE_COUNT):
                weights[k] -= lr * g * x[k]
            bias -= lr * g
            step += 1

    model = ClassifierModel(
        schema_id=SCHEMA_ID,
        weights=weights,
        bias=bias,
        direction=lex.direction,
        default_threshold=0.5,
        default_penalty=DEFAULT_PENALTY,
        trained_on={"pairs": n, "seed": seed},
    )

    scored = [(confidence(model, FeatureVector(values=x)), y) for x, y in held]
    best_t, best_f1 = THRESHOLD_GRID[0], -1.0
    for t in THRESHOLD_GRID:
        f1 = _f1_at(scored, t)
        if f1 >= best_f1:  # ties resolve to the higher threshold
            best_t, best_f1 = t, f1
    model.default_threshold = best_t
    if best_f1 < 0.6:
        log.warning(
            "held-out F1 %.3f < 0.6 at threshold %.2f; the seed corpus may be "
            "degenerate",
            best_f1,
            best_t,
        )
    return model


def model_to_json(model: ClassifierModel) -> str:
    payload = {
        "version": model.version,
        "schema_id": model.schema_id,
        "direction": list(model.direction),
        "weights": model.weights,
        "bias": model.bias,
        "default_threshold": model.default_threshold,
        "default_penalty": model.default_penalty,
        "trained_on": model.trained_on,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def save_model(model: ClassifierModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


def load_model(path: str) -> ClassifierModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a valid model file ({exc.msg})") from exc
    if not isinstance(payload, dict) or "version" not in payload:
        raise DataError(f"{path}: not a valid model file (no version)")
    if payload["version"] != MODEL_VERSION:
        raise DataError(
            f"{path}: unsupported model version {payload['version']!r} "
            f"(expected {MODEL_VERSION})"
        )
    try:
        model = ClassifierModel(
            schema_id=payload["schema_id"],
            weights=[float(w) for w in payload["weights"]],
            bias=float(payload["bias"]),
            direction=(payload["direction"][0], payload["direction"][1]),
            default_threshold=float(payload["default_threshold"]),
            default_penalty=float(payload["default_penalty"]),
            version=payload["version"],
            trained_on=payload.get("trained_on"),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed model file ({exc})") from exc
    if len(model.weights) != FEATURE_COUNT:
        raise DataError(
            f"{path}: model has {len(model.weights)} weights; schema "
            f"{model.schema_id!r} requires {FEATURE_COUNT}"
        )
    if not (0.0 <= model.default_threshold <= 1.0) or model.default_penalty < 0:
        raise DataError(f"{path}: default parameters out of range")
    return model
