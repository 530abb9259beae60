"""Node importance for a reservoir viewed as a weighted directed graph.

Edge convention: ``W[r, c]`` is the edge ``c -> r``, because ``W @ x``
carries the state of node ``c`` into node ``r``.  Node ``i`` therefore
reads its incoming strengths from row ``i`` and its outgoing strengths
from column ``i``.  Self-loops count on both sides.

Measures:

* ``C_in``  total incoming strength  ``in_pos + in_neg``
* ``C_out`` total outgoing strength  ``out_pos + out_neg``
* ``C1``    incoming sign balance    ``(in_pos - in_neg) / (in_pos + in_neg)``
* ``C2``    overall sign balance over incoming and outgoing edges
* ``C3``    total strength           ``in_pos + out_pos + in_neg + out_neg``

A zero denominator in ``C1``/``C2`` (an isolated node) scores 0.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_matrix

MEASURES = ("C_in", "C_out", "C1", "C2", "C3")
_ALIASES = {m.lower(): m for m in MEASURES}
_ALIASES.update({"cin": "C_in", "cout": "C_out", "in": "C_in", "out": "C_out"})


def canonical_measure(measure):
    key = str(measure).strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown centrality measure {measure!r}; choose from {MEASURES}")
    return _ALIASES[key]


@dataclass(frozen=True)
class SignedStrengths:
    in_pos: np.ndarray
    in_neg: np.ndarray
    out_pos: np.ndarray
    out_neg: np.ndarray


@dataclass(frozen=True)
class CentralityScores:
    measure: str
    scores: np.ndarray

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node_id", "measure", "score"])
            for i, s in enumerate(self.scores):
                writer.writerow([i, self.measure, repr(float(s))])
        return path


def signed_strengths(w) -> SignedStrengths:
    w = as_matrix(w, "w")
    if w.shape[0] != w.shape[1]:
        raise ValueError(f"w must be square, got {w.shape}")
    pos = np.where(w > 0, w, 0.0)
    neg = np.where(w < 0, -w, 0.0)
    return SignedStrengths(
        in_pos=pos.sum(axis=1), in_neg=neg.sum(axis=1),
        out_pos=pos.sum(axis=0), out_neg=neg.sum(axis=0),
    )


def _balance(num, den):
    out = np.zeros_like(den)
    np.divide(num, den, out=out, where=den > 0)
    return out


def centrality(w, measure) -> CentralityScores:
    measure = canonical_measure(measure)
    s = signed_strengths(w)
    if measure == "C_in":
        scores = s.in_pos + s.in_neg
    elif measure == "C_out":
        scores = s.out_pos + s.out_neg
    elif measure == "C1":
        scores = _balance(s.in_pos - s.in_neg, s.in_pos + s.in_neg)
    elif measure == "C2":
        # grouped so that negating W flips the sign exactly
        pos, neg = s.in_pos + s.out_pos, s.in_neg + s.out_neg
        scores = _balance(pos - neg, pos + neg)
    else:
        scores = (s.in_pos + s.out_pos) + (s.in_neg + s.out_neg)
    return CentralityScores(measure=measure, scores=scores)


def rank_nodes(scores, exclude=(), by_magnitude=False):
    """Node ids ordered for removal: lowest score first, ties by index.

    ``by_magnitude`` ranks on ``|score|`` instead of the signed value.
    """
    values = scores.scores if isinstance(scores, CentralityScores) else np.asarray(scores)
    if by_magnitude:
        values = np.abs(values)
    excluded = set(int(i) for i in exclude)
    bad = [i for i in excluded if not 0 <= i < len(values)]
    if bad:
        raise ValueError(f"excluded ids out of range: {sorted(bad)}")
    # lexsort: last key is primary
    order = np.lexsort((np.arange(len(values)), values))
    return [int(i) for i in order if int(i) not in excluded]
