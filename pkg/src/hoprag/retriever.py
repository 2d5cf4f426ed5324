"""Okapi BM25 ranked retrieval over an in-memory inverted index.

Scoring uses the non-negative IDF variant ln((N - df + 0.5)/(df + 0.5) + 1)
so that zero-score exclusion is well-defined. Passages are indexed in
their "title: text" rendering. Ties break by ascending passage id.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Passage
from .errors import HopragError, PassageNotFoundError

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase Unicode-aware split on non-alphanumeric characters.

    No stemming, no stopword removal; empty tokens never occur.
    """
    return _TOKEN.findall(text.lower())


@dataclass
class RetrievalConfig:
    k1: float = 1.2
    b: float = 0.75
    top_k_retrieve: int = 10
    top_k_context: int = 3

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError("k1 must be > 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        if self.top_k_context > self.top_k_retrieve:
            raise ValueError("top_k_context must be <= top_k_retrieve")


@dataclass(frozen=True)
class RankedPassage:
    passage: Passage
    score: float
    rank: int


@dataclass
class Index:
    postings: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)
    avg_doc_length: float = 0.0
    doc_count: int = 0
    # tf lookup maps, derived from postings
    _tf: dict[str, dict[str, int]] = field(default_factory=dict, repr=False)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def tf(self, term: str, passage_id: str) -> int:
        return self._tf.get(term, {}).get(passage_id, 0)


def build_index(corpus: Corpus) -> Index:
    index = Index(doc_count=corpus.doc_count)
    total_len = 0
    for passage in corpus:
        counts: dict[str, int] = {}
        tokens = tokenize(passage.rendered_text())
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        index.doc_lengths[passage.id] = len(tokens)
        total_len += len(tokens)
        for term, tf in counts.items():
            index.postings.setdefault(term, []).append((passage.id, tf))
            index._tf.setdefault(term, {})[passage.id] = tf
    if index.doc_count > 0:
        index.avg_doc_length = total_len / index.doc_count
    return index


def _idf(index: Index, term: str) -> float:
    df = index.df(term)
    return math.log((index.doc_count - df + 0.5) / (df + 0.5) + 1.0)


def _tf_part(tf: int, doc_len: int, avg_len: float, k1: float, b: float) -> float:
    norm = 1.0 - b + b * (doc_len / avg_len if avg_len > 0 else 0.0)
    return tf * (k1 + 1.0) / (tf + k1 * norm)


def score(
    index: Index,
    query_terms: list[str],
    passage_id: str,
    k1: float = 1.2,
    b: float = 0.75,
) -> float:
    """BM25 score of one passage for the given query terms."""
    if passage_id not in index.doc_lengths:
        raise PassageNotFoundError(passage_id)
    doc_len = index.doc_lengths[passage_id]
    total = 0.0
    for term in query_terms:
        tf = index.tf(term, passage_id)
        if tf == 0:
            continue
        total += _idf(index, term) * _tf_part(tf, doc_len, index.avg_doc_length, k1, b)
    return total


def retrieve(
    index: Index,
    corpus: Corpus,
    query: str,
    k: int,
    k1: float = 1.2,
    b: float = 0.75,
) -> list[RankedPassage]:
    """Top-k passages by BM25 score; zero-score passages are excluded."""
    if k < 1:
        raise ValueError("k must be >= 1")
    query_terms = tokenize(query)
    scores: dict[str, float] = {}
    # accumulate per query term so the addition order per doc matches the
    # naive per-doc sum over query terms
    for term in query_terms:
        idf = _idf(index, term)
        for passage_id, tf in index.postings.get(term, ()):
            part = idf * _tf_part(
                tf, index.doc_lengths[passage_id], index.avg_doc_length, k1, b
            )
            scores[passage_id] = scores.get(passage_id, 0.0) + part
    ordered = sorted(
        ((pid, s) for pid, s in scores.items() if s > 0.0),
        key=lambda item: (-item[1], item[0]),
    )
    return [
        RankedPassage(passage=corpus.get_passage(pid), score=s, rank=i)
        for i, (pid, s) in enumerate(ordered[:k], start=1)
    ]


def save_index(index: Index, path: str | Path) -> None:
    payload = {
        "postings": {t: list(map(list, ps)) for t, ps in index.postings.items()},
        "doc_lengths": index.doc_lengths,
        "avg_doc_length": index.avg_doc_length,
        "doc_count": index.doc_count,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)


def load_index(path: str | Path) -> Index:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "postings" not in payload:
        raise HopragError(f"not an index snapshot: {path}")
    index = Index(
        postings={t: [(p, int(tf)) for p, tf in ps] for t, ps in payload["postings"].items()},
        doc_lengths={p: int(n) for p, n in payload["doc_lengths"].items()},
        avg_doc_length=float(payload["avg_doc_length"]),
        doc_count=int(payload["doc_count"]),
    )
    for term, postings in index.postings.items():
        index._tf[term] = dict(postings)
    return index
