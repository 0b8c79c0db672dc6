"""Okapi BM25 bag-of-words baseline ranker.

Documents are the concatenated labels of a profile's items; the query is
the concatenated labels of the offer's items. Offer weights are ignored.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .errors import ConceptLookupError, InputError
from .model import DESCENDING_SCORE, RankEntry, Ranking

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

_TOKEN_RE = re.compile(r"[\w+#.]+")


def tokenize(text: str) -> list:
    """Lowercased word tokens; '+', '#' and '.' survive inside tokens (c++, c#, .net)."""
    out = []
    for tok in _TOKEN_RE.findall(text.lower()):
        tok = tok.rstrip(".")
        if tok and any(ch.isalnum() for ch in tok):
            out.append(tok)
    return out


@dataclass(frozen=True)
class Bm25Params:
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    def __post_init__(self):
        if self.k1 < 0:
            raise InputError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise InputError("b must lie in [0, 1]")


def item_text(items_by_category, labels=None) -> str:
    """Concatenate item labels (taxonomy label when known, else the concept id)."""
    words = []
    for cat in sorted(items_by_category):
        for it in items_by_category[cat]:
            label = labels.label(it.concept) if labels is not None else it.concept
            words.append(label)
    return " ".join(words)


@dataclass(frozen=True)
class Bm25Index:
    doc_count: int
    doc_freq: dict
    doc_lengths: dict
    avg_doc_len: float
    term_freq: dict
    params: Bm25Params

    def idf(self, token) -> float:
        df = self.doc_freq.get(token, 0)
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def build_index_from_tokens(docs: dict, params: Bm25Params = Bm25Params()) -> Bm25Index:
    """Index pre-tokenised documents keyed by profile id."""
    if not docs:
        raise InputError("cannot index an empty profile list")
    term_freq = {}
    doc_freq = Counter()
    lengths = {}
    for pid, toks in docs.items():
        tf = Counter(toks)
        lengths[pid] = len(toks)
        doc_freq.update(tf.keys())
        for t, n in tf.items():
            term_freq[pid, t] = n
    avg = sum(lengths.values()) / len(lengths)
    return Bm25Index(len(docs), dict(doc_freq), lengths, avg, term_freq, params)


def build_index(profiles, params: Bm25Params = Bm25Params(), labels=None) -> Bm25Index:
    if not profiles:
        raise InputError("cannot index an empty profile list")
    return build_index_from_tokens({p.id: tokenize(item_text(p.items, labels)) for p in profiles}, params)


def bm25_score(index: Bm25Index, query_tokens, profile_id) -> float:
    if profile_id not in index.doc_lengths:
        raise ConceptLookupError(f"profile {profile_id!r} is not indexed")
    k1, b = index.params.k1, index.params.b
    dl = index.doc_lengths[profile_id]
    # avg_doc_len of 0 means every document is empty, so every tf is 0
    norm = 1.0 - b + (b * dl / index.avg_doc_len if index.avg_doc_len else 0.0)
    score = 0.0
    for t in sorted(set(query_tokens)):
        tf = index.term_freq.get((profile_id, t), 0)
        if tf:
            score += index.idf(t) * (tf * (k1 + 1.0)) / (tf + k1 * norm)
    return score


def rank_bm25(offer, profiles, params: Bm25Params = Bm25Params(), labels=None) -> Ranking:
    """Descending BM25 score; ties fall back to profile id order."""
    if not profiles:
        raise InputError("cannot rank an empty profile list")
    index = build_index(profiles, params, labels)
    query = tokenize(item_text(offer.items, labels))
    scores = {p.id: bm25_score(index, query, p.id) for p in profiles}
    order = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return Ranking(
        [RankEntry(r, pid, s) for r, (pid, s) in enumerate(order, start=1)],
        DESCENDING_SCORE,
    )
