"""Correct-sentence filter: per-character error probabilities compared
against per-category thresholds.

Characters split into three categories (special, entity, normal). A sentence
counts as correct only if, in every category, the maximum error probability
stays strictly below that category's threshold; an empty category contributes
a maximum of zero. The probability source is pluggable: the shipped default
derives scores from language-model surprisal, and externally computed
per-character probabilities can be supplied instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, Sequence

from sklearn.base import BaseEstimator

from .lexicon import Lexicon
from .lm import BOS, NGramLanguageModel
from .tagger import DEFAULT_SPECIAL_CHARS
from .validation import check_unit_interval, strip_reserved

ProbabilityProvider = Callable[[str], Sequence[float]]

_LN10 = math.log(10.0)


class CharCategory(Enum):
    SPECIAL = "special"
    ENTITY = "entity"
    NORMAL = "normal"


@dataclass(frozen=True)
class Thresholds:
    special: float = 0.5
    entity: float = 0.5
    normal: float = 0.5

    def __post_init__(self):
        check_unit_interval(self.special, "thresholds.special")
        check_unit_interval(self.entity, "thresholds.entity")
        check_unit_interval(self.normal, "thresholds.normal")


def categorize(
    sentence: str, lexicon: Lexicon, special_chars: frozenset | None = None
) -> list[CharCategory]:
    """Category per character; special wins over entity on overlap."""
    if not sentence:
        raise ValueError("sentence must be non-empty")
    special = special_chars if special_chars is not None else DEFAULT_SPECIAL_CHARS
    cats = [CharCategory.NORMAL] * len(sentence)
    pos = 0
    for tok in lexicon.segment_text(sentence):
        entry = lexicon.by_surface.get(tok)
        if entry is not None and entry.is_entity:
            for i in range(pos, pos + len(tok)):
                cats[i] = CharCategory.ENTITY
        pos += len(tok)
    for i, ch in enumerate(sentence):
        if ch in special:
            cats[i] = CharCategory.SPECIAL
    return cats


def is_correct(
    sentence: str,
    probs: Sequence[float],
    categories: Sequence[CharCategory],
    thresholds: Thresholds,
) -> bool:
    if len(probs) != len(sentence) or len(categories) != len(sentence):
        raise ValueError(
            f"expected {len(sentence)} probabilities/categories, "
            f"got {len(probs)}/{len(categories)}"
        )
    maxima = {c: 0.0 for c in CharCategory}
    for p, cat in zip(probs, categories):
        if p > maxima[cat]:
            maxima[cat] = p
    return (
        maxima[CharCategory.SPECIAL] < thresholds.special
        and maxima[CharCategory.ENTITY] < thresholds.entity
        and maxima[CharCategory.NORMAL] < thresholds.normal
    )


def lm_probability_provider(
    model: NGramLanguageModel, surprisal_cap: float = 12.0
) -> ProbabilityProvider:
    """Per-character error score min(1, surprisal/cap), surprisal in nats.

    A stand-in for a trained detector: monotone in how surprising each
    character is to the language model.
    """
    if surprisal_cap <= 0:
        raise ValueError("surprisal_cap must be positive")

    def provider(sentence: str) -> list[float]:
        chars = strip_reserved(sentence)
        hlen = model.order - 1
        hist = BOS * hlen
        scores = []
        for ch in chars:
            surprisal = -model.logprob10(ch, hist) * _LN10
            scores.append(min(1.0, surprisal / surprisal_cap))
            if hlen:
                hist = (hist + ch)[-hlen:]
        return scores

    return provider


class SentenceCorrectnessFilter(BaseEstimator):
    """Routes sentences into correct/suspect with ``predict``."""

    def __init__(
        self,
        lexicon: Lexicon,
        provider: ProbabilityProvider,
        thresholds: Thresholds | None = None,
        special_chars: frozenset | None = None,
    ):
        self.lexicon = lexicon
        self.provider = provider
        self.thresholds = thresholds
        self.special_chars = special_chars

    def fit(self, X=None, y=None) -> "SentenceCorrectnessFilter":
        return self

    def predict_one(self, sentence: str, probs: Sequence[float] | None = None) -> bool:
        if probs is None:
            probs = self.provider(sentence)
        cats = categorize(sentence, self.lexicon, self.special_chars)
        return is_correct(sentence, probs, cats, self.thresholds or Thresholds())

    def predict(self, X: Iterable[str]) -> list[bool]:
        return [self.predict_one(s) for s in X]


@dataclass
class FilterReport:
    total: int = 0
    kept: int = 0
    suspect: int = 0

    def add(self, correct: bool) -> None:
        self.total += 1
        if correct:
            self.kept += 1
        else:
            self.suspect += 1

    def as_dict(self) -> dict:
        rate = self.kept / self.total if self.total else None
        return {
            "total": self.total,
            "kept": self.kept,
            "suspect": self.suspect,
            "kept_rate": rate,
        }


def filter_corpus(
    sentences: Iterable[str],
    filt: SentenceCorrectnessFilter,
    probs: Iterable[Sequence[float]] | None = None,
    report: FilterReport | None = None,
) -> Iterator[tuple[str, bool]]:
    """Stream (sentence, is_correct); external ``probs`` override the provider
    line by line when given."""
    if report is None:
        report = FilterReport()
    if probs is None:
        for s in sentences:
            ok = filt.predict_one(s)
            report.add(ok)
            yield s, ok
    else:
        prob_iter = iter(probs)
        for idx, s in enumerate(sentences):
            try:
                vec = next(prob_iter)
            except StopIteration:
                raise ValueError(
                    f"probability stream ended before sentence {idx + 1}"
                ) from None
            if len(vec) != len(s):
                raise ValueError(
                    f"sentence {idx + 1}: {len(vec)} probabilities for {len(s)} characters"
                )
            ok = filt.predict_one(s, probs=vec)
            report.add(ok)
            yield s, ok
