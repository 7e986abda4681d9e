"""Simulated pinyin IME: ranked candidates for a typed pinyin in context.

The candidate pool comes from the lexicon reading index; ranking is the
language-model score of the candidate's characters appended to the typed
context, with lexicon frequency and code-point order as deterministic tie
breakers. This stands in for a production IME: transparent, reproducible,
and close enough for noise simulation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .lexicon import Lexicon
from .lm import BOS, NGramLanguageModel
from .pinyin import PinyinSeq, PinyinTag


@dataclass(frozen=True)
class Candidate:
    surface: str
    score: float
    frequency: int


@dataclass(frozen=True)
class CandidateList:
    candidates: tuple[Candidate, ...]
    query_pinyin: PinyinSeq
    fuzzy_used: bool

    def surfaces(self) -> list[str]:
        return [c.surface for c in self.candidates]

    def __len__(self):
        return len(self.candidates)

    def __bool__(self):
        return bool(self.candidates)


@dataclass(frozen=True)
class TypingPolicy:
    """What the simulated typist is trying to do.

    ``avoid`` is the correct token the typist would never accept as noise.
    ``require_tag`` optionally restricts the pool to candidates whose pinyin
    relation to ``reference`` (defaults to ``avoid``) is exactly that tag,
    which pins the realized noise class to the sampled one.
    """

    avoid: str
    require_tag: PinyinTag | None = None
    reference: str | None = None


class PinyinIME:
    def __init__(self, lexicon: Lexicon, model: NGramLanguageModel, k: int = 5):
        self.lexicon = lexicon
        self.model = model
        self.k = k

    def score(self, context: str, surface: str) -> float:
        """log10 probability of the candidate's characters given the context."""
        hlen = self.model.order - 1
        hist = (BOS * hlen + context)[-hlen:] if hlen else ""
        total = 0.0
        for ch in surface:
            total += self.model.logprob10(ch, hist)
            if hlen:
                hist = (hist + ch)[-hlen:]
        return total

    def candidates(
        self, context: str, p: PinyinSeq, fuzzy: bool = False, k: int | None = None
    ) -> CandidateList:
        if k is None:
            k = self.k
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        pool = self.lexicon.lookup_by_pinyin(p, fuzzy=fuzzy)
        scored = [
            Candidate(e.surface, self.score(context, e.surface), e.frequency) for e in pool
        ]
        scored.sort(key=lambda c: (-c.score, -c.frequency, c.surface))
        return CandidateList(tuple(scored[:k]), p, fuzzy)

    def type_token(
        self,
        context: str,
        p: PinyinSeq,
        policy: TypingPolicy,
        rng: random.Random,
        fuzzy: bool = False,
    ) -> str | None:
        """Surface the simulated typist picks, or None when nothing is usable.

        If the top candidate is the correct token the typist slips to the
        second or third candidate (uniformly; second when only two exist).
        Otherwise the typist takes the top candidate as-is. Candidates whose
        length differs from the token being replaced are never usable: the
        substitution must preserve sentence length.
        """
        depth = self.k if policy.require_tag is None else max(self.k, 16)
        ranked = self.candidates(context, p, fuzzy=fuzzy, k=depth).candidates
        ranked = tuple(c for c in ranked if len(c.surface) == len(policy.avoid))
        if policy.require_tag is not None:
            reference = policy.reference if policy.reference is not None else policy.avoid
            ranked = tuple(
                c
                for c in ranked
                if c.surface == policy.avoid
                or self.lexicon.best_tag(reference, c.surface) is policy.require_tag
            )
            ranked = ranked[: self.k]
        if not ranked:
            return None
        if ranked[0].surface != policy.avoid:
            return ranked[0].surface
        if len(ranked) == 1:
            return None
        if len(ranked) == 2:
            return ranked[1].surface
        return ranked[rng.choice((1, 2))].surface
