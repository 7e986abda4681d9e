"""Pseudo-data construction: simulate typing a correct sentence through the
pinyin IME, inject sampled noise, and keep pairs that pass the perplexity
filter.

Per sentence: draw the number of errors, then for each error draw a token
granularity (word or single character), pick a target token uniformly, draw
a pinyin relation, mutate the token's pinyin accordingly, and type it through
the IME. The typed prefix is always the correct text before the token. A
generated sentence is accepted only if its perplexity rose relative to the
original by more than ``delta`` (when the filter is enabled); otherwise the
whole placement is retried with fresh draws, keeping the error count.
"""

from __future__ import annotations

import json
import multiprocessing
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import UnachievableMutationError
from .ime import PinyinIME, TypingPolicy
from .lexicon import Lexicon
from .lm import NGramLanguageModel, relative_ppl_increase
from .pinyin import PinyinTag
from .validation import all_cjk, check_distribution, is_cjk

_TOKEN_RETRIES = 8


class Granularity(Enum):
    WORD = "word"
    CHAR = "char"


@dataclass(frozen=True)
class ErrorSpan:
    offset: int
    wrong: str
    correct: str
    pinyin_tag: PinyinTag
    granularity: Granularity

    def __post_init__(self):
        if len(self.wrong) != len(self.correct):
            raise ValueError("error spans must be length-preserving")
        if self.wrong == self.correct:
            raise ValueError("error span does not change the text")


@dataclass(frozen=True)
class SentencePair:
    source: str  # noised
    target: str  # correct
    spans: tuple[ErrorSpan, ...]

    def validate(self) -> "SentencePair":
        if len(self.source) != len(self.target):
            raise ValueError("source and target must have equal lengths")
        covered = set()
        prev_end = 0
        for span in self.spans:
            if span.offset < prev_end:
                raise ValueError("spans must be sorted and non-overlapping")
            end = span.offset + len(span.wrong)
            if end > len(self.source):
                raise ValueError("span outside sentence")
            if self.source[span.offset : end] != span.wrong:
                raise ValueError("span wrong text does not match source")
            if self.target[span.offset : end] != span.correct:
                raise ValueError("span correct text does not match target")
            covered.update(range(span.offset, end))
            prev_end = end
        diffs = {i for i, (a, b) in enumerate(zip(self.source, self.target)) if a != b}
        if diffs != covered:
            raise ValueError("source and target must differ exactly on the spans")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "source": self.source,
                "target": self.target,
                "spans": [
                    {
                        "offset": s.offset,
                        "wrong": s.wrong,
                        "correct": s.correct,
                        "pinyin_tag": s.pinyin_tag.value,
                        "granularity": s.granularity.value,
                    }
                    for s in self.spans
                ],
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "SentencePair":
        obj = json.loads(line)
        spans = tuple(
            ErrorSpan(
                offset=s["offset"],
                wrong=s["wrong"],
                correct=s["correct"],
                pinyin_tag=PinyinTag(s["pinyin_tag"]),
                granularity=Granularity(s["granularity"]),
            )
            for s in obj.get("spans", ())
        )
        return cls(obj["source"], obj["target"], spans)

    def to_tsv(self) -> str:
        return f"{self.source}\t{self.target}"


_DEFAULT_PINYIN_DIST = {
    PinyinTag.SAME: 0.824,
    PinyinTag.FUZZY: 0.08,
    PinyinTag.SIMILAR: 0.074,
    PinyinTag.DISSIMILAR: 0.022,
}
_DEFAULT_TOKEN_DIST = {Granularity.WORD: 0.4, Granularity.CHAR: 0.6}
_DEFAULT_NUM_DIST = {1: 0.91, 2: 0.09}


@dataclass
class NoiseConfig:
    """Sampled-noise distributions plus the perplexity filter settings."""

    pinyin_dist: dict = field(default_factory=lambda: dict(_DEFAULT_PINYIN_DIST))
    token_dist: dict = field(default_factory=lambda: dict(_DEFAULT_TOKEN_DIST))
    num_dist: dict = field(default_factory=lambda: dict(_DEFAULT_NUM_DIST))
    delta: float = 0.0
    max_attempts: int = 10
    enable_lm_filter: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> "NoiseConfig":
        check_distribution(self.pinyin_dist, "pinyin_dist")
        check_distribution(self.token_dist, "token_dist")
        check_distribution(self.num_dist, "num_dist")
        for k in self.pinyin_dist:
            if not isinstance(k, PinyinTag):
                raise ValueError(f"pinyin_dist key {k!r} is not a PinyinTag")
        for k in self.token_dist:
            if not isinstance(k, Granularity):
                raise ValueError(f"token_dist key {k!r} is not a Granularity")
        for k in self.num_dist:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"num_dist key {k!r} is not a positive integer")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        return self

    def _items(self, dist, order):
        return [(k, dist[k]) for k in order if k in dist]

    def pinyin_items(self):
        return self._items(self.pinyin_dist, list(PinyinTag))

    def token_items(self):
        return self._items(self.token_dist, list(Granularity))

    def num_items(self):
        return self._items(self.num_dist, sorted(self.num_dist))


def _draw(items, rng: random.Random):
    x = rng.random()
    acc = 0.0
    for outcome, p in items:
        acc += p
        if x < acc:
            return outcome
    return items[-1][0]


REASON_EMITTED = "emitted"
REASON_NO_ELIGIBLE = "no_eligible_token"
REASON_NO_CANDIDATE = "no_candidate"
REASON_LM_FILTERED = "lm_filtered"


@dataclass
class GenerationReport:
    attempted: int = 0
    emitted: int = 0
    lm_filtered: int = 0
    no_candidate: int = 0
    no_eligible_token: int = 0

    def add(self, reason: str) -> None:
        self.attempted += 1
        if reason == REASON_EMITTED:
            self.emitted += 1
        elif reason == REASON_LM_FILTERED:
            self.lm_filtered += 1
        elif reason == REASON_NO_CANDIDATE:
            self.no_candidate += 1
        elif reason == REASON_NO_ELIGIBLE:
            self.no_eligible_token += 1
        else:
            raise ValueError(f"unknown reason {reason!r}")

    @property
    def rejected(self) -> int:
        return self.lm_filtered + self.no_candidate + self.no_eligible_token

    def as_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "emitted": self.emitted,
            "lm_filtered": self.lm_filtered,
            "no_candidate": self.no_candidate,
            "no_eligible_token": self.no_eligible_token,
        }

    def merge(self, other: "GenerationReport") -> None:
        self.attempted += other.attempted
        self.emitted += other.emitted
        self.lm_filtered += other.lm_filtered
        self.no_candidate += other.no_candidate
        self.no_eligible_token += other.no_eligible_token


class IMENoiseGenerator(BaseEstimator, TransformerMixin):
    """Transformer from correct sentences to noised sentence pairs.

    ``transform`` returns one entry per input sentence: a SentencePair, or
    None when no acceptable noise was found. Each sentence is generated
    from its own RNG stream seeded with ``seed + index``, so results do not
    depend on batching or worker count.
    """

    def __init__(
        self,
        lexicon: Lexicon,
        model: NGramLanguageModel,
        config: NoiseConfig | None = None,
        seed: int = 0,
        k: int = 5,
    ):
        self.lexicon = lexicon
        self.model = model
        self.config = config
        self.seed = seed
        self.k = k

    def fit(self, X=None, y=None) -> "IMENoiseGenerator":
        self._cfg().validate()
        return self

    def _cfg(self) -> NoiseConfig:
        return self.config if self.config is not None else NoiseConfig()

    def _ime(self) -> PinyinIME:
        ime = getattr(self, "_ime_cache", None)
        if ime is None or ime.lexicon is not self.lexicon or ime.model is not self.model:
            ime = self._ime_cache = PinyinIME(self.lexicon, self.model, k=self.k)
        return ime

    # -- single sentence ---------------------------------------------------

    def generate_one(self, sentence: str, rng: random.Random) -> Optional[SentencePair]:
        pair, _ = self.generate_one_with_reason(sentence, rng)
        return pair

    def generate_one_with_reason(
        self, sentence: str, rng: random.Random
    ) -> tuple[Optional[SentencePair], str]:
        if not sentence:
            raise ValueError("sentence must be non-empty")
        cfg = self._cfg()
        word_pool = self._word_tokens(sentence)
        char_pool = self._char_tokens(sentence)
        if not char_pool and not word_pool:
            return None, REASON_NO_ELIGIBLE
        n_errors = _draw(cfg.num_items(), rng)
        # the error count and the pinyin relations are sampled once per
        # sentence; retries re-place them without reshaping their distribution
        tags = [_draw(cfg.pinyin_items(), rng) for _ in range(n_errors)]
        lm_rejected = False
        for _ in range(cfg.max_attempts):
            placed = self._place_errors(sentence, tags, word_pool, char_pool, rng)
            if placed is None:
                continue
            noised = list(sentence)
            for start, correct, wrong, _, _ in placed:
                noised[start : start + len(correct)] = wrong
            noised = "".join(noised)
            if cfg.enable_lm_filter:
                if not relative_ppl_increase(self.model, sentence, noised) > cfg.delta:
                    lm_rejected = True
                    continue
            return self._build_pair(sentence, noised, placed), REASON_EMITTED
        return None, REASON_LM_FILTERED if lm_rejected else REASON_NO_CANDIDATE

    def _word_tokens(self, sentence: str) -> list[tuple[int, str]]:
        tokens = []
        pos = 0
        for tok in self.lexicon.segment_text(sentence):
            if len(tok) > 1 and all_cjk(tok):
                tokens.append((pos, tok))
            pos += len(tok)
        return tokens

    def _char_tokens(self, sentence: str) -> list[tuple[int, str]]:
        return [
            (i, ch)
            for i, ch in enumerate(sentence)
            if is_cjk(ch) and self.lexicon.token_readings(ch)
        ]

    def _place_errors(self, sentence, tags, word_pool, char_pool, rng):
        cfg = self._cfg()
        ime = self._ime()
        claimed: list[tuple[int, int]] = []
        placed = []

        def free(start, end):
            return all(end <= s or start >= e for s, e in claimed)

        for tag in tags:
            for _ in range(_TOKEN_RETRIES):
                gran = _draw(cfg.token_items(), rng)
                pool = word_pool if gran is Granularity.WORD else char_pool
                open_pool = [t for t in pool if free(t[0], t[0] + len(t[1]))]
                if not open_pool:
                    continue
                start, token = rng.choice(open_pool)
                readings = self.lexicon.token_readings(token)
                if not readings:
                    continue
                reading = readings[rng.randrange(len(readings))]
                try:
                    typed = self.lexicon.table.mutate(reading, tag, rng)
                except UnachievableMutationError:
                    continue
                wrong = ime.type_token(
                    sentence[:start],
                    typed,
                    TypingPolicy(avoid=token, require_tag=tag),
                    rng,
                    fuzzy=tag is PinyinTag.FUZZY,
                )
                if wrong is None:
                    continue
                claimed.append((start, start + len(token)))
                placed.append((start, token, wrong, gran, tag))
                break
            else:
                return None
        return placed

    def _build_pair(self, target: str, source: str, placed) -> SentencePair:
        spans = []
        for start, correct, wrong, gran, _ in placed:
            i = 0
            while i < len(correct):
                if correct[i] != wrong[i]:
                    j = i
                    while j < len(correct) and correct[j] != wrong[j]:
                        j += 1
                    spans.append(
                        ErrorSpan(
                            offset=start + i,
                            wrong=wrong[i:j],
                            correct=correct[i:j],
                            pinyin_tag=self.lexicon.best_tag(correct[i:j], wrong[i:j]),
                            granularity=gran,
                        )
                    )
                    i = j
                else:
                    i += 1
        spans.sort(key=lambda s: s.offset)
        return SentencePair(source, target, tuple(spans)).validate()

    # -- batch -------------------------------------------------------------

    def transform(self, X: Iterable[str]) -> list[Optional[SentencePair]]:
        return [
            self.generate_one(s, random.Random(self.seed + i)) for i, s in enumerate(X)
        ]


_WORKER: IMENoiseGenerator | None = None


def _worker_run(task):
    idx, sentence = task
    pair, reason = _WORKER.generate_one_with_reason(sentence, random.Random(_WORKER.seed + idx))
    return idx, pair, reason


def generate_corpus(
    generator: IMENoiseGenerator,
    sentences: Iterable[str],
    parallelism: int = 1,
    report: GenerationReport | None = None,
) -> Iterator[SentencePair]:
    """Stream accepted pairs in input order; ``report`` (optional, updated in
    place) tallies every input sentence. Workers replay the same per-sentence
    RNG streams, so output is identical at any parallelism."""
    if report is None:
        report = GenerationReport()
    tasks = ((i, s) for i, s in enumerate(sentences))
    if parallelism <= 1:
        for idx, sentence in tasks:
            pair, reason = generator.generate_one_with_reason(
                sentence, random.Random(generator.seed + idx)
            )
            report.add(reason)
            if pair is not None:
                yield pair
        return
    global _WORKER
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:  # platform without fork: stay correct, just serial
        yield from generate_corpus(generator, (s for _, s in tasks), 1, report)
        return
    _WORKER = generator
    try:
        with ctx.Pool(parallelism) as pool:
            for _, pair, reason in pool.imap(_worker_run, tasks, chunksize=16):
                report.add(reason)
                if pair is not None:
                    yield pair
    finally:
        _WORKER = None
