"""Classify spelling errors at the pinyin and semantic levels and report
corpus-wide distributions.

Semantic tags are decided per differing character, most specific first:
entity word (the enclosing corrected word is entity-flagged), special char
(one of the high-frequency error-prone characters), normal word (the
wrong-side span of the enclosing word is itself a dictionary word of length
at least two), else normal char.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin

from .lexicon import Lexicon
from .pinyin import PinyinTag
from .validation import check_equal_lengths

DEFAULT_SPECIAL_CHARS = frozenset("他她它的地得")


class SemanticTag(Enum):
    ENTITY_WORD = "entity_word"
    NORMAL_WORD = "normal_word"
    SPECIAL_CHAR = "special_char"
    NORMAL_CHAR = "normal_char"


@dataclass(frozen=True)
class TaggedError:
    offset: int
    wrong: str
    correct: str
    pinyin_tag: PinyinTag
    semantic_tag: SemanticTag
    correct_word: str
    wrong_word: str
    word_offset: int


class ErrorTagger(BaseEstimator, TransformerMixin):
    def __init__(self, lexicon: Lexicon, special_chars: frozenset | None = None):
        self.lexicon = lexicon
        self.special_chars = special_chars

    def _special(self) -> frozenset:
        return (
            self.special_chars if self.special_chars is not None else DEFAULT_SPECIAL_CHARS
        )

    def fit(self, X=None, y=None) -> "ErrorTagger":
        return self

    def tag_pair(self, source: str, target: str) -> list[TaggedError]:
        """One TaggedError per differing character position."""
        check_equal_lengths(source, target, what="source/target")
        diffs = [i for i, (a, b) in enumerate(zip(source, target)) if a != b]
        if not diffs:
            return []
        word_at: dict[int, tuple[int, str]] = {}
        pos = 0
        for tok in self.lexicon.segment_text(target):
            for i in range(pos, pos + len(tok)):
                word_at[i] = (pos, tok)
            pos += len(tok)
        special = self._special()
        out = []
        for i in diffs:
            start, correct_word = word_at[i]
            wrong_word = source[start : start + len(correct_word)]
            entry = self.lexicon.by_surface.get(correct_word)
            if entry is not None and entry.is_entity:
                tag = SemanticTag.ENTITY_WORD
            elif target[i] in special:
                tag = SemanticTag.SPECIAL_CHAR
            elif len(wrong_word) >= 2 and wrong_word in self.lexicon:
                tag = SemanticTag.NORMAL_WORD
            else:
                tag = SemanticTag.NORMAL_CHAR
            out.append(
                TaggedError(
                    offset=i,
                    wrong=source[i],
                    correct=target[i],
                    pinyin_tag=self.lexicon.best_tag(target[i], source[i]),
                    semantic_tag=tag,
                    correct_word=correct_word,
                    wrong_word=wrong_word,
                    word_offset=start,
                )
            )
        return out

    def transform(self, X: Iterable[tuple[str, str]]) -> list[list[TaggedError]]:
        """X: (source, target) pairs -> per-pair TaggedError lists."""
        return [self.tag_pair(source, target) for source, target in X]

    def distribution(self, pairs: Iterable[tuple[str, str]]) -> "DistributionReport":
        report = DistributionReport()
        for source, target in pairs:
            report.add_pair(self.tag_pair(source, target))
        return report


def _percent(counts: Counter, total: int) -> dict[str, float | None]:
    return {k: (100.0 * v / total if total else None) for k, v in sorted(counts.items())}


@dataclass
class DistributionReport:
    """Error-distribution tallies. Characters are the primary counting unit;
    ``semantic_grouped`` additionally counts each noised word once, for the
    word-level view of the same data."""

    total_errors: int = 0
    total_pairs: int = 0
    pinyin_counts: Counter = field(default_factory=Counter)
    semantic_counts: Counter = field(default_factory=Counter)
    semantic_grouped: Counter = field(default_factory=Counter)

    def add_pair(self, errors: list[TaggedError]) -> None:
        self.total_pairs += 1
        groups = set()
        for e in errors:
            self.total_errors += 1
            self.pinyin_counts[e.pinyin_tag.value] += 1
            self.semantic_counts[e.semantic_tag.value] += 1
            groups.add((e.word_offset, e.semantic_tag.value))
        for _, tag in groups:
            self.semantic_grouped[tag] += 1

    def merge(self, other: "DistributionReport") -> None:
        self.total_errors += other.total_errors
        self.total_pairs += other.total_pairs
        self.pinyin_counts.update(other.pinyin_counts)
        self.semantic_counts.update(other.semantic_counts)
        self.semantic_grouped.update(other.semantic_grouped)

    def pinyin_percent(self) -> dict[str, float | None]:
        return _percent(self.pinyin_counts, self.total_errors)

    def semantic_percent(self) -> dict[str, float | None]:
        return _percent(self.semantic_counts, self.total_errors)

    def as_dict(self) -> dict:
        return {
            "total_pairs": self.total_pairs,
            "total_errors": self.total_errors,
            "pinyin": {
                "counts": dict(sorted(self.pinyin_counts.items())),
                "percent": self.pinyin_percent(),
            },
            "semantic": {
                "counts": dict(sorted(self.semantic_counts.items())),
                "percent": self.semantic_percent(),
                "word_grouped_counts": dict(sorted(self.semantic_grouped.items())),
            },
        }

    def format_table(self) -> str:
        lines = [
            f"pairs: {self.total_pairs}   errors: {self.total_errors}",
            "",
            "pinyin level",
        ]
        for tag in PinyinTag:
            n = self.pinyin_counts.get(tag.value, 0)
            pct = 100.0 * n / self.total_errors if self.total_errors else 0.0
            lines.append(f"  {tag.value:<20} {n:>8}  {pct:6.2f}%")
        lines.append("semantic level (chars / word-grouped)")
        for tag in SemanticTag:
            n = self.semantic_counts.get(tag.value, 0)
            g = self.semantic_grouped.get(tag.value, 0)
            pct = 100.0 * n / self.total_errors if self.total_errors else 0.0
            lines.append(f"  {tag.value:<20} {n:>8}  {pct:6.2f}%  ({g} grouped)")
        return "\n".join(lines)
