"""Pinyin data model: syllables, segmentation, similarity tags and mutation.

The similarity taxonomy over (correct, wrong) pinyin pairs has four classes,
checked in this order:

  same       -- flattened letter strings are equal
  fuzzy      -- equal after normalizing confusable initial/final pairs
  similar    -- weighted edit distance is exactly 1
  dissimilar -- everything else

The weighted distance is a Levenshtein distance over the flattened letter
strings where swapping a syllable's whole initial for a different,
non-confusable initial costs 2 and every other single-letter edit costs 1.
That weighting is what separates e.g. zai/tai (dissimilar) from zai/za
(similar) even though both are one plain edit apart.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

from .errors import (
    DataFormatError,
    PinyinInputError,
    UnachievableMutationError,
    UnknownCharacterError,
)

INITIALS = (
    "zh", "ch", "sh",
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
    "j", "q", "x", "r", "z", "c", "s", "y", "w",
)

DEFAULT_FUZZY_PAIRS = frozenset(
    frozenset(p)
    for p in [
        ("z", "zh"), ("c", "ch"), ("s", "sh"), ("n", "l"), ("f", "h"),
        ("l", "r"), ("an", "ang"), ("en", "eng"), ("in", "ing"),
        ("ian", "iang"), ("uan", "uang"),
    ]
)


class PinyinTag(Enum):
    """Similarity class of a (correct, wrong) pinyin pair."""

    SAME = "same_pinyin"
    FUZZY = "fuzzy_pinyin"
    SIMILAR = "similar_pinyin"
    DISSIMILAR = "dissimilar_pinyin"

    @property
    def rank(self) -> int:
        """Higher rank means more similar."""
        return {
            PinyinTag.SAME: 3,
            PinyinTag.FUZZY: 2,
            PinyinTag.SIMILAR: 1,
            PinyinTag.DISSIMILAR: 0,
        }[self]


def split_initial(text: str) -> tuple[str, str]:
    """Split a syllable string into (initial, final); the final is never empty."""
    for ini in INITIALS:
        if text.startswith(ini) and len(text) > len(ini):
            return ini, text[len(ini):]
    return "", text


@dataclass(frozen=True)
class Syllable:
    text: str
    initial: str
    final: str

    @classmethod
    def parse(cls, text: str) -> "Syllable":
        ini, fin = split_initial(text)
        return cls(text, ini, fin)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class PinyinSeq:
    """A non-empty sequence of syllables for one Chinese token."""

    syllables: tuple[Syllable, ...]

    def __post_init__(self):
        if not self.syllables:
            raise ValueError("PinyinSeq must contain at least one syllable")

    @classmethod
    def of(cls, *texts: str) -> "PinyinSeq":
        return cls(tuple(Syllable.parse(t) for t in texts))

    @property
    def flat(self) -> str:
        return "".join(s.text for s in self.syllables)

    def spaced(self) -> str:
        return " ".join(s.text for s in self.syllables)

    def initial_marks(self) -> tuple[str | None, ...]:
        """Per letter of ``flat``: the full initial at positions that start one."""
        marks: list[str | None] = []
        for s in self.syllables:
            if s.initial:
                marks.append(s.initial)
                marks.extend([None] * (len(s.text) - 1))
            else:
                marks.extend([None] * len(s.text))
        return tuple(marks)

    def __len__(self):
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __str__(self):
        return self.spaced()


class FuzzyRuleSet:
    """Symmetric set of confusable initial/final pairs.

    Pairs sharing a member chain into one group (n,l + l,r puts n/l/r
    together); normalization maps every member to the group's canonical
    (alphabetically first) element, which is also what the fuzzy lexicon
    index and the fuzzy tag check use.
    """

    def __init__(self, pairs: Iterable[tuple[str, str]] | frozenset = DEFAULT_FUZZY_PAIRS):
        self.pairs = frozenset(frozenset(p) for p in pairs)
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for pair in self.pairs:
            a, b = sorted(pair)
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        self._canon = {x: find(x) for x in parent}

    @classmethod
    def load(cls, path) -> "FuzzyRuleSet":
        pairs = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 2 or not all(p.strip() for p in parts):
                    raise DataFormatError("expected two comma-separated parts", path, lineno)
                pairs.append((parts[0].strip(), parts[1].strip()))
        return cls(pairs)

    def canon(self, part: str) -> str:
        return self._canon.get(part, part)

    def equivalent(self, a: str, b: str) -> bool:
        return a == b or self.canon(a) == self.canon(b)

    def normalize_syllable(self, s: Syllable) -> str:
        return self.canon(s.initial) + self.canon(s.final)

    def normalize(self, seq: PinyinSeq) -> str:
        return "".join(self.normalize_syllable(s) for s in seq)


def _weighted_distance(a: PinyinSeq, b: PinyinSeq, rules: FuzzyRuleSet) -> int:
    sa, sb = a.flat, b.flat
    ma, mb = a.initial_marks(), b.initial_marks()
    n, m = len(sa), len(sb)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        ca, ia = sa[i - 1], ma[i - 1]
        for j in range(1, m + 1):
            if ca == sb[j - 1]:
                sub = prev[j - 1]
            else:
                ib = mb[j - 1]
                # swapping one whole initial for a different, non-fuzzy one
                cost = 2 if (ia and ib and ia != ib and not rules.equivalent(ia, ib)) else 1
                sub = prev[j - 1] + cost
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m]


class PinyinTable:
    """Syllable inventory + fuzzy rules + character readings.

    All operations are pure functions of the loaded data; instances are
    immutable after construction and safe to share across threads.
    """

    def __init__(
        self,
        syllables: Iterable[str],
        rules: FuzzyRuleSet | None = None,
        char_readings: Mapping[str, Iterable[str]] | None = None,
    ):
        self.rules = rules or FuzzyRuleSet()
        self.syllables: dict[str, Syllable] = {}
        for text in syllables:
            s = Syllable.parse(text)
            if not s.final:
                raise DataFormatError(f"syllable {text!r} has an empty final")
            self.syllables[text] = s
        if not self.syllables:
            raise DataFormatError("syllable inventory is empty")
        self._by_first: dict[str, list[Syllable]] = {}
        for s in self.syllables.values():
            self._by_first.setdefault(s.text[0], []).append(s)
        for group in self._by_first.values():
            group.sort(key=lambda s: (-len(s.text), s.text))
        self._max_len = max(len(t) for t in self.syllables)
        self._readings: dict[str, tuple[PinyinSeq, ...]] = {}
        if char_readings:
            for ch, reads in char_readings.items():
                self.add_char(ch, reads)
        self._fuzzy_variants: dict[str, tuple[str, ...]] | None = None
        self._similar_variants: dict[str, tuple[str, ...]] | None = None
        self._dissimilar_variants: dict[str, tuple[str, ...]] | None = None

    @classmethod
    def load(cls, syllable_path, fuzzy_path=None, char_reading_path=None) -> "PinyinTable":
        syllables = []
        with open(syllable_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith("#"):
                    syllables.append(line)
        rules = FuzzyRuleSet.load(fuzzy_path) if fuzzy_path else FuzzyRuleSet()
        table = cls(syllables, rules)
        if char_reading_path:
            with open(char_reading_path, encoding="utf-8") as f:
                for lineno, line in enumerate(f, 1):
                    line = line.rstrip("\n")
                    if not line or line.startswith("#"):
                        continue
                    parts = line.split("\t")
                    if len(parts) != 2:
                        raise DataFormatError(
                            "expected 'char<TAB>readings'", char_reading_path, lineno
                        )
                    table.add_char(parts[0], parts[1].split(","))
        return table

    def add_char(self, ch: str, readings: Iterable[str]) -> None:
        seqs = []
        for r in readings:
            r = r.strip()
            if r not in self.syllables:
                raise DataFormatError(f"reading {r!r} for {ch!r} not in syllable inventory")
            seqs.append(PinyinSeq((self.syllables[r],)))
        if not seqs:
            raise DataFormatError(f"character {ch!r} has no readings")
        self._readings[ch] = tuple(seqs)

    def known_char(self, ch: str) -> bool:
        return ch in self._readings

    @property
    def chars(self):
        return self._readings.keys()

    # -- parsing ---------------------------------------------------------

    def syllable(self, text: str) -> Syllable:
        try:
            return self.syllables[text]
        except KeyError:
            raise PinyinInputError(f"{text!r} is not a valid syllable") from None

    def seq(self, spaced: str) -> PinyinSeq:
        """Parse a space-separated syllable string, validating each syllable."""
        return PinyinSeq(tuple(self.syllable(t) for t in spaced.split()))

    def segment(self, raw: str) -> list[PinyinSeq]:
        """All ways to read ``raw`` as a syllable sequence.

        Segmentations are ordered longest-first-syllable first at every
        split, so the greedy parse comes first. Empty list when no full
        segmentation exists.
        """
        if not raw or not all("a" <= c <= "z" for c in raw):
            raise PinyinInputError(f"expected non-empty lowercase ASCII letters, got {raw!r}")
        results: list[PinyinSeq] = []
        prefix: list[Syllable] = []

        def walk(pos: int) -> None:
            if pos == len(raw):
                results.append(PinyinSeq(tuple(prefix)))
                return
            for s in self._by_first.get(raw[pos], ()):
                if raw.startswith(s.text, pos):
                    prefix.append(s)
                    walk(pos + len(s.text))
                    prefix.pop()

        walk(0)
        return results

    def readings(self, ch: str) -> tuple[PinyinSeq, ...]:
        """All single-syllable readings of one character."""
        try:
            return self._readings[ch]
        except KeyError:
            raise UnknownCharacterError(ch) from None

    # -- similarity ------------------------------------------------------

    def distance(self, a: PinyinSeq, b: PinyinSeq) -> int:
        if len(a) == 1 and len(b) == 1:
            return self._syllable_distance(a.flat, b.flat)
        return _weighted_distance(a, b, self.rules)

    @lru_cache(maxsize=None)
    def _syllable_distance(self, a: str, b: str) -> int:
        return _weighted_distance(
            PinyinSeq((self.syllables[a],)) if a in self.syllables else PinyinSeq.of(a),
            PinyinSeq((self.syllables[b],)) if b in self.syllables else PinyinSeq.of(b),
            self.rules,
        )

    def tag(self, correct: PinyinSeq, wrong: PinyinSeq) -> PinyinTag:
        if correct.flat == wrong.flat:
            return PinyinTag.SAME
        if self.rules.normalize(correct) == self.rules.normalize(wrong):
            return PinyinTag.FUZZY
        if self.distance(correct, wrong) == 1:
            return PinyinTag.SIMILAR
        return PinyinTag.DISSIMILAR

    # -- mutation --------------------------------------------------------

    def _build_variant_tables(self) -> None:
        by_norm: dict[str, list[str]] = {}
        for text, s in self.syllables.items():
            by_norm.setdefault(self.rules.normalize_syllable(s), []).append(text)
        fuzzy: dict[str, tuple[str, ...]] = {}
        similar: dict[str, tuple[str, ...]] = {}
        dissim: dict[str, tuple[str, ...]] = {}
        all_texts = sorted(self.syllables)
        for text, s in self.syllables.items():
            group = by_norm[self.rules.normalize_syllable(s)]
            fz = tuple(sorted(t for t in group if t != text))
            near = []
            for other in all_texts:
                if other == text or abs(len(other) - len(text)) > 1:
                    continue
                if self._syllable_distance(text, other) == 1:
                    near.append(other)
            fzset = set(fz)
            sim = tuple(t for t in near if t not in fzset)
            simset = set(sim)
            dissim[text] = tuple(
                t for t in all_texts if t != text and t not in fzset and t not in simset
            )
            fuzzy[text] = fz
            similar[text] = sim
        self._fuzzy_variants = fuzzy
        self._similar_variants = similar
        self._dissimilar_variants = dissim

    def _variants(self, tag: PinyinTag) -> dict[str, tuple[str, ...]]:
        if self._fuzzy_variants is None:
            self._build_variant_tables()
        return {
            PinyinTag.FUZZY: self._fuzzy_variants,
            PinyinTag.SIMILAR: self._similar_variants,
            PinyinTag.DISSIMILAR: self._dissimilar_variants,
        }[tag]

    def mutate(self, correct: PinyinSeq, target: PinyinTag, rng: random.Random) -> PinyinSeq:
        """Return a valid sequence whose tag against ``correct`` is ``target``.

        Mutation replaces one syllable with an inventory variant from the
        matching similarity class; the result is re-checked with ``tag`` so
        the postcondition holds even for multi-syllable sequences. Raises
        UnachievableMutationError when no variant exists.
        """
        if target is PinyinTag.SAME:
            return correct
        table = self._variants(target)
        indices = [i for i, s in enumerate(correct) if table.get(s.text)]
        rng.shuffle(indices)
        for i in indices:
            options = list(table[correct.syllables[i].text])
            rng.shuffle(options)
            for opt in options:
                mutated = PinyinSeq(
                    correct.syllables[:i]
                    + (self.syllables[opt],)
                    + correct.syllables[i + 1:]
                )
                if self.tag(correct, mutated) is target:
                    return mutated
        raise UnachievableMutationError(
            f"no {target.name} mutation exists for {correct.spaced()!r}"
        )


_DEFAULT: PinyinTable | None = None


def default_table() -> PinyinTable:
    """The table backed by the data files shipped with the package."""
    global _DEFAULT
    if _DEFAULT is None:
        data = resources.files("imenoise.data")
        _DEFAULT = PinyinTable.load(
            str(data / "syllables.txt"),
            str(data / "fuzzy_rules.txt"),
            str(data / "char_readings.tsv"),
        )
    return _DEFAULT


def segment_pinyin(raw: str, table: PinyinTable | None = None) -> list[PinyinSeq]:
    return (table or default_table()).segment(raw)


def char_to_pinyins(ch: str, table: PinyinTable | None = None) -> tuple[PinyinSeq, ...]:
    return (table or default_table()).readings(ch)


def pinyin_distance(a: PinyinSeq, b: PinyinSeq, table: PinyinTable | None = None) -> int:
    return (table or default_table()).distance(a, b)


def pinyin_tag(correct: PinyinSeq, wrong: PinyinSeq, table: PinyinTable | None = None) -> PinyinTag:
    return (table or default_table()).tag(correct, wrong)


def mutate_pinyin(
    correct: PinyinSeq,
    target: PinyinTag,
    rng: random.Random,
    table: PinyinTable | None = None,
) -> PinyinSeq:
    return (table or default_table()).mutate(correct, target, rng)
