"""Word dictionary with pinyin readings, frequencies and entity flags.

File format: UTF-8, one entry per line, four TAB-separated fields::

    surface <TAB> space-separated toneless pinyin <TAB> frequency <TAB> entity(0/1)

Lines starting with ``#`` are comments. Several lines may share a surface
(polyphones); they merge into one entry carrying every reading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

from .errors import DataFormatError
from .pinyin import PinyinSeq, PinyinTag, PinyinTable, default_table


@dataclass
class LexiconEntry:
    surface: str
    readings: tuple[PinyinSeq, ...]
    frequency: int
    is_entity: bool = False

    def __post_init__(self):
        if not self.surface:
            raise ValueError("entry surface must be non-empty")
        if not self.readings:
            raise ValueError(f"entry {self.surface!r} has no readings")
        for r in self.readings:
            if len(r) != len(self.surface):
                raise ValueError(
                    f"entry {self.surface!r}: reading {r.spaced()!r} has "
                    f"{len(r)} syllables for {len(self.surface)} characters"
                )
        if self.frequency < 0:
            raise ValueError(f"entry {self.surface!r}: negative frequency")


class Lexicon:
    """Immutable after construction; all lookups are index-backed."""

    def __init__(self, entries: Iterable[LexiconEntry], table: PinyinTable | None = None):
        self.table = table or default_table()
        self.by_surface: dict[str, LexiconEntry] = {}
        self._by_flat: dict[str, list[LexiconEntry]] = {}
        self._by_norm: dict[str, list[LexiconEntry]] = {}
        for entry in entries:
            existing = self.by_surface.get(entry.surface)
            if existing is not None:
                entry = _merge(existing, entry)
                self._unindex(existing)
            self.by_surface[entry.surface] = entry
            self._index(entry)
        self.max_word_len = max((len(s) for s in self.by_surface), default=1)

    def _index(self, entry: LexiconEntry) -> None:
        seen_flat, seen_norm = set(), set()
        for r in entry.readings:
            flat = r.flat
            if flat not in seen_flat:
                seen_flat.add(flat)
                self._by_flat.setdefault(flat, []).append(entry)
            norm = self.table.rules.normalize(r)
            if norm not in seen_norm:
                seen_norm.add(norm)
                self._by_norm.setdefault(norm, []).append(entry)

    def _unindex(self, entry: LexiconEntry) -> None:
        for index, key_fn in (
            (self._by_flat, lambda r: r.flat),
            (self._by_norm, self.table.rules.normalize),
        ):
            for r in entry.readings:
                bucket = index.get(key_fn(r))
                if bucket and entry in bucket:
                    bucket.remove(entry)

    def __len__(self):
        return len(self.by_surface)

    def __contains__(self, surface: str) -> bool:
        return surface in self.by_surface

    @property
    def entries(self):
        return self.by_surface.values()

    def lookup_by_pinyin(self, p: PinyinSeq, fuzzy: bool = False) -> list[LexiconEntry]:
        """Entries whose flattened reading matches ``p``.

        Fuzzy mode compares after mapping confusable initials/finals to a
        canonical member, so it is a superset of the exact match. Order is
        unspecified; the IME layer sorts.
        """
        if fuzzy:
            return list(self._by_norm.get(self.table.rules.normalize(p), ()))
        return list(self._by_flat.get(p.flat, ()))

    def segment_text(self, sentence: str) -> list[str]:
        """Forward maximum matching; unmatched characters come out alone."""
        if not sentence:
            raise ValueError("sentence must be non-empty")
        tokens = []
        i, n = 0, len(sentence)
        while i < n:
            end = min(n, i + self.max_word_len)
            for j in range(end, i + 1, -1):
                if sentence[i:j] in self.by_surface:
                    tokens.append(sentence[i:j])
                    i = j
                    break
            else:
                tokens.append(sentence[i])
                i += 1
        return tokens

    def token_readings(self, surface: str, cap: int = 64) -> tuple[PinyinSeq, ...]:
        """Readings for any token: lexicon readings when the surface is an
        entry, otherwise the per-character cartesian product (capped)."""
        entry = self.by_surface.get(surface)
        if entry is not None:
            return entry.readings
        per_char = []
        for ch in surface:
            if not self.table.known_char(ch):
                return ()
            per_char.append(self.table.readings(ch))
        combos = itertools.islice(itertools.product(*per_char), cap)
        return tuple(
            PinyinSeq(tuple(s for seq in combo for s in seq.syllables)) for combo in combos
        )

    def best_tag(self, correct: str, wrong: str) -> PinyinTag:
        """Most similar pinyin relation over all reading pairs of two tokens.

        A typist plausibly used the closest reading, so polyphones classify
        by their best pair. Tokens with no known reading are dissimilar.
        """
        best = PinyinTag.DISSIMILAR
        wrong_readings = self.token_readings(wrong)
        for rc in self.token_readings(correct):
            for rw in wrong_readings:
                t = self.table.tag(rc, rw)
                if t.rank > best.rank:
                    best = t
                    if best is PinyinTag.SAME:
                        return best
        return best


def _merge(a: LexiconEntry, b: LexiconEntry) -> LexiconEntry:
    readings = list(a.readings)
    readings.extend(r for r in b.readings if r.flat not in {x.flat for x in a.readings})
    return LexiconEntry(
        surface=a.surface,
        readings=tuple(readings),
        frequency=max(a.frequency, b.frequency),
        is_entity=a.is_entity or b.is_entity,
    )


def parse_lexicon_line(line: str, table: PinyinTable) -> LexiconEntry | None:
    line = line.rstrip("\n")
    if not line or line.startswith("#"):
        return None
    parts = line.split("\t")
    if len(parts) != 4:
        raise ValueError(f"expected 4 TAB-separated fields, got {len(parts)}")
    surface, spaced, freq_s, entity_s = parts
    try:
        freq = int(freq_s)
    except ValueError:
        raise ValueError(f"frequency {freq_s!r} is not an integer") from None
    if entity_s not in ("0", "1"):
        raise ValueError(f"entity flag must be 0 or 1, got {entity_s!r}")
    reading = table.seq(spaced)
    return LexiconEntry(surface, (reading,), freq, entity_s == "1")


def load_lexicon(path, table: PinyinTable | None = None, extra_entities=None) -> Lexicon:
    """Load a lexicon file; parse problems carry path and line number.

    ``extra_entities``: optional iterable of surfaces to force-flag as
    entities (an entity list supplied separately from the dictionary).
    """
    table = table or default_table()
    entries = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            try:
                entry = parse_lexicon_line(line, table)
            except Exception as exc:
                raise DataFormatError(str(exc), path, lineno) from None
            if entry is not None:
                entries.append(entry)
    lex = Lexicon(entries, table)
    if extra_entities:
        for surface in extra_entities:
            entry = lex.by_surface.get(surface)
            if entry is not None:
                entry.is_entity = True
    return lex


def save_lexicon(lex: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for surface in sorted(lex.by_surface):
            entry = lex.by_surface[surface]
            for r in entry.readings:
                f.write(
                    f"{surface}\t{r.spaced()}\t{entry.frequency}\t{int(entry.is_entity)}\n"
                )


def default_lexicon() -> Lexicon:
    """The dictionary shipped with the package (cached)."""
    global _DEFAULT
    if _DEFAULT is None:
        data = resources.files("imenoise.data")
        _DEFAULT = load_lexicon(str(data / "lexicon.tsv"))
    return _DEFAULT


_DEFAULT: Lexicon | None = None
