"""Character-level backoff n-gram language model.

Smoothing is interpolated absolute discounting with a single discount and a
uniform floor over the vocabulary, so every probability is strictly positive
and every conditional distribution sums to exactly 1:

    p_k(w | h) = max(c(h,w) - D, 0) / c(h)  +  lam(h) * p_{k-1}(w | h[1:])
    lam(h)     = D * distinct(h) / c(h)
    p_0(w)     = 1 / |V|

The model stores log10 probabilities in backoff form: stored n-grams carry
their full interpolated probability; unseen continuations multiply the
history's backoff weight lam(h) into the next-lower order. Scores are kept
in log10 end to end so that saving and re-loading reproduces bit-identical
values.
"""

from __future__ import annotations

import gzip
import math
from collections import Counter
from typing import Iterable

from sklearn.base import BaseEstimator

from .errors import DataFormatError
from .validation import strip_reserved

BOS = "\ufdd0"
EOS = "\ufdd1"
UNK = "\ufdd2"

_MARKERS = {BOS: "<s>", EOS: "</s>", UNK: "<unk>"}
_MARKERS_BACK = {v: k for k, v in _MARKERS.items()}
_ESCAPES = {" ": "\\s", "\t": "\\t", "\n": "\\n", "\r": "\\r", "\\": "\\\\"}
_ESCAPES_BACK = {v: k for k, v in _ESCAPES.items()}

_MAGIC = "ngram-lm-v1"


def _render_token(ch: str) -> str:
    if ch in _MARKERS:
        return _MARKERS[ch]
    return _ESCAPES.get(ch, ch)


def _parse_token(tok: str) -> str:
    if tok in _MARKERS_BACK:
        return _MARKERS_BACK[tok]
    if tok in _ESCAPES_BACK:
        return _ESCAPES_BACK[tok]
    if len(tok) != 1:
        raise ValueError(f"bad token field {tok!r}")
    return tok


class NGramLanguageModel(BaseEstimator):
    """Estimator-style wrapper: construct with hyperparameters, ``fit`` on an
    iterable of sentences, then score with ``logprob10``/``perplexity``."""

    def __init__(self, order: int = 3, discount: float = 0.75):
        self.order = order
        self.discount = discount

    # -- training ----------------------------------------------------------

    def fit(self, sentences: Iterable[str], y=None) -> "NGramLanguageModel":
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if not 0.0 < self.discount < 1.0:
            raise ValueError(f"discount must be in (0, 1), got {self.discount}")
        n = self.order
        counts: list[dict[str, Counter]] = [dict() for _ in range(n + 1)]
        vocab = {BOS, EOS, UNK}
        n_sent = 0
        for sentence in sentences:
            chars = strip_reserved(sentence)
            if not chars:
                continue
            n_sent += 1
            vocab.update(chars)
            seq = BOS * (n - 1) + chars + EOS
            for i in range(n - 1, len(seq)):
                token = seq[i]
                for k in range(1, n + 1):
                    hist = seq[i - k + 1 : i]
                    counter = counts[k].get(hist)
                    if counter is None:
                        counter = counts[k][hist] = Counter()
                    counter[token] += 1
        if n_sent == 0:
            raise ValueError("training corpus is empty")

        d = self.discount
        vsize = len(vocab)
        self.vocab_ = vocab
        probs: list[dict[str, float]] = [dict() for _ in range(n + 1)]
        backoffs: list[dict[str, float]] = [dict() for _ in range(n)]

        uni = counts[1][""]
        total = sum(uni.values())
        n_distinct = len(uni)
        floor = d * n_distinct / vsize
        for w in vocab:
            probs[1][w] = math.log10((max(uni.get(w, 0) - d, 0.0) + floor) / total)

        for k in range(2, n + 1):
            for hist, counter in counts[k].items():
                tot = sum(counter.values())
                lam = d * len(counter) / tot
                backoffs[k - 1][hist] = math.log10(lam)
                lower_hist = hist[1:]
                for w, c in counter.items():
                    p = (c - d) / tot + lam * self._linear_prob(probs, backoffs, w, lower_hist)
                    probs[k][hist + w] = math.log10(p)
        # every history carrying a backoff weight must also exist as a stored
        # gram, so the weight has a line to ride on in the serialized form
        for k in range(1, n):
            for hist in backoffs[k]:
                if hist not in probs[k]:
                    probs[k][hist] = math.log10(
                        self._linear_prob(probs, backoffs, hist[-1], hist[:-1])
                    )
        self.probs_ = probs
        self.backoffs_ = backoffs
        return self

    @staticmethod
    def _linear_prob(probs, backoffs, token: str, hist: str) -> float:
        weight = 1.0
        while hist:
            lp = probs[len(hist) + 1].get(hist + token)
            if lp is not None:
                return weight * 10 ** lp
            weight *= 10 ** backoffs[len(hist)].get(hist, 0.0)
            hist = hist[1:]
        return weight * 10 ** probs[1][token]

    # -- scoring -----------------------------------------------------------

    def _require_fitted(self):
        if not hasattr(self, "probs_"):
            raise RuntimeError("model is not fitted; call fit() or load()")

    def logprob10(self, token: str, history: str) -> float:
        """log10 p(token | history); history longer than order-1 is truncated."""
        self._require_fitted()
        vocab = self.vocab_
        if token not in vocab:
            token = UNK
        hlen = self.order - 1
        hist = history[-hlen:] if hlen else ""
        if hist:
            hist = "".join(c if c in vocab else UNK for c in hist)
        acc = 0.0
        while hist:
            lp = self.probs_[len(hist) + 1].get(hist + token)
            if lp is not None:
                return acc + lp
            acc += self.backoffs_[len(hist)].get(hist, 0.0)
            hist = hist[1:]
        return acc + self.probs_[1][token]

    def sentence_logprob10(self, sentence: str) -> tuple[float, int]:
        """Total log10 probability and event count (EOS included)."""
        chars = strip_reserved(sentence)
        if not chars:
            raise ValueError("sentence must be non-empty")
        hlen = self.order - 1
        hist = BOS * hlen
        total = 0.0
        for ch in chars:
            total += self.logprob10(ch, hist)
            if hlen:
                hist = (hist + ch)[-hlen:]
        total += self.logprob10(EOS, hist)
        return total, len(chars) + 1

    def perplexity(self, sentence: str) -> float:
        self._require_fitted()
        total, n = self.sentence_logprob10(sentence)
        return 10.0 ** (-total / n)

    # -- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        self._require_fitted()
        opener = gzip.open if str(path).endswith(".gz") else open
        with opener(path, "wt", encoding="utf-8") as f:
            f.write(f"{_MAGIC}\n")
            f.write(f"order\t{self.order}\n")
            f.write(f"discount\t{self.discount!r}\n")
            f.write(f"vocab\t{len(self.vocab_)}\n")
            for k in range(1, self.order + 1):
                f.write(f"\\{k}-grams:\n")
                level = self.probs_[k]
                bo = self.backoffs_[k] if k < self.order else {}
                for gram in sorted(level):
                    tokens = " ".join(_render_token(c) for c in gram)
                    line = f"{level[gram]!r}\t{tokens}"
                    if gram in bo:
                        line += f"\t{bo[gram]!r}"
                    f.write(line + "\n")
            f.write("\\end\\\n")

    @classmethod
    def load(cls, path) -> "NGramLanguageModel":
        opener = gzip.open if str(path).endswith(".gz") else open
        with opener(path, "rt", encoding="utf-8") as f:
            lines = f.read().split("\n")

        def fail(msg, lineno):
            raise DataFormatError(msg, path, lineno)

        if not lines or lines[0] != _MAGIC:
            got = lines[0][:40] if lines else ""
            raise DataFormatError(
                f"unsupported model version: expected header {_MAGIC!r}, got {got!r}", path, 1
            )
        header = {}
        idx = 1
        while idx < len(lines) and not lines[idx].startswith("\\"):
            parts = lines[idx].split("\t")
            if len(parts) != 2:
                fail(f"bad header line {lines[idx]!r}", idx + 1)
            header[parts[0]] = parts[1]
            idx += 1
        try:
            order = int(header["order"])
            discount = float(header.get("discount", "0.75"))
            vocab_size = int(header["vocab"])
        except (KeyError, ValueError) as exc:
            fail(f"bad or missing header field: {exc}", idx)

        model = cls(order=order, discount=discount)
        probs: list[dict[str, float]] = [dict() for _ in range(order + 1)]
        backoffs: list[dict[str, float]] = [dict() for _ in range(order)]
        level = 0
        ended = False
        for lineno in range(idx, len(lines)):
            line = lines[lineno]
            if line == "":
                continue
            if line == "\\end\\":
                ended = True
                break
            if line.startswith("\\") and line.endswith("-grams:"):
                try:
                    level = int(line[1:-7])
                except ValueError:
                    fail(f"bad section header {line!r}", lineno + 1)
                if not 1 <= level <= order:
                    fail(f"section order {level} outside 1..{order}", lineno + 1)
                continue
            if level == 0:
                fail("n-gram line before any section header", lineno + 1)
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                fail(f"expected 2 or 3 fields, got {len(parts)}", lineno + 1)
            try:
                lp = float(parts[0])
                gram = "".join(_parse_token(t) for t in parts[1].split(" "))
            except ValueError as exc:
                fail(str(exc), lineno + 1)
            if len(gram) != level:
                fail(f"{len(gram)}-gram in \\{level}-grams section", lineno + 1)
            probs[level][gram] = lp
            if len(parts) == 3:
                if level >= order:
                    fail("backoff weight on a highest-order gram", lineno + 1)
                try:
                    backoffs[level][gram] = float(parts[2])
                except ValueError:
                    fail(f"bad backoff field {parts[2]!r}", lineno + 1)
        if not ended:
            raise DataFormatError("truncated model file: missing \\end\\", path, len(lines))
        if len(probs[1]) != vocab_size:
            raise DataFormatError(
                f"header says {vocab_size} unigrams, file has {len(probs[1])}", path, 1
            )
        model.vocab_ = set(probs[1])
        model.probs_ = probs
        model.backoffs_ = backoffs
        return model


def relative_ppl_increase(model: NGramLanguageModel, origin: str, noised: str) -> float:
    """(PPL(noised) - PPL(origin)) / PPL(origin)."""
    base = model.perplexity(origin)
    return (model.perplexity(noised) - base) / base
