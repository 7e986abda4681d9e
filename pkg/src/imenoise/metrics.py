"""Spelling-correction evaluation: precision/recall/F1 for detection and
correction, at sentence level and character level.

Conventions, pinned so scores are comparable across runs of this tool:

* Character correction counts every character position, not only correctly
  detected ones: a true positive is a changed position whose new character
  equals the reference.
* Sentence level: a sentence is a predicted positive when the prediction
  changes it anywhere; a detection true positive additionally requires the
  exact set of changed positions to match the reference's, and a correction
  true positive requires the full prediction string to equal the reference.
* 0/0 precision and recall are defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .validation import check_equal_lengths


@dataclass(frozen=True)
class EvalExample:
    source: str
    gold: str
    prediction: str

    def __post_init__(self):
        check_equal_lengths(
            self.source, self.gold, self.prediction, what="source/gold/prediction"
        )


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRF":
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return cls(tp, fp, fn, p, r, f1)

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def _as_example(item) -> EvalExample:
    if isinstance(item, EvalExample):
        return item
    source, gold, prediction = item
    return EvalExample(source, gold, prediction)


@dataclass
class _Tally:
    char_det_tp: int = 0
    char_det_fp: int = 0
    char_det_fn: int = 0
    char_cor_tp: int = 0
    sent_pred_pos: int = 0
    sent_gold_pos: int = 0
    sent_det_tp: int = 0
    sent_cor_tp: int = 0

    def add(self, ex: EvalExample) -> None:
        pred_set = {i for i, (a, b) in enumerate(zip(ex.source, ex.prediction)) if a != b}
        gold_set = {i for i, (a, b) in enumerate(zip(ex.source, ex.gold)) if a != b}
        self.char_det_tp += len(pred_set & gold_set)
        self.char_det_fp += len(pred_set - gold_set)
        self.char_det_fn += len(gold_set - pred_set)
        self.char_cor_tp += sum(1 for i in pred_set if ex.prediction[i] == ex.gold[i])
        if pred_set:
            self.sent_pred_pos += 1
        if gold_set:
            self.sent_gold_pos += 1
        if pred_set and pred_set == gold_set:
            self.sent_det_tp += 1
        if gold_set and ex.prediction == ex.gold:
            self.sent_cor_tp += 1

    def results(self) -> dict[str, PRF]:
        pred_chars = self.char_det_tp + self.char_det_fp
        gold_chars = self.char_det_tp + self.char_det_fn
        return {
            "sentence_detection": PRF.from_counts(
                self.sent_det_tp,
                self.sent_pred_pos - self.sent_det_tp,
                self.sent_gold_pos - self.sent_det_tp,
            ),
            "sentence_correction": PRF.from_counts(
                self.sent_cor_tp,
                self.sent_pred_pos - self.sent_cor_tp,
                self.sent_gold_pos - self.sent_cor_tp,
            ),
            "char_detection": PRF.from_counts(
                self.char_det_tp, self.char_det_fp, self.char_det_fn
            ),
            "char_correction": PRF.from_counts(
                self.char_cor_tp,
                pred_chars - self.char_cor_tp,
                gold_chars - self.char_cor_tp,
            ),
        }


def evaluate_all(examples: Iterable) -> dict[str, PRF]:
    """Single pass over examples; returns all four metric blocks."""
    tally = _Tally()
    for idx, item in enumerate(examples):
        try:
            tally.add(_as_example(item))
        except ValueError as exc:
            raise ValueError(f"example {idx + 1}: {exc}") from None
    return tally.results()


def char_detection(examples: Iterable) -> PRF:
    return evaluate_all(examples)["char_detection"]


def char_correction(examples: Iterable) -> PRF:
    return evaluate_all(examples)["char_correction"]


def sentence_detection(examples: Iterable) -> PRF:
    return evaluate_all(examples)["sentence_detection"]


def sentence_correction(examples: Iterable) -> PRF:
    return evaluate_all(examples)["sentence_correction"]
