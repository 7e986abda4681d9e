"""Small input-validation helpers used by the public entry points."""

from __future__ import annotations

from .errors import ConfigError

# Sentinel characters reserved for language-model internals. They are Unicode
# noncharacters, so stripping them never alters real text.
RESERVED_CHARS = "﷐﷑﷒"
_RESERVED_TABLE = {ord(c): None for c in RESERVED_CHARS}

_CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF))


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def all_cjk(text: str) -> bool:
    return bool(text) and all(is_cjk(c) for c in text)


def strip_reserved(text: str) -> str:
    return text.translate(_RESERVED_TABLE)


def check_nonempty(text: str, what: str = "text") -> str:
    if not text:
        raise ValueError(f"{what} must be non-empty")
    return text


def check_equal_lengths(*texts: str, what: str = "sentences") -> None:
    lengths = {len(t) for t in texts}
    if len(lengths) > 1:
        raise ValueError(f"{what} must have equal lengths, got {sorted(lengths)}")


def check_distribution(dist, what: str, tol: float = 1e-9) -> None:
    """A probability table must have non-negative entries summing to 1."""
    if not dist:
        raise ConfigError([f"{what}: distribution is empty"])
    problems = []
    for key, p in dist.items():
        if p < 0:
            problems.append(f"{what}[{key}]: negative probability {p}")
    total = sum(dist.values())
    if abs(total - 1.0) > tol:
        problems.append(f"{what}: probabilities sum to {total!r}, expected 1")
    if problems:
        raise ConfigError(problems)


def check_unit_interval(value: float, what: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError([f"{what}: {value!r} outside [0, 1]"])
