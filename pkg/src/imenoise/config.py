"""Typed key-value configuration shared by the CLI subcommands.

The file format is INI: sections mirror the pipeline stages, every value is
a single typed token (numbers, booleans, strings). Command-line flags
override file keys; anything not given falls back to the defaults below,
which use the data files shipped with the package.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError
from .filtering import Thresholds
from .generator import Granularity, NoiseConfig
from .lexicon import Lexicon, load_lexicon
from .lm import NGramLanguageModel
from .pinyin import PinyinTag
from .tagger import DEFAULT_SPECIAL_CHARS

# (section, key, description). The CLI --help for subcommands that accept
# --config is generated from this table, and a golden test keeps it complete.
CONFIG_KEYS = [
    ("paths", "lexicon", "lexicon TSV (default: shipped dictionary)"),
    ("paths", "lm", "language-model file (default: shipped model)"),
    ("paths", "entity_list", "optional extra entity surfaces, one per line"),
    ("noise", "same_pinyin", "probability of typing the exact pinyin"),
    ("noise", "fuzzy_pinyin", "probability of a fuzzy-rule pinyin slip"),
    ("noise", "similar_pinyin", "probability of a distance-1 pinyin slip"),
    ("noise", "dissimilar_pinyin", "probability of an unrelated pinyin"),
    ("noise", "word", "probability of noising a whole word"),
    ("noise", "char", "probability of noising a single character"),
    ("noise", "errors_per_sentence", "count:prob pairs, e.g. '1:0.91 2:0.09'"),
    ("noise", "delta", "relative perplexity-increase threshold"),
    ("noise", "lm_filter", "enable the perplexity filter (true/false)"),
    ("noise", "max_attempts", "placement retries per sentence"),
    ("ime", "k", "candidates the simulated IME exposes"),
    ("filter", "delta_special", "threshold for special characters"),
    ("filter", "delta_entity", "threshold for entity characters"),
    ("filter", "delta_normal", "threshold for all other characters"),
    ("filter", "surprisal_cap", "nats mapped to probability 1.0"),
    ("filter", "special_chars", "high-frequency error-prone characters"),
    ("run", "seed", "base RNG seed"),
    ("run", "parallelism", "worker processes for generate/filter"),
]


def config_help() -> str:
    lines = ["configuration keys (file section.key, overridable by flags):"]
    for section, key, desc in CONFIG_KEYS:
        lines.append(f"  {section}.{key:<24} {desc}")
    return "\n".join(lines)


def _data_path(name: str) -> str:
    return str(resources.files("imenoise.data") / name)


@dataclass
class Config:
    lexicon_path: str | None = None
    lm_path: str | None = None
    entity_list_path: str | None = None
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    k: int = 5
    thresholds: Thresholds = field(default_factory=Thresholds)
    surprisal_cap: float = 12.0
    special_chars: frozenset = DEFAULT_SPECIAL_CHARS
    seed: int = 0
    parallelism: int = 1

    def load_lexicon(self) -> Lexicon:
        path = self.lexicon_path or _data_path("lexicon.tsv")
        extra = None
        if self.entity_list_path:
            with open(self.entity_list_path, encoding="utf-8") as f:
                extra = [line.strip() for line in f if line.strip()]
        return load_lexicon(path, extra_entities=extra)

    def load_model(self) -> NGramLanguageModel:
        path = self.lm_path or _data_path("char_lm.arpa.gz")
        return NGramLanguageModel.load(path)


_TAG_KEYS = {
    "same_pinyin": PinyinTag.SAME,
    "fuzzy_pinyin": PinyinTag.FUZZY,
    "similar_pinyin": PinyinTag.SIMILAR,
    "dissimilar_pinyin": PinyinTag.DISSIMILAR,
}


def _parse_num_dist(text: str) -> dict[int, float]:
    dist = {}
    for part in text.split():
        n_s, _, p_s = part.partition(":")
        dist[int(n_s)] = float(p_s)
    if not dist:
        raise ValueError("empty distribution")
    return dist


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def load_config(path: str | None = None, overrides: dict[str, str] | None = None) -> Config:
    """Build a Config from an INI file plus ``{"section.key": value}``
    overrides. Every invalid key is reported, not just the first."""
    values: dict[str, str] = {}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except configparser.Error as exc:
            raise ConfigError([f"{path}: {exc}"]) from None
        known = {(s, k) for s, k, _ in CONFIG_KEYS}
        problems = [
            f"{s}.{k}: unknown configuration key"
            for s in parser.sections()
            for k in parser[s]
            if (s, k) not in known
        ]
        if problems:
            raise ConfigError(problems)
        for s in parser.sections():
            for k, v in parser[s].items():
                values[f"{s}.{k}"] = v
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    problems: list[str] = []
    cfg = Config()

    def take(key: str, parse, setter):
        if key in values:
            try:
                setter(parse(values[key]))
            except (ValueError, ConfigError) as exc:
                problems.append(f"{key}: {exc}")

    take("paths.lexicon", str, lambda v: setattr(cfg, "lexicon_path", v))
    take("paths.lm", str, lambda v: setattr(cfg, "lm_path", v))
    take("paths.entity_list", str, lambda v: setattr(cfg, "entity_list_path", v))

    pinyin_dist = dict(cfg.noise.pinyin_dist)
    for key, tag in _TAG_KEYS.items():
        take(f"noise.{key}", float, lambda v, tag=tag: pinyin_dist.__setitem__(tag, v))
    token_dist = dict(cfg.noise.token_dist)
    take("noise.word", float, lambda v: token_dist.__setitem__(Granularity.WORD, v))
    take("noise.char", float, lambda v: token_dist.__setitem__(Granularity.CHAR, v))
    num_dist = dict(cfg.noise.num_dist)
    take("noise.errors_per_sentence", _parse_num_dist, lambda v: (num_dist.clear(), num_dist.update(v)))
    noise_kwargs = {
        "pinyin_dist": pinyin_dist,
        "token_dist": token_dist,
        "num_dist": num_dist,
        "delta": cfg.noise.delta,
        "max_attempts": cfg.noise.max_attempts,
        "enable_lm_filter": cfg.noise.enable_lm_filter,
    }
    take("noise.delta", float, lambda v: noise_kwargs.__setitem__("delta", v))
    take("noise.lm_filter", _parse_bool, lambda v: noise_kwargs.__setitem__("enable_lm_filter", v))
    take("noise.max_attempts", int, lambda v: noise_kwargs.__setitem__("max_attempts", v))
    try:
        cfg.noise = NoiseConfig(**noise_kwargs)
    except (ValueError, ConfigError) as exc:
        problems.append(f"noise: {exc}")

    take("ime.k", int, lambda v: setattr(cfg, "k", v))
    if cfg.k < 1:
        problems.append(f"ime.k: must be >= 1, got {cfg.k}")

    th = {"special": cfg.thresholds.special, "entity": cfg.thresholds.entity,
          "normal": cfg.thresholds.normal}
    take("filter.delta_special", float, lambda v: th.__setitem__("special", v))
    take("filter.delta_entity", float, lambda v: th.__setitem__("entity", v))
    take("filter.delta_normal", float, lambda v: th.__setitem__("normal", v))
    try:
        cfg.thresholds = Thresholds(**th)
    except (ValueError, ConfigError) as exc:
        problems.append(f"filter thresholds: {exc}")
    take("filter.surprisal_cap", float, lambda v: setattr(cfg, "surprisal_cap", v))
    if cfg.surprisal_cap <= 0:
        problems.append(f"filter.surprisal_cap: must be positive, got {cfg.surprisal_cap}")
    take("filter.special_chars", str, lambda v: setattr(cfg, "special_chars", frozenset(v.strip())))

    take("run.seed", int, lambda v: setattr(cfg, "seed", v))
    take("run.parallelism", int, lambda v: setattr(cfg, "parallelism", v))
    if cfg.parallelism < 1:
        problems.append(f"run.parallelism: must be >= 1, got {cfg.parallelism}")

    for key in ("paths.lexicon", "paths.lm", "paths.entity_list"):
        p = values.get(key)
        if p and not os.path.exists(p):
            problems.append(f"{key}: file not found: {p}")

    if problems:
        raise ConfigError(problems)
    return cfg
