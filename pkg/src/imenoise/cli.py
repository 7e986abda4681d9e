"""Command-line interface.

Exit codes: 0 success, 1 validation failure (bad flags, bad config, bad file
content), 2 I/O failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from collections import Counter

from .config import Config, config_help, load_config
from .errors import ConfigError, DataFormatError, ImeNoiseError
from .filtering import (
    FilterReport,
    SentenceCorrectnessFilter,
    filter_corpus,
    lm_probability_provider,
)
from .generator import GenerationReport, IMENoiseGenerator, SentencePair, generate_corpus
from .lexicon import load_lexicon, save_lexicon
from .lm import NGramLanguageModel
from .metrics import evaluate_all
from .tagger import ErrorTagger


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _read_sentences(path):
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line:
                yield line


def _write_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, ensure_ascii=False, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    print(text, file=sys.stderr)


def _config_from_args(args) -> Config:
    overrides = {
        "paths.lexicon": args.lexicon,
        "paths.lm": args.lm,
        "run.seed": args.seed,
        "run.parallelism": getattr(args, "parallelism", None),
        "noise.delta": getattr(args, "delta", None),
        "noise.max_attempts": getattr(args, "max_attempts", None),
        "noise.lm_filter": getattr(args, "lm_filter", None),
    }
    return load_config(args.config, overrides)


def _add_config_flags(sub, run_flags=True):
    sub.add_argument("--config", help="INI configuration file")
    sub.add_argument("--lexicon", help="override paths.lexicon")
    sub.add_argument("--lm", help="override paths.lm")
    sub.add_argument("--seed", help="override run.seed")
    if run_flags:
        sub.add_argument("--parallelism", help="override run.parallelism")


def _cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    lexicon = cfg.load_lexicon()
    model = cfg.load_model()
    generator = IMENoiseGenerator(lexicon, model, cfg.noise, seed=cfg.seed, k=cfg.k)
    report = GenerationReport()
    with open(args.output, "w", encoding="utf-8") as out:
        for pair in generate_corpus(
            generator, _read_sentences(args.input), cfg.parallelism, report
        ):
            out.write((pair.to_tsv() if args.tsv else pair.to_json()) + "\n")
    _write_report(report.as_dict(), args.report)
    return 0


def _cmd_tag(args) -> int:
    cfg = _config_from_args(args)
    tagger = ErrorTagger(cfg.load_lexicon(), cfg.special_chars)
    report = tagger.distribution(_read_pairs(args.pairs))
    print(report.format_table())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            json.dump(report.as_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")
    return 0


def _read_pairs(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("{"):
                pair = SentencePair.from_json(line)
                yield pair.source, pair.target
            else:
                parts = line.split("\t")
                if len(parts) != 2:
                    raise DataFormatError(
                        "expected JSON object or 'source<TAB>target'", path, lineno
                    )
                yield parts[0], parts[1]


def _cmd_filter(args) -> int:
    cfg = _config_from_args(args)
    lexicon = cfg.load_lexicon()
    if args.probs:
        provider = None
        probs = _read_prob_lines(args.probs)
    else:
        provider = lm_probability_provider(cfg.load_model(), cfg.surprisal_cap)
        probs = None
    filt = SentenceCorrectnessFilter(lexicon, provider, cfg.thresholds, cfg.special_chars)
    report = FilterReport()
    with open(args.kept, "w", encoding="utf-8") as kept_f, open(
        args.suspect, "w", encoding="utf-8"
    ) as suspect_f:
        for sentence, ok in filter_corpus(
            _read_sentences(args.input), filt, probs=probs, report=report
        ):
            (kept_f if ok else suspect_f).write(sentence + "\n")
    _write_report(report.as_dict(), args.report)
    return 0


def _read_prob_lines(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                vec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
            if not isinstance(vec, list) or not all(
                isinstance(x, (int, float)) and 0.0 <= x <= 1.0 for x in vec
            ):
                raise DataFormatError("expected a JSON array of numbers in [0,1]", path, lineno)
            yield vec


def _cmd_evaluate(args) -> int:
    def lines(path):
        with open(path, encoding="utf-8") as f:
            for line in f:
                yield line.rstrip("\n")

    triples = zip(lines(args.src), lines(args.gold), lines(args.pred), strict=True)
    try:
        results = evaluate_all(triples)
    except ValueError as exc:
        raise _UsageError(f"evaluate: {exc}") from None
    report = {name: prf.as_dict() for name, prf in results.items()}
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    print(text)
    return 0


def _cmd_train_lm(args) -> int:
    model = NGramLanguageModel(order=args.order, discount=args.discount)
    model.fit(_read_sentences(args.corpus))
    model.save(args.output)
    print(
        f"trained order-{args.order} model on {args.corpus}: "
        f"{len(model.vocab_)} vocabulary entries -> {args.output}",
        file=sys.stderr,
    )
    return 0


def _cmd_build_dict(args) -> int:
    lexicon = load_lexicon(args.base_lexicon)
    counts = Counter()
    for sentence in _read_sentences(args.corpus):
        counts.update(lexicon.segment_text(sentence))
    for surface, entry in lexicon.by_surface.items():
        entry.frequency += counts.get(surface, 0)
    save_lexicon(lexicon, args.output)
    print(f"recounted {len(lexicon)} entries -> {args.output}", file=sys.stderr)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="imenoise",
        description="Build pseudo spelling-correction data by simulating a pinyin IME.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser(
        "generate",
        help="noise a corpus of correct sentences into (source, target) pairs",
        epilog=config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    gen.add_argument("--input", required=True, help="correct sentences, one per line")
    gen.add_argument("--output", required=True, help="output pairs (JSONL, or TSV with --tsv)")
    gen.add_argument("--tsv", action="store_true", help="write 'source<TAB>target' lines")
    gen.add_argument("--report", help="write the run report JSON here")
    gen.add_argument("--delta", help="override noise.delta")
    gen.add_argument("--max-attempts", dest="max_attempts", help="override noise.max_attempts")
    gen.add_argument(
        "--lm-filter",
        dest="lm_filter",
        choices=("true", "false"),
        help="override noise.lm_filter",
    )
    _add_config_flags(gen)
    gen.set_defaults(func=_cmd_generate)

    tag = sub.add_parser(
        "tag",
        help="tag (source, target) pairs and report error distributions",
        epilog=config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    tag.add_argument("--pairs", required=True, help="JSONL or TSV pair file")
    tag.add_argument("--output", help="write the distribution report JSON here")
    _add_config_flags(tag, run_flags=False)
    tag.set_defaults(func=_cmd_tag)

    filt = sub.add_parser(
        "filter",
        help="split a corpus into likely-correct and suspect sentences",
        epilog=config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    filt.add_argument("--input", required=True, help="sentences, one per line")
    filt.add_argument("--kept", required=True, help="output file for correct sentences")
    filt.add_argument("--suspect", required=True, help="output file for suspect sentences")
    filt.add_argument("--probs", help="external per-character probabilities (JSON array per line)")
    filt.add_argument("--report", help="write the routing report JSON here")
    _add_config_flags(filt, run_flags=False)
    filt.set_defaults(func=_cmd_filter)

    ev = sub.add_parser("evaluate", help="score predictions against references")
    ev.add_argument("--src", required=True, help="original sentences")
    ev.add_argument("--gold", required=True, help="reference corrections")
    ev.add_argument("--pred", required=True, help="system output")
    ev.add_argument("--output", help="write the metric report JSON here")
    ev.set_defaults(func=_cmd_evaluate)

    tr = sub.add_parser("train-lm", help="train the character n-gram language model")
    tr.add_argument("--corpus", required=True, help="training sentences, one per line")
    tr.add_argument("--output", required=True, help="model file (.gz supported)")
    tr.add_argument("--order", type=int, default=3)
    tr.add_argument("--discount", type=float, default=0.75)
    tr.set_defaults(func=_cmd_train_lm)

    bd = sub.add_parser("build-dict", help="recount lexicon frequencies from a corpus")
    bd.add_argument("--corpus", required=True, help="text corpus, one sentence per line")
    bd.add_argument("--base-lexicon", dest="base_lexicon", required=True)
    bd.add_argument("--output", required=True)
    bd.set_defaults(func=_cmd_build_dict)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (_UsageError, ConfigError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ImeNoiseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
