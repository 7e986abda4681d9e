"""Pseudo training data for Chinese spelling correction via simulated
pinyin-IME typing with sampled noise."""

from .errors import (
    ConfigError,
    DataFormatError,
    ImeNoiseError,
    PinyinInputError,
    UnachievableMutationError,
    UnknownCharacterError,
)
from .pinyin import (
    FuzzyRuleSet,
    PinyinSeq,
    PinyinTable,
    PinyinTag,
    Syllable,
    char_to_pinyins,
    default_table,
    mutate_pinyin,
    pinyin_distance,
    pinyin_tag,
    segment_pinyin,
)
from .lexicon import Lexicon, LexiconEntry, default_lexicon, load_lexicon, save_lexicon
from .lm import NGramLanguageModel, relative_ppl_increase
from .ime import Candidate, CandidateList, PinyinIME, TypingPolicy
from .generator import (
    ErrorSpan,
    GenerationReport,
    Granularity,
    IMENoiseGenerator,
    NoiseConfig,
    SentencePair,
    generate_corpus,
)
from .tagger import (
    DEFAULT_SPECIAL_CHARS,
    DistributionReport,
    ErrorTagger,
    SemanticTag,
    TaggedError,
)
from .filtering import (
    CharCategory,
    FilterReport,
    SentenceCorrectnessFilter,
    Thresholds,
    categorize,
    filter_corpus,
    is_correct,
    lm_probability_provider,
)
from .metrics import (
    PRF,
    EvalExample,
    char_correction,
    char_detection,
    evaluate_all,
    sentence_correction,
    sentence_detection,
)

__version__ = "0.1.0"
