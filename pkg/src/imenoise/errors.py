"""Exception types shared across the package."""


class ImeNoiseError(Exception):
    """Base class for all package errors."""


class PinyinInputError(ImeNoiseError, ValueError):
    """Raised for pinyin strings that are empty or not lowercase ASCII letters."""


class UnknownCharacterError(ImeNoiseError, KeyError):
    """Raised when a character has no entry in the reading table."""


class UnachievableMutationError(ImeNoiseError, ValueError):
    """Raised when no pinyin mutation can realize the requested relation."""


class DataFormatError(ImeNoiseError, ValueError):
    """Malformed data file (lexicon, model, rules). Carries path and line number."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}:"
        if line is not None:
            loc = f"{loc}{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


class ConfigError(ImeNoiseError, ValueError):
    """Invalid configuration; message lists every offending key."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
