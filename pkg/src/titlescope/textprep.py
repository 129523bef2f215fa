"""Deterministic text normalization for news titles.

The pipeline runs in a fixed order: strip non-ASCII code points, strip
punctuation (with possessive-'s removal first), lowercase, whitespace
tokenize, suffix-rule lemmatize, stop-word filter, minimum-length filter.
All classical feature extractors and the topic/lexicon matchers consume
tokens produced here, so the output alphabet is guaranteed to be [a-z0-9].
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = [
    "PrepConfig",
    "TokenizedTitle",
    "Normalizer",
    "default_normalizer",
    "normalize",
]

_POSSESSIVE_RE = re.compile(r"'[sS](?![A-Za-z0-9])")
# Everything that is neither alphanumeric nor whitespace (incl. control
# chars) becomes a separator; hyphens and apostrophes split tokens.
_PUNCT_RE = re.compile(r"[^a-zA-Z0-9\s]")

# Doubled final consonants left intact by the undoubling step (pass, tell,
# buzz, staff, add).
_UNDOUBLE_EXEMPT = frozenset("slzfd")
_VOWELS = frozenset("aeiou")


def _data_path(name: str) -> Path:
    return Path(str(resources.files("titlescope").joinpath("data", name)))


@dataclass(frozen=True)
class PrepConfig:
    """Normalization settings; loadable from a TOML table."""

    stopword_path: Path = field(default_factory=lambda: _data_path("stopwords.txt"))
    lemma_rule_path: Path = field(default_factory=lambda: _data_path("lemma_rules.txt"))
    min_token_len: int = 2

    @classmethod
    def from_toml(cls, path: str | Path) -> "PrepConfig":
        import tomli

        with open(path, "rb") as fh:
            raw = tomli.load(fh)
        section = raw.get("prep", raw)
        kwargs = {}
        if "stopword_path" in section:
            kwargs["stopword_path"] = Path(section["stopword_path"])
        if "lemma_rule_path" in section:
            kwargs["lemma_rule_path"] = Path(section["lemma_rule_path"])
        if "min_token_len" in section:
            kwargs["min_token_len"] = int(section["min_token_len"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TokenizedTitle:
    title_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class _SuffixRule:
    suffix: str
    replacement: str
    min_stem: int
    undouble: bool = False
    restore: bool = False
    guards: tuple[str, ...] = ()


def _load_stopwords(path: Path) -> frozenset[str]:
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def _load_lemma_rules(path: Path):
    keep: set[str] = set()
    exceptions: dict[str, str] = {}
    restore_e: set[str] = set()
    suffixes: list[_SuffixRule] = []
    section = None
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if section == "keep":
            keep.add(line)
        elif section == "exceptions":
            form, lemma = line.split("=", 1)
            exceptions[form.strip()] = lemma.strip()
        elif section == "restore_e":
            restore_e.add(line)
        elif section == "suffixes":
            parts = line.split()
            suffix, _, replacement = parts[0].partition(">")
            min_stem = int(parts[1])
            flags = parts[2:]
            suffixes.append(
                _SuffixRule(
                    suffix=suffix,
                    replacement=replacement,
                    min_stem=min_stem,
                    undouble="undouble" in flags,
                    restore="restore" in flags,
                    guards=tuple(f[1:] for f in flags if f.startswith("!")),
                )
            )
    return frozenset(keep), exceptions, frozenset(restore_e), tuple(suffixes)


class Normalizer:
    """Loads the rule tables once and normalizes titles to token lists."""

    def __init__(self, config: PrepConfig | None = None):
        self.config = config or PrepConfig()
        self.stopwords = _load_stopwords(Path(self.config.stopword_path))
        self._keep, self._exceptions, self._restore_e, self._rules = _load_lemma_rules(
            Path(self.config.lemma_rule_path)
        )

    def _lemma_step(self, token: str) -> str:
        if token in self._keep:
            return token
        if token in self._exceptions:
            return self._exceptions[token]
        for rule in self._rules:
            if not token.endswith(rule.suffix):
                continue
            if any(token.endswith(g) for g in rule.guards):
                continue
            stem = token[: len(token) - len(rule.suffix)]
            if len(stem) < rule.min_stem:
                continue
            stem += rule.replacement
            if (
                rule.undouble
                and len(stem) >= 2
                and stem[-1] == stem[-2]
                and stem[-1] not in _VOWELS
                and stem[-1] not in _UNDOUBLE_EXEMPT
            ):
                stem = stem[:-1]
            elif rule.restore and stem in self._restore_e:
                stem += "e"
            return stem
        return token

    def lemmatize(self, token: str) -> str:
        # Iterate to a fixpoint so lemmatization (and hence the whole
        # pipeline) is idempotent: e.g. meetings -> meeting -> meet.
        seen = {token}
        while True:
            out = self._lemma_step(token)
            if out == token or out in seen:
                return out
            seen.add(out)
            token = out

    def normalize(self, text: str) -> list[str]:
        text = "".join(ch for ch in text if ord(ch) < 128)
        text = _POSSESSIVE_RE.sub("", text)
        text = _PUNCT_RE.sub(" ", text)
        text = text.lower()
        tokens = []
        for raw in text.split():
            tok = self.lemmatize(raw)
            if tok in self.stopwords:
                continue
            if len(tok) < self.config.min_token_len:
                continue
            tokens.append(tok)
        return tokens

    def tokenize_title(self, title_id: str, text: str) -> TokenizedTitle:
        return TokenizedTitle(title_id=title_id, tokens=tuple(self.normalize(text)))


_default: Normalizer | None = None


def default_normalizer() -> Normalizer:
    global _default
    if _default is None:
        _default = Normalizer()
    return _default


def normalize(text: str, config: PrepConfig | None = None) -> list[str]:
    """Normalize one raw title with the shared default pipeline."""
    if config is None:
        return default_normalizer().normalize(text)
    return Normalizer(config).normalize(text)
