"""Plain-text lexicons and word lists.

File format: UTF-8, one entry per line, ``token<TAB>weight`` with the weight
optional (default 1.0). Blank lines and lines starting with ``#`` are ignored.
The bundled files under ``newsprior/data`` are small illustrative starters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import DataError

STYLE_SLOTS = ("positive", "negative", "subjective", "offensive", "propaganda")
EXTRA_SLOTS = ("morality", "toxicity")


class LexiconError(DataError):
    pass


@dataclass(frozen=True)
class Lexicon:
    name: str
    entries: frozenset[str]
    weight_map: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.entries:
            raise LexiconError(f"lexicon {self.name!r} is empty")
        for e in self.entries:
            if e != e.lower() or not e or any(ch.isspace() for ch in e):
                raise LexiconError(f"lexicon {self.name!r}: bad entry {e!r}")

    def weight(self, token: str) -> float:
        return self.weight_map.get(token, 1.0)

    def __contains__(self, token: str) -> bool:
        return token in self.entries


def parse_lexicon(text: str, name: str) -> Lexicon:
    entries: set[str] = set()
    weights: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token, _, weight = line.partition("\t")
        token = token.strip()
        entries.add(token)
        if weight.strip():
            try:
                weights[token] = float(weight)
            except ValueError:
                raise LexiconError(f"{name}:{lineno}: bad weight {weight!r}") from None
    return Lexicon(name, frozenset(entries), weights)


def parse_word_list(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.partition("\t")[0].strip())
    return out


def _bundled_text(relpath: str) -> str:
    return resources.files("newsprior").joinpath("data", relpath).read_text("utf-8")


def load_lexicon(path: str | Path | None, name: str) -> Lexicon:
    """Load ``path``, or the bundled lexicon called ``name`` when path is None."""
    if path is None:
        return parse_lexicon(_bundled_text(f"lexicons/{name}.txt"), name)
    return parse_lexicon(Path(path).read_text("utf-8"), name)


def load_word_list(path: str | Path | None, bundled: str) -> list[str]:
    if path is None:
        return parse_word_list(_bundled_text(bundled))
    return parse_word_list(Path(path).read_text("utf-8"))


@dataclass(frozen=True)
class LexiconBundle:
    positive: Lexicon
    negative: Lexicon
    subjective: Lexicon
    offensive: Lexicon
    propaganda: Lexicon
    stopwords: Lexicon
    negation: Lexicon
    extras: Mapping[str, Lexicon] = field(default_factory=dict)

    @classmethod
    def load(cls, paths: Mapping[str, str | Path | None] | None = None) -> "LexiconBundle":
        """Load every slot, falling back to the bundled file for unset paths."""
        paths = paths or {}
        core = {slot: load_lexicon(paths.get(slot), slot)
                for slot in STYLE_SLOTS + ("stopwords", "negation")}
        extras = {slot: load_lexicon(paths.get(slot), slot) for slot in EXTRA_SLOTS}
        for slot, path in paths.items():
            if slot not in core and slot not in extras and path is not None:
                extras[slot] = load_lexicon(path, slot)
        return cls(extras=dict(sorted(extras.items())), **core)


@dataclass(frozen=True)
class SourceResources:
    """Word lists used by the outlet-metadata channels."""

    dictionary: frozenset[str]
    suspicious_suffixes: tuple[str, ...]
    public_suffixes: tuple[str, ...]
    wikipedia_cues: tuple[str, ...]

    @classmethod
    def load(cls, dictionary=None, suspicious_suffixes=None, public_suffixes=None,
             wikipedia_cues=None) -> "SourceResources":
        return cls(
            dictionary=frozenset(w.lower() for w in load_word_list(dictionary, "dictionary.txt")),
            suspicious_suffixes=tuple(load_word_list(suspicious_suffixes,
                                                     "suspicious_suffixes.txt")),
            public_suffixes=tuple(load_word_list(public_suffixes, "public_suffixes.txt")),
            wikipedia_cues=tuple(load_word_list(wikipedia_cues, "wikipedia_cues.txt")),
        )
