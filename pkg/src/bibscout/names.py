"""Journal-name normalization and word-overlap matching.

Search portals register each journal under a display title whose casing and
punctuation rarely match what a ranking file carries ("Energy & Environmental
Science" vs "energy and environmental science").  Everything downstream
compares titles through :func:`normalize_title`, so the rules here are the
single source of truth for what counts as "the same name".
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "NormalizedName",
    "UnnormalizableTitleError",
    "normalize_title",
    "render_title_case",
    "word_overlap_match",
]

OVERLAP_THRESHOLD = 0.75


class UnnormalizableTitleError(ValueError):
    """Raised when a title yields zero tokens after normalization."""


@dataclass(frozen=True)
class NormalizedName:
    """Ordered lowercase tokens plus the raw string they came from."""

    words: tuple[str, ...]
    original: str

    def __post_init__(self) -> None:
        if not self.words:
            raise UnnormalizableTitleError(
                f"unnormalizable title: {self.original!r}"
            )


def normalize_title(raw: str) -> NormalizedName:
    """Split a raw journal title into canonical lowercase tokens.

    '&' becomes the token "and", hyphens and slashes act as separators,
    every other non-alphanumeric character is dropped in place, and the
    result is case-folded.  Raises :class:`UnnormalizableTitleError` when
    nothing survives (e.g. a title that is all punctuation).
    """
    text = raw.replace("&", " and ")
    text = text.replace("-", " ").replace("/", " ")
    text = text.casefold()
    kept = []
    for ch in text:
        if ch.isalnum():
            kept.append(ch)
        elif ch.isspace():
            kept.append(" ")
        # any other character is stripped without leaving a separator
    words = tuple("".join(kept).split())
    return NormalizedName(words=words, original=raw)


def render_title_case(name: NormalizedName) -> str:
    """Render tokens with the first letter of each capitalized.

    This is a deliberately naive emulation of how a scripted browser types a
    title back into a search form: acronyms come out wrong ("Jama", not
    "JAMA"), which is exactly the failure mode the simulated portal's
    case-sensitive registry reproduces.
    """
    return " ".join(w[:1].upper() + w[1:] for w in name.words)


def word_overlap_match(a: NormalizedName, b: NormalizedName) -> bool:
    """True when the shared words exceed 75% of both names' word sets.

    Both ratios are strict: an overlap of exactly 0.75 on either side does
    not match.  Comparison is on token sets, so word order and repetition
    are ignored.
    """
    set_a = set(a.words)
    set_b = set(b.words)
    shared = len(set_a & set_b)
    return (
        shared > OVERLAP_THRESHOLD * len(set_a)
        and shared > OVERLAP_THRESHOLD * len(set_b)
    )
