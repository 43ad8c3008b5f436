"""Text normalization for stored attribute values and query literals.

Most text attributes in the graph (titles, author names, journal/venue/field
names, title words) are stored in a canonical normalized form: lowercase
basic-Latin letters, digits, and single spaces. Display names and
descriptions are kept raw.

The rule sequence is fixed and idempotent:

1. Unicode compatibility decomposition (NFKD),
2. strip combining marks,
3. lowercase,
4. map every remaining non-alphanumeric code point to a space,
5. collapse runs of spaces, trim.

Letters that do not decompose to basic Latin (e.g. CJK) are kept rather
than dropped, so that titles in non-Latin scripts do not normalize to the
empty string; they are reported via :func:`normalize_inspect` so loaders
can count them.
"""

from __future__ import annotations

import unicodedata

_ASCII_LOWER = frozenset("abcdefghijklmnopqrstuvwxyz")
_ASCII_DIGIT = frozenset("0123456789")


def normalize_text(text: str) -> str:
    """Return the canonical normalized form of ``text``.

    Pure and idempotent: ``normalize_text(normalize_text(x)) == normalize_text(x)``.
    Empty input yields the empty string.
    """
    return normalize_inspect(text)[0]


def normalize_inspect(text: str) -> tuple[str, bool]:
    """Normalize ``text`` and report whether non-Latin letters were kept.

    Returns ``(normalized, kept_non_latin)``. ``kept_non_latin`` is True when
    the output contains letters outside ``[a-z]`` that survived decomposition;
    such values are exempt from the basic-Latin output alphabet.
    """
    decomposed = unicodedata.normalize("NFKD", text)
    out: list[str] = []
    kept_non_latin = False
    for ch in decomposed:
        if unicodedata.combining(ch):
            continue
        ch = ch.lower()
        # Lowercasing may itself produce decomposable/multi-char sequences
        # (e.g. U+0130); re-decompose those before classifying.
        if len(ch) > 1 or unicodedata.normalize("NFKD", ch) != ch:
            for sub in unicodedata.normalize("NFKD", ch):
                if unicodedata.combining(sub):
                    continue
                kept_non_latin |= _classify(sub, out)
            continue
        kept_non_latin |= _classify(ch, out)
    collapsed = " ".join("".join(out).split())
    return collapsed, kept_non_latin


def _classify(ch: str, out: list[str]) -> bool:
    """Append the normalized form of one code point; return True if it is a
    kept non-Latin letter."""
    if ch in _ASCII_LOWER or ch in _ASCII_DIGIT:
        out.append(ch)
        return False
    if ch.isalpha():
        out.append(ch)
        return True
    out.append(" ")
    return False


def is_normalized(text: str) -> bool:
    """True iff ``text`` is a fixed point of :func:`normalize_text`."""
    return normalize_text(text) == text


def tokens(normalized: str) -> frozenset[str]:
    """Split a normalized string into its word set."""
    return frozenset(normalized.split())
