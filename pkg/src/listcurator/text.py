"""Tokenizer shared by the content profile builders and edge derivation."""

from __future__ import annotations

import re
import string

_URL = re.compile(r"(?:[a-z][a-z0-9+.\-]*://|www\.)", re.IGNORECASE)

# '@' and '#' are meaningful as leading sigils; everything else is boundary noise.
_LEAD_STRIP = "".join(c for c in string.punctuation if c not in "@#")
_PUNCT = string.punctuation


def tokenize(text: str) -> list[str]:
    """Split text into lowercased terms: plain words, '#' hashtags, '@' mentions.

    URLs are dropped, punctuation is stripped from token boundaries (leading
    sigils are kept), and tokens shorter than two characters are discarded.
    Repeated terms are preserved; collapsing happens at counting time.
    """
    tokens: list[str] = []
    for raw in text.split():
        candidate = raw.lstrip(_LEAD_STRIP)
        if _URL.match(candidate):
            continue
        sigil = candidate[0] if candidate[:1] in ("@", "#") else ""
        core = candidate[len(sigil):].strip(_PUNCT)
        if not core:
            continue
        token = (sigil + core).lower()
        if len(token) < 2:
            continue
        tokens.append(token)
    return tokens
