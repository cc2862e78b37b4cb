"""Tiny rule-based text transforms: declarativization and negation.

These back the mock oracle's template fallback and the negation handling of
belief overrides. They are deliberately shallow, keyed off a closed list of
auxiliaries, and make no attempt at real linguistics; remote backends are
expected to do this with a model instead.
"""

from __future__ import annotations

import re

from entail.core import Statement

# Auxiliaries/copulas that lead a yes-no question and carry negation.
_AUXILIARIES = (
    "is", "are", "was", "were", "am",
    "can", "could", "will", "would", "shall", "should", "may", "might", "must",
    "do", "does", "did", "has", "have", "had",
)
_AUX_SET = frozenset(_AUXILIARIES)

_DETERMINERS = frozenset(("a", "an", "the", "this", "that", "these", "those", "its", "their"))

_BLANK_RE = re.compile(r"_{2,}")
_NEG_PREFIX = "it is not true that "


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:] if text else text


def _question_stem(question: str) -> str:
    return question.strip().rstrip("?.! ").strip()


def _split_subject(tokens: list[str]) -> tuple[list[str], list[str]]:
    """Split the tokens after a fronted auxiliary into (subject, remainder)."""
    if not tokens:
        return [], []
    if tokens[0].lower() in _DETERMINERS and len(tokens) >= 2:
        return tokens[:2], tokens[2:]
    return tokens[:1], tokens[1:]


def declarativize(question: str, option: str | None = None) -> Statement:
    """Turn a question (plus optionally one answer option) into a statement.

    Rules, in order: a run of underscores is a blank that the option fills;
    a fronted auxiliary is moved behind the (naively guessed) subject; any
    other stem simply has the option appended. ``option=None`` asks for the
    affirmative reading of a yes-no question.
    """
    stem = _question_stem(question)
    if option is not None and _BLANK_RE.search(stem):
        return Statement(_capitalize(_BLANK_RE.sub(option, stem)))
    tokens = stem.split()
    if tokens and tokens[0].lower() in _AUX_SET:
        aux = tokens[0].lower()
        subject, remainder = _split_subject(tokens[1:])
        parts = subject + [aux] + remainder
        if option is not None:
            parts.append(option)
        return Statement(_capitalize(" ".join(parts)))
    if option is None:
        return Statement(_capitalize(stem))
    return Statement(_capitalize(f"{stem} {option}"))


def negate_text(statement: Statement) -> Statement:
    """Toggle the negation of a statement textually (an involution).

    ``cannot`` pairs with ``can``, ``<aux> not`` pairs with ``<aux>``; a
    sentence with no recognizable auxiliary gets the explicit prefix
    ``It is not true that ...`` (and loses it again when negated twice).
    """
    text = statement.text
    lowered = text.lower()
    if lowered.startswith(_NEG_PREFIX):
        return Statement(_capitalize(text[len(_NEG_PREFIX):]))
    tokens = text.split()
    for i, token in enumerate(tokens):
        word = token.lower().rstrip(".")
        if word == "cannot":
            tokens[i] = _match_case(token, "can")
            return Statement(" ".join(tokens))
        if word in _AUX_SET:
            following = tokens[i + 1].lower().rstrip(".") if i + 1 < len(tokens) else ""
            if following == "not":
                del tokens[i + 1]
            elif word == "can":
                tokens[i] = _match_case(token, "cannot")
            else:
                tokens.insert(i + 1, "not")
            return Statement(" ".join(tokens))
    body = text[:1].lower() + text[1:]
    return Statement(_capitalize(_NEG_PREFIX + body))


def _match_case(original: str, replacement: str) -> str:
    if original[:1].isupper():
        return replacement.capitalize()
    return replacement


def affirmative_form(normalized_key: str) -> tuple[str, int]:
    """Reduce a normalized key to its affirmative base plus negation parity.

    Two statements talk about the same claim with opposite polarity iff their
    bases are equal and their parities differ. Handles ``not`` tokens,
    ``cannot``, and the explicit ``it is not true that`` prefix.
    """
    tokens = normalized_key.split()
    parity = 0
    if tokens[:5] == ["it", "is", "not", "true", "that"]:
        tokens = tokens[5:]
        parity += 1
    base: list[str] = []
    for token in tokens:
        if token == "not":
            parity += 1
        elif token == "cannot":
            parity += 1
            base.append("can")
        else:
            base.append(token)
    return " ".join(base), parity % 2


def is_negation_pair(a: Statement, b: Statement) -> bool:
    base_a, parity_a = affirmative_form(a.normalized_key)
    base_b, parity_b = affirmative_form(b.normalized_key)
    return base_a == base_b and parity_a != parity_b
