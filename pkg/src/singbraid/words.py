"""
Braid words over classical and singular generators.

A word is a finite sequence of letters on n strands.  Letters are positive or
negative crossings (``s<i>`` / ``S<i>`` in text form) or singular points
colored black or white (``t<i>`` / ``u<i>``).  Words are purely syntactic:
no relation is applied at this layer.  Singular points are identified by
their 1-based letter position inside a concrete word representative.

Four calculi share this alphabet: B (crossings only), SB (crossings plus
black singular points), M (both colors) and SG (same letters as M; the
group relations live in the rewrite module).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .permutations import Permutation, compose, identity, transposition

CROSSING = "crossing"
SINGULAR = "singular"
BLACK = "black"
WHITE = "white"


class BraidError(ValueError):
    """Base class for rejected inputs."""


class StrandMismatchError(BraidError):
    pass


class LetterPositionError(BraidError):
    pass


class AlphabetError(BraidError):
    pass


class ParseError(BraidError):
    def __init__(self, message: str, token_index: int):
        super().__init__(f"{message} at token {token_index}")
        self.token_index = token_index


class Calculus(str, Enum):
    B = "B"
    SB = "SB"
    M = "M"
    SG = "SG"


@dataclass(frozen=True, order=True)
class Generator:
    """One letter: a signed crossing or a colored singular point at strand index i."""

    kind: str
    index: int
    sign: int = 0
    color: str = ""

    def __post_init__(self):
        if self.kind == CROSSING:
            if self.sign not in (1, -1) or self.color:
                raise BraidError(f"crossing must carry a sign and no color: {self!r}")
        elif self.kind == SINGULAR:
            if self.color not in (BLACK, WHITE) or self.sign:
                raise BraidError(f"singular letter must carry a color and no sign: {self!r}")
        else:
            raise BraidError(f"unknown letter kind {self.kind!r}")
        if self.index < 1:
            raise BraidError(f"strand index must be >= 1: {self!r}")

    @property
    def is_crossing(self) -> bool:
        return self.kind == CROSSING

    @property
    def is_singular(self) -> bool:
        return self.kind == SINGULAR

    @property
    def token(self) -> str:
        if self.kind == CROSSING:
            return f"{'s' if self.sign > 0 else 'S'}{self.index}"
        return f"{'t' if self.color == BLACK else 'u'}{self.index}"

    def __str__(self) -> str:
        return self.token


def sigma(index: int, sign: int = 1) -> Generator:
    return Generator(CROSSING, index, sign=sign)


def tau(index: int) -> Generator:
    return Generator(SINGULAR, index, color=BLACK)


def upsilon(index: int) -> Generator:
    return Generator(SINGULAR, index, color=WHITE)


@dataclass(frozen=True, order=True)
class BraidWord:
    """Immutable word on ``strands`` strands; the empty word is the identity."""

    strands: int
    letters: tuple[Generator, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise BraidError(f"strand count must be >= 1, got {self.strands}")
        for g in self.letters:
            if g.index > self.strands - 1:
                raise BraidError(f"letter {g.token} needs at least {g.index + 1} strands, word has {self.strands}")

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, p: int) -> Generator:
        """Letter at 1-based position p."""
        if not 1 <= p <= len(self.letters):
            raise LetterPositionError(f"position {p} out of range 1..{len(self.letters)}")
        return self.letters[p - 1]

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return concat(self, other)

    def text(self) -> str:
        if not self.letters:
            return "e"
        return " ".join(g.token for g in self.letters)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"BraidWord(n={self.strands}, {self.text()!r})"

    def replace(self, p: int, letter: Generator) -> "BraidWord":
        self[p]
        return BraidWord(self.strands, self.letters[: p - 1] + (letter,) + self.letters[p:])

    def singular_positions(self) -> tuple[int, ...]:
        return tuple(p for p in range(1, len(self.letters) + 1) if self.letters[p - 1].is_singular)

    def crossing_exponent_sum(self) -> int:
        return sum(g.sign for g in self.letters if g.is_crossing)

    def color_count(self, color: str) -> int:
        return sum(1 for g in self.letters if g.is_singular and g.color == color)


def empty_word(n: int) -> BraidWord:
    return BraidWord(n)


def concat(u: BraidWord, v: BraidWord) -> BraidWord:
    """Concatenation; purely syntactic, no simplification."""
    if u.strands != v.strands:
        raise StrandMismatchError(f"cannot concatenate words on {u.strands} and {v.strands} strands")
    return BraidWord(u.strands, u.letters + v.letters)


def underlying_permutation(w: BraidWord) -> Permutation:
    """
    Product of adjacent transpositions, one per letter, first letter acting
    first.  Both crossings and singular points exchange the two strands that
    meet (singular points are transversal intersections).
    """
    p = identity(w.strands)
    for g in w.letters:
        p = compose(p, transposition(w.strands, g.index - 1))
    return p


def resolve(w: BraidWord, p: int, sign: int) -> BraidWord:
    """Replace the singular point at position p by a crossing of the given sign."""
    if sign not in (1, -1):
        raise BraidError(f"sign must be +1 or -1, got {sign}")
    g = w[p]
    if not g.is_singular:
        raise LetterPositionError(f"letter at position {p} is {g.token}, not singular")
    return w.replace(p, sigma(g.index, sign))


def recolor(w: BraidWord, p: int, color: str) -> BraidWord:
    """Assign the given color to the singular point at position p."""
    if color not in (BLACK, WHITE):
        raise BraidError(f"color must be {BLACK!r} or {WHITE!r}, got {color!r}")
    g = w[p]
    if not g.is_singular:
        raise LetterPositionError(f"letter at position {p} is {g.token}, not singular")
    return w.replace(p, Generator(SINGULAR, g.index, color=color))


def check_alphabet(w: BraidWord, calculus: Calculus) -> None:
    """Reject letters outside the calculus alphabet (white under SB, singular under B)."""
    for p, g in enumerate(w.letters, start=1):
        if g.is_singular:
            if calculus == Calculus.B:
                raise AlphabetError(f"singular letter {g.token} at position {p} not allowed in calculus B")
            if calculus == Calculus.SB and g.color == WHITE:
                raise AlphabetError(f"white letter {g.token} at position {p} not allowed in calculus SB")


def alphabet_letters(calculus: Calculus, n: int) -> tuple[Generator, ...]:
    """All letters available to the calculus on n strands, in token order."""
    letters: list[Generator] = []
    for i in range(1, n):
        letters.append(sigma(i, 1))
        letters.append(sigma(i, -1))
        if calculus != Calculus.B:
            letters.append(tau(i))
        if calculus in (Calculus.M, Calculus.SG):
            letters.append(upsilon(i))
    return tuple(letters)


_TOKEN_RE = re.compile(r"^([sStu])([1-9][0-9]*)$")


def parse_word(text: str, n: int) -> BraidWord:
    """
    Parse the canonical word syntax: whitespace-separated tokens ``s<i>``,
    ``S<i>``, ``t<i>``, ``u<i>``; the single token ``e`` is the empty word.
    """
    tokens = text.split()
    if not tokens:
        raise ParseError("empty input (use 'e' for the empty word)", 1)
    if tokens == ["e"]:
        return BraidWord(n)
    letters: list[Generator] = []
    for k, tok in enumerate(tokens, start=1):
        if tok == "e":
            raise ParseError("'e' must stand alone", k)
        m = _TOKEN_RE.match(tok)
        if m is None:
            raise ParseError(f"unknown token {tok!r}", k)
        head, idx = m.group(1), int(m.group(2))
        if idx > n - 1:
            raise ParseError("index out of range", k)
        if head == "s":
            letters.append(sigma(idx, 1))
        elif head == "S":
            letters.append(sigma(idx, -1))
        elif head == "t":
            letters.append(tau(idx))
        else:
            letters.append(upsilon(idx))
    return BraidWord(n, tuple(letters))
