"""
Left-weighted (greedy) normal form for the classical braid group of the disk.

A braid is written canonically as a power of the half twist times a sequence
of non-trivial permutation braids, adjacent pairs satisfying the
left-weighted condition: the starting set of each factor is contained in the
finishing set of its predecessor.  Equal braid words get identical normal
forms, which decides the word problem in B_n and supplies canonical keys for
formal sums.

Permutation braids are stored as bare permutations; starting and finishing
sets are descent sets of the permutation and its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .permutations import (
    Permutation,
    compose,
    descents,
    identity,
    inversions,
    invert,
    is_identity,
    longest_element,
    one_line,
    transposition,
)
from .words import AlphabetError, BraidWord, Generator, StrandMismatchError, sigma


def starting_set(p: Permutation) -> frozenset[int]:
    return descents(p)


def finishing_set(p: Permutation) -> frozenset[int]:
    return descents(invert(p))


def is_left_weighted(a: Permutation, b: Permutation) -> bool:
    return starting_set(b) <= finishing_set(a)


def _slide(n: int, a: Permutation, b: Permutation) -> tuple[Permutation, Permutation]:
    """Move head transpositions of b onto the tail of a until left-weighted."""
    while True:
        free = starting_set(b) - finishing_set(a)
        if not free:
            return a, b
        g = min(free)
        t = transposition(n, g)
        a = compose(a, t)
        b = compose(t, b)


def _normalize_factors(n: int, factors: list[Permutation]) -> tuple[int, tuple[Permutation, ...]]:
    """Left-weight an arbitrary factor sequence; returns (leading half-twist count, factors)."""
    changed = True
    while changed:
        changed = False
        for k in range(len(factors) - 1):
            a, b = _slide(n, factors[k], factors[k + 1])
            if a != factors[k]:
                factors[k], factors[k + 1] = a, b
                changed = True
    w0 = longest_element(n)
    lead = 0
    while lead < len(factors) and factors[lead] == w0:
        lead += 1
    tail = len(factors)
    while tail > lead and is_identity(factors[tail - 1]):
        tail -= 1
    return lead, tuple(factors[lead:tail])


@dataclass(frozen=True)
class NormalForm:
    """Canonical form Δ^infimum · factors, factors left-weighted and non-trivial."""

    strands: int
    infimum: int
    factors: tuple[Permutation, ...]

    def __post_init__(self):
        w0 = longest_element(self.strands)
        for f in self.factors:
            if is_identity(f) or f == w0:
                raise ValueError(f"trivial factor in normal form: {f}")
        for a, b in zip(self.factors, self.factors[1:]):
            if not is_left_weighted(a, b):
                raise ValueError(f"factors not left-weighted: {a}, {b}")

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    @property
    def supremum(self) -> int:
        return self.infimum + len(self.factors)

    def exponent_sum(self) -> int:
        half = self.strands * (self.strands - 1) // 2
        return half * self.infimum + sum(inversions(f) for f in self.factors)

    def text(self) -> str:
        parts = [f"D^{self.infimum}"]
        parts.extend(one_line(f) for f in self.factors)
        return " | ".join(parts)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"NormalForm(n={self.strands}, {self.text()!r})"

    def sort_key(self) -> tuple:
        return (self.strands, self.infimum, len(self.factors), self.factors)


def normal_form(w: BraidWord) -> NormalForm:
    """Left-weighted normal form of a classical word; singular letters are rejected."""
    for p, g in enumerate(w.letters, start=1):
        if g.is_singular:
            raise AlphabetError(f"singular letter {g.token} at position {p}: normal form is for classical words")
    n = w.strands
    w0 = longest_element(n)
    factors: list[Permutation] = []
    dpows: list[int] = []
    for g in w.letters:
        t = transposition(n, g.index - 1)
        if g.sign > 0:
            factors.append(t)
            dpows.append(0)
        else:
            factors.append(compose(w0, t))
            dpows.append(-1)
    # push the half-twist powers to the front; factors passed by a power of
    # the half twist pick up the flip conjugation
    total = 0
    for k in range(len(factors) - 1, -1, -1):
        if total % 2:
            factors[k] = compose(w0, compose(factors[k], w0))
        total += dpows[k]
    lead, normalized = _normalize_factors(n, factors)
    return NormalForm(n, total + lead, normalized)


def equal_B(u: BraidWord, v: BraidWord) -> bool:
    """Word problem in B_n: true iff the normal forms coincide."""
    if u.strands != v.strands:
        raise StrandMismatchError(f"cannot compare words on {u.strands} and {v.strands} strands")
    return normal_form(u) == normal_form(v)


def _descending_word(p: Permutation, n: int) -> list[Generator]:
    out: list[Generator] = []
    while not is_identity(p):
        g = min(k for k in range(n - 1) if p[k] > p[k + 1])
        out.append(sigma(g + 1, 1))
        p = compose(transposition(n, g), p)
    return out


@lru_cache(maxsize=None)
def half_twist_word(n: int) -> tuple[Generator, ...]:
    return tuple(_descending_word(longest_element(n), n))


def nf_to_word(nf: NormalForm) -> BraidWord:
    """A concrete word spelling the normal form (used to multiply canonical keys)."""
    n = nf.strands
    letters: list[Generator] = []
    delta = half_twist_word(n)
    if nf.infimum >= 0:
        letters.extend(delta * nf.infimum)
    else:
        anti = tuple(sigma(g.index, -1) for g in reversed(delta))
        letters.extend(anti * (-nf.infimum))
    for f in nf.factors:
        letters.extend(_descending_word(f, n))
    return BraidWord(n, tuple(letters))


def identity_nf(n: int) -> NormalForm:
    return NormalForm(n, 0, ())


def concat_nf_key(a: NormalForm, b: NormalForm) -> NormalForm:
    """Product of two canonical keys: spell both out, concatenate, renormalize."""
    if a.strands != b.strands:
        raise StrandMismatchError(f"cannot multiply keys on {a.strands} and {b.strands} strands")
    u, v = nf_to_word(a), nf_to_word(b)
    return normal_form(BraidWord(a.strands, u.letters + v.letters))


def permutation_of_nf(nf: NormalForm) -> Permutation:
    p = longest_element(nf.strands) if nf.infimum % 2 else identity(nf.strands)
    for f in nf.factors:
        p = compose(p, f)
    return p
