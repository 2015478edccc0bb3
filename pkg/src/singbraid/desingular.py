"""
Desingularization into the integer group algebra of the classical braid group.

A black singular point maps to (positive crossing) - (negative crossing); the
colored extension tags each term with formal commuting markers x, y counting
black and white points.  Sums are kept canonical by normal-forming every key,
so equality of images is a plain comparison.  On the disk the black-only map
is injective on SB_n (an external theorem), which makes it an equality
oracle there; the colored map is sound for distinctness only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .garside import NormalForm, concat_nf_key, normal_form
from .words import (
    BLACK,
    WHITE,
    AlphabetError,
    BraidWord,
    StrandMismatchError,
    resolve,
)

Term = tuple[NormalForm, tuple[int, int]]


def _term_key(term: Term) -> tuple:
    nf, degree = term
    return (degree, nf.sort_key())


@dataclass(frozen=True)
class FormalSum:
    """Integer combination of canonical braid keys, optionally bigraded by (black, white)."""

    terms: tuple[tuple[Term, int], ...]

    @staticmethod
    def from_dict(d: dict[Term, int]) -> "FormalSum":
        items = tuple(sorted(((t, c) for t, c in d.items() if c != 0), key=lambda tc: _term_key(tc[0])))
        return FormalSum(items)

    @staticmethod
    def zero() -> "FormalSum":
        return FormalSum(())

    def as_dict(self) -> dict[Term, int]:
        return dict(self.terms)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        acc = self.as_dict()
        for t, c in other.terms:
            acc[t] = acc.get(t, 0) + c
        return FormalSum.from_dict(acc)

    def __neg__(self) -> "FormalSum":
        return FormalSum(tuple((t, -c) for t, c in self.terms))

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, other: "FormalSum") -> "FormalSum":
        acc: dict[Term, int] = {}
        for (nf_a, deg_a), ca in self.terms:
            for (nf_b, deg_b), cb in other.terms:
                key = (concat_nf_key(nf_a, nf_b), (deg_a[0] + deg_b[0], deg_a[1] + deg_b[1]))
                acc[key] = acc.get(key, 0) + ca * cb
        return FormalSum.from_dict(acc)

    def degrees(self) -> set[tuple[int, int]]:
        return {deg for (_, deg), _ in self.terms}

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (nf, deg), c in self.terms:
            sign = "-" if c < 0 else "+"
            marker = "" if deg == (0, 0) else f"x^{deg[0]}y^{deg[1]}·"
            parts.append(f"{sign}{abs(c)}·{marker}({nf.text()})")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.text()


def _resolutions(w: BraidWord, degree: tuple[int, int] | None) -> FormalSum:
    positions = w.singular_positions()
    acc: dict[Term, int] = {}
    deg = degree if degree is not None else (0, 0)
    for signs in itertools.product((1, -1), repeat=len(positions)):
        resolved = w
        for p, s in zip(positions, signs):
            resolved = resolve(resolved, p, s)
        coeff = -1 if sum(1 for s in signs if s < 0) % 2 else 1
        key = (normal_form(resolved), deg)
        acc[key] = acc.get(key, 0) + coeff
    return FormalSum.from_dict(acc)


def eta(w: BraidWord) -> FormalSum:
    """
    Desingularize a black-only word: every singular point is expanded into
    (positive crossing) - (negative crossing) and the resulting classical
    words are normal-formed and summed.
    """
    if w.color_count(WHITE):
        raise AlphabetError("eta is defined on black-only words")
    return _resolutions(w, None)


def eta2(w: BraidWord) -> FormalSum:
    """
    Colored desingularization on the two-color monoid: black points carry
    marker x, white points marker y.  The image is homogeneous of bidegree
    (black count, white count).  Sound for distinctness, not equality.
    """
    return _resolutions(w, (w.color_count(BLACK), w.color_count(WHITE)))


def oracle_equal_SB(u: BraidWord, v: BraidWord) -> bool:
    """Presentation-free equality oracle for black-only words via eta images."""
    if u.strands != v.strands:
        raise StrandMismatchError(f"cannot compare words on {u.strands} and {v.strands} strands")
    return eta(u) == eta(v)
