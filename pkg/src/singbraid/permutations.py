"""
Permutations of {0, ..., n-1} as tuples of images.

Convention used throughout the package: ``compose(p, q)`` applies p first,
then q, matching the bottom-to-top reading of a braid word (the first letter
acts first).  One-line display is 1-based.
"""

from __future__ import annotations

from functools import lru_cache

Permutation = tuple[int, ...]


def identity(n: int) -> Permutation:
    return tuple(range(n))


def is_identity(p: Permutation) -> bool:
    return all(p[k] == k for k in range(len(p)))


def transposition(n: int, g: int) -> Permutation:
    """Adjacent transposition swapping positions g and g+1 (0-based)."""
    if not 0 <= g < n - 1:
        raise ValueError(f"transposition index {g} out of range for n={n}")
    images = list(range(n))
    images[g], images[g + 1] = images[g + 1], images[g]
    return tuple(images)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply p first, then q."""
    return tuple(q[p[x]] for x in range(len(p)))


def invert(p: Permutation) -> Permutation:
    images = [0] * len(p)
    for x, y in enumerate(p):
        images[y] = x
    return tuple(images)


@lru_cache(maxsize=None)
def longest_element(n: int) -> Permutation:
    """Order-reversing permutation; underlies the half twist."""
    return tuple(range(n - 1, -1, -1))


def inversions(p: Permutation) -> int:
    n = len(p)
    return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])


def descents(p: Permutation) -> frozenset[int]:
    """Positions g with p[g] > p[g+1]."""
    return frozenset(g for g in range(len(p) - 1) if p[g] > p[g + 1])


def one_line(p: Permutation) -> str:
    """1-based one-line notation; digits for n <= 9, else comma-separated."""
    if len(p) <= 9:
        return "".join(str(x + 1) for x in p)
    return ",".join(str(x + 1) for x in p)
