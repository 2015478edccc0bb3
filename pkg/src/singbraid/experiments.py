"""
Seeded experiment drivers: strategy-independence of reduction, transport of
rewrite chains through resolution of a singular point, and the closed-form
class models available on two strands (where all generators commute).
"""

from __future__ import annotations

import time
from random import Random

from .rewrite import (
    DISTINCT,
    Chain,
    ClosureCache,
    RelationSystem,
    SearchBudget,
    Step,
    applicable_moves,
    bfs_equal,
    relation_system,
    track_position,
)
from .diamond import certified_deletions, reduce_irreducible
from .words import (
    BLACK,
    WHITE,
    BraidError,
    BraidWord,
    Calculus,
    alphabet_letters,
    resolve,
    sigma,
)


def random_word(rng: Random, n: int, max_len: int, calculus: Calculus, min_singular: int = 0) -> BraidWord:
    """Uniform length in [min_singular, max_len], uniform letters; resamples until
    the word carries at least min_singular singular letters."""
    letters = alphabet_letters(calculus, n)
    while True:
        length = rng.randint(min_singular, max_len)
        w = BraidWord(n, tuple(rng.choice(letters) for _ in range(length)))
        if len(w.singular_positions()) >= min_singular:
            return w


def random_chain(rng: Random, w: BraidWord, system: RelationSystem, steps: int, max_length: int) -> Chain:
    """A random walk of one-step rewrites, never exceeding max_length."""
    chain: list[Step] = []
    current = w
    for _ in range(steps):
        moves = [(st, res) for st, res in applicable_moves(current, system) if len(res) <= max_length]
        if not moves:
            break
        st, res = moves[rng.randrange(len(moves))]
        chain.append(st)
        current = res
    return tuple(chain)


def _resolve_letters(letters: tuple, k: int, sign: int) -> tuple:
    g = letters[k]
    return letters[:k] + (sigma(g.index, sign),) + letters[k + 1:]


def resolved_chain(w: BraidWord, chain: Chain, p: int, sign: int) -> Chain:
    """
    Transport a rewrite chain through the resolution of the singular point at
    position p.  Steps not touching the point survive verbatim; steps moving
    it map to the crossing rule obtained by resolving both rule sides (or
    vanish when the two sides become identical).  Replaying the result on
    resolve(w, p, sign) lands on the resolution of the chain's endpoint at
    the tracked position.
    """
    system = relation_system(Calculus.M, w.strands, "default")
    out: list[Step] = []
    current, pos = w, p
    for step in chain:
        rule = step.rule
        matched = rule.left if step.forward else rule.right
        if step.position <= pos < step.position + len(matched):
            rel = pos - step.position
            smap = rule.singular_map
            if step.forward:
                left_rel, right_rel = rel, smap[rel]
            else:
                inv = {b: a for a, b in smap.items()}
                left_rel, right_rel = inv[rel], rel
            left2 = _resolve_letters(rule.left, left_rel, sign)
            right2 = _resolve_letters(rule.right, right_rel, sign)
            side, other = (left2, right2) if step.forward else (right2, left2)
            if side != other:
                found = system.by_sides.get((side, other))
                if found is None:
                    raise BraidError(f"no crossing rule matches resolved step {step!r}")
                rule2, forward2 = found
                out.append(Step(rule2, forward2, step.position))
        else:
            out.append(step)
        current, pos = track_position(current, (step,), pos)
    return tuple(out)


def lemma1_experiment(
    count: int = 500,
    seed: int = 2024,
    budget: SearchBudget | None = None,
    strand_choices: tuple[int, ...] = (2, 3),
    base_len: int = 4,
    chain_steps: int = 4,
) -> dict:
    """
    Seeded pairs (w, w') joined by a verified two-color chain, with a tracked
    singular point p: resolving p the same way on both sides must keep the
    words equal, and the transported chain must replay exactly.
    """
    from .rewrite import replay_chain

    budget = budget or SearchBudget(max_nodes=20_000)
    rng = Random(seed)
    cache = ClosureCache()
    t0 = time.perf_counter()
    checked = 0
    replay_failures: list[str] = []
    bfs_failures: list[str] = []
    for _ in range(count):
        n = rng.choice(strand_choices)
        system = relation_system(Calculus.M, n, "default")
        w = random_word(rng, n, base_len, Calculus.M, min_singular=1)
        chain = random_chain(rng, w, system, rng.randint(1, chain_steps), len(w) + 2)
        p = rng.choice(w.singular_positions())
        w2, p2 = track_position(w, chain, p)
        for sign in (1, -1):
            r1 = resolve(w, p, sign)
            r2 = resolve(w2, p2, sign)
            rchain = resolved_chain(w, chain, p, sign)
            if replay_chain(r1, rchain).text() != r2.text():
                replay_failures.append(f"{w.text()} / p={p} / sign={sign}")
                continue
            verdict = bfs_equal(r1, r2, system, budget, cache)
            if not verdict.is_equal:
                bfs_failures.append(f"{r1.text()} vs {r2.text()} -> {verdict.status}")
            checked += 1
    return {
        "schema": 1,
        "experiment": "resolution-respects-equivalence",
        "parameters": {"count": count, "seed": seed, "strands": list(strand_choices), "base_len": base_len},
        "checked": checked,
        "replay_failures": replay_failures,
        "bfs_failures": bfs_failures,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


def confluence_experiment(
    count: int = 1000,
    seed: int = 2024,
    n: int = 3,
    max_len: int = 6,
    budget: SearchBudget | None = None,
) -> dict:
    """
    Seeded random words over the full two-color alphabet, reduced with the
    deterministic and a randomized strategy.  A confirmed divergence needs
    both reductions exhaustively certified irreducible and the results
    provably distinct in the two-color monoid.
    """
    budget = budget or SearchBudget(max_nodes=4_000)
    rng = Random(seed)
    cache = ClosureCache()
    t0 = time.perf_counter()
    confluent = 0
    budget_limited = 0
    divergences: list[str] = []
    for _ in range(count):
        w = random_word(rng, n, max_len, Calculus.SG)
        t_det = reduce_irreducible(w, budget, "deterministic", cache=cache)
        t_rnd = reduce_irreducible(w, budget, "randomized", seed=rng.randrange(2**32), cache=cache)
        verdict = bfs_equal(t_det.result, t_rnd.result, relation_system(Calculus.M, n, "default"), budget, cache)
        if verdict.is_equal:
            confluent += 1
        elif verdict.status == DISTINCT and t_det.exhaustive and t_rnd.exhaustive:
            divergences.append(f"{w.text()}: {t_det.result.text()} vs {t_rnd.result.text()}")
        else:
            budget_limited += 1
    return {
        "schema": 1,
        "experiment": "reduction-strategy-confluence",
        "parameters": {"count": count, "seed": seed, "strands": n, "max_len": max_len, "max_nodes": budget.max_nodes},
        "confluent": confluent,
        "budget_limited": budget_limited,
        "divergences": divergences,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


def all_strategy_irreducibles(w: BraidWord, budget: SearchBudget, cache: ClosureCache | None = None) -> set[str]:
    """Every irreducible word reachable by maximal deletion sequences (deduplicated states)."""
    cache = cache if cache is not None else ClosureCache()
    leaves: set[str] = set()
    seen: set[str] = set()
    stack = [w]
    while stack:
        current = stack.pop()
        if current.text() in seen:
            continue
        seen.add(current.text())
        deletions, _ = certified_deletions(current, budget, cache)
        if not deletions:
            leaves.add(current.text())
            continue
        for result, _ in deletions:
            if result.text() not in seen:
                stack.append(result)
    return leaves


def sb2_index(w: BraidWord) -> tuple[int, int]:
    """(crossing exponent sum, black point count): full class data on 2 strands."""
    return (w.crossing_exponent_sum(), w.color_count(BLACK))


def sg2_index(w: BraidWord) -> tuple[int, int]:
    """(crossing exponent sum, black minus white): full group class data on 2 strands."""
    return (w.crossing_exponent_sum(), w.color_count(BLACK) - w.color_count(WHITE))
