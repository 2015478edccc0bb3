"""
Opposite-pair moves and the local-confluence machinery built on them.

An adjacent pair (black, white) or (white, black) at the same strand index
cancels in SG but not in M.  Insertion and deletion of such pairs act up to
a change of representative: a pair is "found" on any word reachable from the
input inside the budget-bounded two-color closure.  Reduction deletes pairs
until none are exposed; the deterministic strategy always takes the
canonically least occurrence, the seeded randomized strategy exists to probe
strategy-independence.

``diamond_check`` resolves a peak alpha <- beta -> gamma (both obtained from
beta by a certified deletion) either by joining alpha and gamma directly in
the two-color monoid or by producing a common deletion valley.  A peak left
unresolved after fully exhausted searches aborts loudly: given complete
closures that outcome indicates an implementation bug, never a fact about
braids.

``sg_equal`` decides equality in the singular braid group by reducing both
sides to irreducible form and comparing those in the two-color monoid.
``injectivity_experiment`` checks, at desk scale, that words distinct under
the desingularization oracle stay distinct in the group.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from random import Random

from .desingular import eta
from .rewrite import (
    DISTINCT,
    EQUAL,
    INCONCLUSIVE,
    BudgetUsage,
    Chain,
    ClosureCache,
    EquivalenceVerdict,
    RelationSystem,
    SearchBudget,
    Step,
    applicable_moves,
    bfs_equal,
    invert_chain,
    relation_system,
    replay_chain,
)
from .words import (
    BLACK,
    WHITE,
    BraidError,
    BraidWord,
    Calculus,
    LetterPositionError,
    StrandMismatchError,
    alphabet_letters,
    check_alphabet,
    tau,
    upsilon,
)


class DiamondViolation(RuntimeError):
    """An exhaustively searched peak failed to resolve: implementation bug."""


class EmbeddingViolation(RuntimeError):
    """Words distinct under the desingularization oracle came out SG-equal."""


@dataclass(frozen=True)
class Move:
    """Pair insertion or deletion after a representative change ``pre_chain``."""

    insert: bool
    position: int
    index: int
    order: str  # "tu" = black then white, "ut" = white then black
    pre_chain: Chain

    def __repr__(self) -> str:
        kind = "insert" if self.insert else "delete"
        return f"Move({kind} {self.order}{self.index} @{self.position}, {len(self.pre_chain)} pre-steps)"


@dataclass(frozen=True)
class PairOccurrence:
    word: BraidWord
    position: int
    chain: Chain


@dataclass(frozen=True)
class PairSearch:
    occurrences: tuple[PairOccurrence, ...]
    complete: bool
    nodes: int
    cap: int


@dataclass(frozen=True)
class ReductionTrace:
    start: BraidWord
    moves: tuple[Move, ...]
    result: BraidWord
    exhaustive: bool  # the final no-pair certificate came from a complete search
    cap: int
    nodes: int


def _pair_order(a, b) -> str | None:
    if a.is_singular and b.is_singular and a.index == b.index and a.color != b.color:
        return "tu" if a.color == BLACK else "ut"
    return None


def opposite_pair_positions(w: BraidWord) -> tuple[int, ...]:
    """1-based positions p where letters p, p+1 form an adjacent opposite pair."""
    out = []
    for p in range(1, len(w.letters)):
        if _pair_order(w.letters[p - 1], w.letters[p]) is not None:
            out.append(p)
    return tuple(out)


def delete_pair(w: BraidWord, p: int) -> tuple[BraidWord, str]:
    order = _pair_order(w[p], w[p + 1])
    if order is None:
        raise LetterPositionError(f"letters at {p}, {p + 1} of {w.text()!r} are not an opposite pair")
    return BraidWord(w.strands, w.letters[: p - 1] + w.letters[p + 1:]), order


def insert_pair(w: BraidWord, p: int, index: int, order: str) -> BraidWord:
    if not 1 <= p <= len(w.letters) + 1:
        raise LetterPositionError(f"insertion position {p} out of range 1..{len(w.letters) + 1}")
    if order == "tu":
        pair = (tau(index), upsilon(index))
    elif order == "ut":
        pair = (upsilon(index), tau(index))
    else:
        raise BraidError(f"pair order must be 'tu' or 'ut', got {order!r}")
    return BraidWord(w.strands, w.letters[: p - 1] + pair + w.letters[p - 1:])


def apply_move(w: BraidWord, move: Move) -> BraidWord:
    rep = replay_chain(w, move.pre_chain)
    if move.insert:
        return insert_pair(rep, move.position, move.index, move.order)
    result, order = delete_pair(rep, move.position)
    if order != move.order:
        raise BraidError(f"move order {move.order!r} does not match pair at position {move.position}")
    return result


def _m_system(n: int) -> RelationSystem:
    return relation_system(Calculus.M, n, "default")


def find_opposite_pairs(
    w: BraidWord,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
) -> PairSearch:
    """
    All adjacent opposite pairs exposed on representatives inside the
    budget-bounded two-color closure of w, canonically sorted by
    (representative length, text, position).  A word missing one of the two
    colors is certified pair-free without search: every rule preserves the
    color counts, and a pair needs one of each.
    """
    check_alphabet(w, Calculus.M)
    budget = budget or SearchBudget()
    cap = budget.cap_for(w)
    if min(w.color_count(BLACK), w.color_count(WHITE)) == 0:
        return PairSearch((), True, 0, cap)
    system = _m_system(w.strands)
    ut = w.text()

    comp = cache.get(system, cap, ut) if cache is not None else None
    if comp is not None:
        occs = []
        for member in comp.words.values():
            for p in opposite_pair_positions(member):
                occs.append(PairOccurrence(member, p, comp.chain_between(ut, member.text())))
        occs.sort(key=lambda o: (len(o.word), o.word.text(), o.position))
        return PairSearch(tuple(occs), True, 0, cap)

    visited: dict[str, tuple[str, Step] | None] = {ut: None}
    words: dict[str, BraidWord] = {ut: w}
    frontier = [ut]
    nodes = 0
    truncated = False
    while frontier:
        if nodes + len(frontier) > budget.max_nodes:
            truncated = True
            break
        nodes += len(frontier)
        new_frontier: list[str] = []
        for text in frontier:
            for step, result in applicable_moves(words[text], system):
                if len(result) > cap:
                    continue
                rt = result.text()
                if rt in visited:
                    continue
                visited[rt] = (text, step)
                words[rt] = result
                new_frontier.append(rt)
        frontier = new_frontier
    from .rewrite import _Component

    comp = _Component(ut, words, visited)
    if not truncated and cache is not None:
        cache.store(system, cap, comp)
    occs = []
    for member in words.values():
        for p in opposite_pair_positions(member):
            occs.append(PairOccurrence(member, p, comp.chain_from_root(member.text())))
    occs.sort(key=lambda o: (len(o.word), o.word.text(), o.position))
    return PairSearch(tuple(occs), not truncated, nodes, cap)


def reduce_irreducible(
    w: BraidWord,
    budget: SearchBudget | None = None,
    strategy: str = "deterministic",
    seed: int | None = None,
    cache: ClosureCache | None = None,
) -> ReductionTrace:
    """
    Delete exposed opposite pairs until none remain within budget.  Each
    deletion removes one black and one white point, so at most
    min(black, white) deletions happen.  ``exhaustive`` is False when the
    final pair search was truncated; the result is then only "irreducible at
    this budget".
    """
    if strategy not in ("deterministic", "randomized"):
        raise BraidError(f"strategy must be 'deterministic' or 'randomized', got {strategy!r}")
    check_alphabet(w, Calculus.M)
    budget = budget or SearchBudget()
    rng = Random(seed) if strategy == "randomized" else None
    current = w
    moves: list[Move] = []
    nodes = 0
    cap = budget.cap_for(w)
    exhaustive = True
    for _ in range(min(w.color_count(BLACK), w.color_count(WHITE)) + 1):
        search = find_opposite_pairs(current, budget, cache)
        nodes += search.nodes
        if not search.occurrences:
            exhaustive = search.complete
            break
        occ = search.occurrences[0] if rng is None else search.occurrences[rng.randrange(len(search.occurrences))]
        result, order = delete_pair(occ.word, occ.position)
        moves.append(Move(False, occ.position, occ.word[occ.position].index, order, occ.chain))
        current = result
    return ReductionTrace(w, tuple(moves), current, exhaustive, cap, nodes)


def certified_deletions(
    w: BraidWord,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
) -> tuple[tuple[tuple[BraidWord, Move], ...], bool]:
    """Distinct words obtainable from w by one certified deletion, with one move each."""
    search = find_opposite_pairs(w, budget, cache)
    seen: dict[str, tuple[BraidWord, Move]] = {}
    for occ in search.occurrences:
        result, order = delete_pair(occ.word, occ.position)
        if result.text() not in seen:
            move = Move(False, occ.position, occ.word[occ.position].index, order, occ.chain)
            seen[result.text()] = (result, move)
    ordered = tuple(seen[t] for t in sorted(seen, key=lambda t: (len(seen[t][0]), t)))
    return ordered, search.complete


@dataclass(frozen=True)
class DiamondOutcome:
    kind: str  # "m-equal" | "valley" | "inconclusive"
    witness: Chain | None = None
    eta_word: BraidWord | None = None
    alpha_move: Move | None = None
    gamma_move: Move | None = None
    link: Chain | None = None  # joins the two deletion results of a valley
    nodes: int = 0


def diamond_check(
    alpha: BraidWord,
    beta: BraidWord,
    gamma: BraidWord,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
    up_move: Move | None = None,
    down_move: Move | None = None,
) -> DiamondOutcome:
    """
    Resolve the peak alpha <- beta -> gamma.  Returns an equality witness for
    (alpha, gamma) in the two-color monoid, or a valley word eta with
    certified deletions from both alpha and gamma.  When every search ran to
    exhaustion and neither resolution exists, DiamondViolation is raised.
    """
    if not (alpha.strands == beta.strands == gamma.strands):
        raise StrandMismatchError("peak words must share the strand count")
    budget = budget or SearchBudget()
    cache = cache if cache is not None else ClosureCache()
    nodes = 0

    for move, target, name in ((up_move, alpha, "alpha"), (down_move, gamma, "gamma")):
        if move is not None:
            if move.insert:
                raise BraidError(f"{name} certificate must be a deletion move on beta")
            if apply_move(beta, move).text() != target.text():
                raise BraidError(f"{name} certificate does not reproduce {name} from beta")
    if up_move is None or down_move is None:
        results, complete = certified_deletions(beta, budget, cache)
        for target, name in ((alpha, "alpha"), (gamma, "gamma")):
            certified = any(
                bfs_equal(result, target, _m_system(beta.strands), budget, cache).is_equal for result, _ in results
            )
            if not certified:
                suffix = "" if complete else " within budget"
                raise BraidError(f"no deletion of beta reaches {name}{suffix}: peak not certified")

    direct = bfs_equal(alpha, gamma, _m_system(alpha.strands), budget, cache)
    nodes += direct.budget_used.nodes
    if direct.is_equal:
        return DiamondOutcome("m-equal", witness=direct.witness, nodes=nodes)

    alpha_dels, alpha_complete = certified_deletions(alpha, budget, cache)
    gamma_dels, gamma_complete = certified_deletions(gamma, budget, cache)
    all_exhausted = direct.status == DISTINCT and alpha_complete and gamma_complete
    for da, ma in alpha_dels:
        for dg, mg in gamma_dels:
            link = bfs_equal(da, dg, _m_system(alpha.strands), budget, cache)
            nodes += link.budget_used.nodes
            if link.is_equal:
                return DiamondOutcome(
                    "valley", eta_word=da, alpha_move=ma, gamma_move=mg, link=link.witness, nodes=nodes
                )
            if link.status == INCONCLUSIVE:
                all_exhausted = False
    if all_exhausted:
        raise DiamondViolation(
            f"peak over beta={beta.text()!r} (alpha={alpha.text()!r}, gamma={gamma.text()!r}) "
            f"unresolved with fully exhausted searches at cap {budget.cap_for(beta)}: "
            "this contradicts local confluence and indicates a bug (or a cap too small to be exhaustive)"
        )
    return DiamondOutcome("inconclusive", nodes=nodes)


def _sg_rule(n: int, index: int, order: str):
    name = f"R8a[{index}]" if order == "tu" else f"R8b[{index}]"
    system = relation_system(Calculus.SG, n, "default")
    return system.rules[system.rule_index[name]]


def _reduction_chain(trace: ReductionTrace) -> Chain:
    steps: list[Step] = []
    for move in trace.moves:
        steps.extend(move.pre_chain)
        steps.append(Step(_sg_rule(trace.start.strands, move.index, move.order), True, move.position))
    return tuple(steps)


def sg_equal(
    u: BraidWord,
    v: BraidWord,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
    reduction_cache: dict[str, ReductionTrace] | None = None,
) -> EquivalenceVerdict:
    """
    Equality in the singular braid group: reduce both words to irreducible
    form, then compare the irreducible forms in the two-color monoid.  An
    equal verdict carries a replayable chain over the SG rules (pair
    cancellations plus two-color rewrites).  A distinct verdict additionally
    requires both irreducibility certificates to be exhaustive.
    """
    if u.strands != v.strands:
        raise StrandMismatchError(f"cannot compare words on {u.strands} and {v.strands} strands")
    budget = budget or SearchBudget()
    traces = []
    for w in (u, v):
        key = w.text()
        if reduction_cache is not None and key in reduction_cache:
            traces.append(reduction_cache[key])
            continue
        trace = reduce_irreducible(w, budget, cache=cache)
        if reduction_cache is not None:
            reduction_cache[key] = trace
        traces.append(trace)
    tr_u, tr_v = traces
    verdict = bfs_equal(tr_u.result, tr_v.result, _m_system(u.strands), budget, cache)
    nodes = verdict.budget_used.nodes + tr_u.nodes + tr_v.nodes
    cap = max(verdict.budget_used.cap, tr_u.cap, tr_v.cap)
    usage = BudgetUsage(nodes, cap, verdict.budget_used.truncated)
    if verdict.is_equal:
        witness = _reduction_chain(tr_u) + verdict.witness + invert_chain(_reduction_chain(tr_v))
        return EquivalenceVerdict(EQUAL, witness, usage, "irreducible forms joined in M")
    if verdict.status == DISTINCT and tr_u.exhaustive and tr_v.exhaustive:
        return EquivalenceVerdict(DISTINCT, None, usage, f"irreducible forms distinct in M ({verdict.reason})")
    reason = "reduction not certified at budget" if verdict.status == DISTINCT else verdict.reason
    return EquivalenceVerdict(INCONCLUSIVE, None, usage, reason)


def sb_words(n: int, max_len: int) -> list[BraidWord]:
    """All black-only words on n strands up to max_len, sorted by (length, text)."""
    letters = alphabet_letters(Calculus.SB, n)
    out = [BraidWord(n)]
    frontier = [BraidWord(n)]
    for _ in range(max_len):
        frontier = [BraidWord(n, w.letters + (g,)) for w in frontier for g in letters]
        out.extend(frontier)
    out.sort(key=lambda w: (len(w), w.text()))
    return out


def _pair_chunks(total: int, chunks: int) -> list[range]:
    size = (total + chunks - 1) // chunks if total else 1
    return [range(k, min(k + size, total)) for k in range(0, total, size)]


def injectivity_experiment(
    n: int,
    max_len: int,
    budget: SearchBudget | None = None,
    jobs: int = 1,
    within_sample: int = 200,
) -> dict:
    """
    Enumerate black-only words up to max_len, partition them by eta image,
    and confirm that every cross-class pair fails to be SG-equal.  An equal
    verdict across classes aborts with EmbeddingViolation.  A sample of
    within-class pairs double-checks cross-oracle agreement: a distinct
    SG verdict inside a class also aborts.
    """
    if n > 3 or max_len > 6:
        raise BraidError("injectivity experiment is desk scale: n <= 3 and max_len <= 6")
    budget = budget or SearchBudget()
    t0 = time.perf_counter()
    _m_system(n)  # build shared systems before any worker races the cache
    relation_system(Calculus.SG, n, "default")
    words = sb_words(n, max_len)
    keys = [eta(w) for w in words]
    class_ids: dict = {}
    classes: list[list[int]] = []
    labels = []
    for k, key in enumerate(keys):
        if key not in class_ids:
            class_ids[key] = len(classes)
            classes.append([])
        cid = class_ids[key]
        classes[cid].append(k)
        labels.append(cid)

    total = len(words)
    cross_total = 0
    for i in range(total):
        for j in range(i + 1, total):
            if labels[i] != labels[j]:
                cross_total += 1

    def check_rows(rows: range) -> tuple[Counter, list[tuple[str, str]]]:
        counts: Counter = Counter()
        violations: list[tuple[str, str]] = []
        cache = ClosureCache()
        reductions: dict[str, ReductionTrace] = {}
        for i in rows:
            for j in range(i + 1, total):
                if labels[i] == labels[j]:
                    continue
                verdict = sg_equal(words[i], words[j], budget, cache, reductions)
                if verdict.is_equal:
                    counts["equal"] += 1
                    violations.append((words[i].text(), words[j].text()))
                elif verdict.status == DISTINCT:
                    if "invariant mismatch" in verdict.reason:
                        counts["distinct_invariant"] += 1
                    else:
                        counts["distinct_exhausted"] += 1
                else:
                    counts["inconclusive"] += 1
        return counts, violations

    counts: Counter = Counter()
    violations: list[tuple[str, str]] = []
    chunks = _pair_chunks(total, max(1, jobs))
    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for c, v in pool.map(check_rows, chunks):
                counts.update(c)
                violations.extend(v)
    else:
        for chunk in chunks:
            c, v = check_rows(chunk)
            counts.update(c)
            violations.extend(v)

    within: list[tuple[int, int]] = []
    for i in range(total):
        if len(within) >= within_sample:
            break
        for j in range(i + 1, total):
            if labels[i] == labels[j]:
                within.append((i, j))
                if len(within) >= within_sample:
                    break
    within_counts: Counter = Counter()
    within_violations: list[tuple[str, str]] = []
    witness_samples: list[dict] = []
    cache = ClosureCache()
    reductions: dict[str, ReductionTrace] = {}
    for i, j in within:
        verdict = sg_equal(words[i], words[j], budget, cache, reductions)
        within_counts[verdict.status] += 1
        if verdict.status == DISTINCT:
            within_violations.append((words[i].text(), words[j].text()))
        elif verdict.is_equal and len(witness_samples) < 5:
            witness_samples.append(
                {
                    "left": words[i].text(),
                    "right": words[j].text(),
                    "chain": [
                        {"rule": s.rule.name, "forward": s.forward, "position": s.position} for s in verdict.witness
                    ],
                }
            )

    class_order = sorted(range(len(classes)), key=lambda cid: (len(words[classes[cid][0]]), words[classes[cid][0]].text()))
    class_table = [
        {
            "representative": words[classes[cid][0]].text(),
            "size": len(classes[cid]),
            "key": keys[classes[cid][0]].text(),
        }
        for cid in class_order
    ]
    report = {
        "schema": 1,
        "experiment": "sb-to-sg-injectivity",
        "parameters": {
            "strands": n,
            "max_len": max_len,
            "max_nodes": budget.max_nodes,
            "max_length": budget.max_length,
            "slack": budget.slack,
            "jobs": jobs,
            "within_sample": within_sample,
            "presentation": _m_system(n).variant,
        },
        "words": total,
        "classes": len(classes),
        "class_table": class_table,
        "pairs": {
            "cross_class": cross_total,
            "within_class_sampled": len(within),
            "verdicts": {k: counts[k] for k in sorted(counts)},
            "within_verdicts": {k: within_counts[k] for k in sorted(within_counts)},
        },
        "violations": [list(v) for v in violations],
        "within_violations": [list(v) for v in within_violations],
        "witness_samples": witness_samples,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    if violations:
        raise EmbeddingViolation(
            f"{len(violations)} cross-class pair(s) came out SG-equal, e.g. {violations[0]}: embedding falsified"
        )
    if within_violations:
        raise EmbeddingViolation(
            f"{len(within_violations)} within-class pair(s) came out SG-distinct, e.g. {within_violations[0]}: oracles disagree"
        )
    return report


def report_to_csv(report: dict) -> str:
    """CSV summary of an experiment report's class table."""
    lines = ["representative,size,key"]
    for row in report.get("class_table", []):
        key = str(row["key"]).replace('"', '""')
        lines.append(f"\"{row['representative']}\",{row['size']},\"{key}\"")
    return "\n".join(lines) + "\n"
