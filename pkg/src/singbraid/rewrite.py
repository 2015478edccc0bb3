"""
Relation systems for B, SB, M and SG as bidirectional word-rewrite rules,
plus a budget-bounded breadth-first equivalence semi-decision.

The disk presentations are the classical ones: crossing cancellation (R1),
far commutation of crossings (R2), the braid relation (R3), far commutation
with singular letters (R4, R5), the crossing/singular exchange at the same
index (R6), the triple exchange moving a singular point across two crossings
(R7), and, for SG only, cancellation of opposite singular pairs (R8).

Two instantiations are provided per calculus.  The "minimal" variant carries
only the positive-crossing rule forms; the "default" variant also carries the
signed forms derivable from them (inverse-crossing commutations, mixed braid
shuffles, inverse-crossing triple exchanges).  The derived forms do not
change the generated congruence but make bounded search far more effective;
their derivability from the minimal variant is covered by tests.

Every verdict is budget-relative: ``equal`` carries a replayable witness
chain, ``distinct`` means a rewrite component was exhausted below budget
(sound for the length cap used), and ``inconclusive`` means the node budget
ran out first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .words import (
    BLACK,
    WHITE,
    BraidError,
    BraidWord,
    Calculus,
    Generator,
    StrandMismatchError,
    check_alphabet,
    sigma,
    tau,
    underlying_permutation,
    upsilon,
)

EQUAL = "equal"
DISTINCT = "distinct"
INCONCLUSIVE = "inconclusive"


class ChainReplayError(BraidError):
    pass


@dataclass(frozen=True, eq=False)
class RewriteRule:
    """One bidirectional rule instance; both sides are concrete letter tuples."""

    name: str
    left: tuple[Generator, ...]
    right: tuple[Generator, ...]
    cancellation: bool = False  # removes a singular pair (SG only)

    @property
    def length_preserving(self) -> bool:
        return len(self.left) == len(self.right)

    @cached_property
    def singular_map(self) -> dict[int, int]:
        """0-based position of each singular letter on the left mapped to its
        position on the right.  Letters pair by (index, color) when both sides
        carry the same indices; a color group with a single letter per side
        pairs those even across indices (the triple exchange moves the point
        to the neighbouring strand).  Empty for cancellation rules."""
        if self.cancellation:
            return {}
        lefts: dict[str, list[int]] = {}
        rights: dict[str, list[int]] = {}
        for k, g in enumerate(self.left):
            if g.is_singular:
                lefts.setdefault(g.color, []).append(k)
        for k, g in enumerate(self.right):
            if g.is_singular:
                rights.setdefault(g.color, []).append(k)
        mapping: dict[int, int] = {}
        for color, lpos in lefts.items():
            rpos = rights.get(color, [])
            if len(lpos) != len(rpos):
                raise BraidError(f"rule {self.name} changes singular letters without cancellation flag")
            if len(lpos) == 1:
                mapping[lpos[0]] = rpos[0]
                continue
            by_index = {self.right[k].index: k for k in rpos}
            if len(by_index) != len(rpos) or any(self.left[k].index not in by_index for k in lpos):
                raise BraidError(f"rule {self.name} has ambiguous singular letter pairing")
            for k in lpos:
                mapping[k] = by_index[self.left[k].index]
        return mapping

    def __repr__(self) -> str:
        lhs = " ".join(g.token for g in self.left) or "e"
        rhs = " ".join(g.token for g in self.right) or "e"
        return f"{self.name}: {lhs} <-> {rhs}"


@dataclass(frozen=True, eq=False)
class RelationSystem:
    """Immutable set of rule instances for one calculus on a fixed strand count."""

    calculus: Calculus
    strands: int
    variant: str
    rules: tuple[RewriteRule, ...]

    @cached_property
    def rule_index(self) -> dict[str, int]:
        return {r.name: k for k, r in enumerate(self.rules)}

    @cached_property
    def by_sides(self) -> dict[tuple[tuple[Generator, ...], tuple[Generator, ...]], tuple[RewriteRule, bool]]:
        """(matched side, replacement) -> (rule, forward)."""
        table: dict = {}
        for r in self.rules:
            table.setdefault((r.left, r.right), (r, True))
            table.setdefault((r.right, r.left), (r, False))
        return table

    @cached_property
    def _matchers(self) -> tuple[dict[Generator, list[tuple[int, RewriteRule, bool]]], list[tuple[int, RewriteRule, bool]]]:
        by_first: dict[Generator, list[tuple[int, RewriteRule, bool]]] = {}
        inserters: list[tuple[int, RewriteRule, bool]] = []
        for k, r in enumerate(self.rules):
            for forward, side in ((True, r.left), (False, r.right)):
                if side:
                    by_first.setdefault(side[0], []).append((k, r, forward))
                else:
                    inserters.append((k, r, forward))
        return by_first, inserters

    def __repr__(self) -> str:
        return f"RelationSystem({self.calculus.value}, n={self.strands}, variant={self.variant!r}, {len(self.rules)} rules)"


@dataclass(frozen=True)
class Step:
    """One rewrite application: rule, direction and 1-based letter position."""

    rule: RewriteRule
    forward: bool
    position: int

    def inverted(self) -> "Step":
        return Step(self.rule, not self.forward, self.position)

    def __repr__(self) -> str:
        arrow = "->" if self.forward else "<-"
        return f"({self.rule.name} {arrow} @{self.position})"


Chain = tuple[Step, ...]


def _pm(a: int) -> str:
    return "+" if a > 0 else "-"


def _cc(color: str) -> str:
    return "b" if color == BLACK else "w"


def _sing(index: int, color: str) -> Generator:
    return tau(index) if color == BLACK else upsilon(index)


def _colors(calculus: Calculus) -> tuple[str, ...]:
    if calculus == Calculus.B:
        return ()
    if calculus == Calculus.SB:
        return (BLACK,)
    return (BLACK, WHITE)


def _crossing_rules(n: int, signed: bool) -> list[RewriteRule]:
    rules: list[RewriteRule] = []
    for i in range(1, n):
        si, Si = sigma(i, 1), sigma(i, -1)
        rules.append(RewriteRule(f"R1a[{i}]", (si, Si), ()))
        rules.append(RewriteRule(f"R1b[{i}]", (Si, si), ()))
        if signed:
            rules.append(RewriteRule(f"R1s[{i}]", (si, Si), (Si, si)))
    for i in range(1, n):
        for j in range(i + 2, n):
            for a in (1, -1) if signed else (1,):
                for b in (1, -1) if signed else (1,):
                    rules.append(
                        RewriteRule(
                            f"R2[{_pm(a)}{_pm(b)},{i},{j}]",
                            (sigma(i, a), sigma(j, b)),
                            (sigma(j, b), sigma(i, a)),
                        )
                    )
    for i in range(1, n - 1):
        si, sj = sigma(i, 1), sigma(i + 1, 1)
        Si, Sj = sigma(i, -1), sigma(i + 1, -1)
        rules.append(RewriteRule(f"R3a[{i}]", (si, sj, si), (sj, si, sj)))
        if signed:
            rules.append(RewriteRule(f"R3b[{i}]", (Si, Sj, Si), (Sj, Si, Sj)))
            rules.append(RewriteRule(f"R3c[{i}]", (si, sj, Si), (Sj, si, sj)))
            rules.append(RewriteRule(f"R3d[{i}]", (Si, sj, si), (sj, si, Sj)))
            rules.append(RewriteRule(f"R3e[{i}]", (si, Sj, Si), (Sj, Si, sj)))
            rules.append(RewriteRule(f"R3f[{i}]", (Si, Sj, si), (sj, Si, Sj)))
    return rules


def _singular_rules(n: int, colors: tuple[str, ...], signed: bool) -> list[RewriteRule]:
    rules: list[RewriteRule] = []
    for i in range(1, n):
        for j in range(1, n):
            if abs(i - j) < 2:
                continue
            for c in colors:
                for a in (1, -1) if signed else (1,):
                    rules.append(
                        RewriteRule(
                            f"R4[{_pm(a)},{_cc(c)},{i},{j}]",
                            (sigma(i, a), _sing(j, c)),
                            (_sing(j, c), sigma(i, a)),
                        )
                    )
    for i in range(1, n):
        for j in range(i + 2, n):
            for c in colors:
                for c2 in colors:
                    rules.append(
                        RewriteRule(
                            f"R5[{_cc(c)}{_cc(c2)},{i},{j}]",
                            (_sing(i, c), _sing(j, c2)),
                            (_sing(j, c2), _sing(i, c)),
                        )
                    )
    for i in range(1, n):
        for c in colors:
            for a in (1, -1) if signed else (1,):
                rules.append(
                    RewriteRule(
                        f"R6[{_pm(a)},{_cc(c)},{i}]",
                        (sigma(i, a), _sing(i, c)),
                        (_sing(i, c), sigma(i, a)),
                    )
                )
    for i in range(1, n - 1):
        si, sj = sigma(i, 1), sigma(i + 1, 1)
        Si, Sj = sigma(i, -1), sigma(i + 1, -1)
        for c in colors:
            ti, tj = _sing(i, c), _sing(i + 1, c)
            rules.append(RewriteRule(f"R7a[{_cc(c)},{i}]", (si, sj, ti), (tj, si, sj)))
            rules.append(RewriteRule(f"R7b[{_cc(c)},{i}]", (sj, si, tj), (ti, sj, si)))
            if signed:
                rules.append(RewriteRule(f"R7c[{_cc(c)},{i}]", (Si, Sj, ti), (tj, Si, Sj)))
                rules.append(RewriteRule(f"R7d[{_cc(c)},{i}]", (Sj, Si, tj), (ti, Sj, Si)))
    return rules


def _cancellation_rules(n: int) -> list[RewriteRule]:
    rules = []
    for i in range(1, n):
        rules.append(RewriteRule(f"R8a[{i}]", (tau(i), upsilon(i)), (), cancellation=True))
        rules.append(RewriteRule(f"R8b[{i}]", (upsilon(i), tau(i)), (), cancellation=True))
    return rules


def _rule_word(n: int, letters: tuple[Generator, ...]) -> BraidWord:
    return BraidWord(n, letters)


def _validate_rule(rule: RewriteRule, n: int) -> None:
    lw, rw = _rule_word(n, rule.left), _rule_word(n, rule.right)
    if underlying_permutation(lw) != underlying_permutation(rw):
        raise BraidError(f"rule {rule.name} does not preserve the underlying permutation")
    if lw.crossing_exponent_sum() != rw.crossing_exponent_sum():
        raise BraidError(f"rule {rule.name} does not preserve the crossing exponent sum")
    db = lw.color_count(BLACK) - rw.color_count(BLACK)
    dw = lw.color_count(WHITE) - rw.color_count(WHITE)
    if rule.cancellation:
        if db != dw:
            raise BraidError(f"rule {rule.name} does not preserve black minus white count")
    elif db or dw:
        raise BraidError(f"rule {rule.name} changes color counts")


@lru_cache(maxsize=None)
def relation_system(calculus: Calculus, strands: int, variant: str = "default") -> RelationSystem:
    """Build the rule instances of one calculus on ``strands`` strands."""
    if strands < 1:
        raise BraidError(f"strand count must be >= 1, got {strands}")
    if variant not in ("default", "minimal"):
        raise BraidError(f"unknown variant {variant!r}")
    calculus = Calculus(calculus)
    signed = variant == "default"
    rules = _crossing_rules(strands, signed)
    rules += _singular_rules(strands, _colors(calculus), signed)
    if calculus == Calculus.SG:
        rules += _cancellation_rules(strands)
    for r in rules:
        _validate_rule(r, strands)
    return RelationSystem(calculus, strands, variant, tuple(rules))


@lru_cache(maxsize=None)
def length_preserving_system(system: RelationSystem) -> RelationSystem:
    rules = tuple(r for r in system.rules if r.length_preserving)
    return RelationSystem(system.calculus, system.strands, system.variant + "+lp", rules)


def apply_step(w: BraidWord, step: Step) -> BraidWord:
    """Apply one rewrite step; raises ChainReplayError when the segment does not match."""
    matched = step.rule.left if step.forward else step.rule.right
    replacement = step.rule.right if step.forward else step.rule.left
    k = step.position - 1
    if k < 0 or k + len(matched) > len(w.letters):
        raise ChainReplayError(f"step {step!r} does not fit word {w.text()!r}")
    if w.letters[k : k + len(matched)] != matched:
        raise ChainReplayError(f"step {step!r} does not match word {w.text()!r}")
    return BraidWord(w.strands, w.letters[:k] + replacement + w.letters[k + len(matched):])


def replay_chain(w: BraidWord, chain: Chain) -> BraidWord:
    for step in chain:
        w = apply_step(w, step)
    return w


def invert_chain(chain: Chain) -> Chain:
    return tuple(step.inverted() for step in reversed(chain))


def track_position(w: BraidWord, chain: Chain, p: int) -> tuple[BraidWord, int]:
    """Replay a chain while tracking the singular point at 1-based position p."""
    if not w[p].is_singular:
        raise ChainReplayError(f"position {p} of {w.text()!r} is not singular")
    for step in chain:
        matched = step.rule.left if step.forward else step.rule.right
        replacement = step.rule.right if step.forward else step.rule.left
        if p < step.position:
            pass
        elif p >= step.position + len(matched):
            p += len(replacement) - len(matched)
        else:
            smap = step.rule.singular_map
            rel = p - step.position
            if step.forward:
                if rel not in smap:
                    raise ChainReplayError(f"step {step!r} destroys the tracked singular point")
                p = step.position + smap[rel]
            else:
                inv = {b: a for a, b in smap.items()}
                if rel not in inv:
                    raise ChainReplayError(f"step {step!r} destroys the tracked singular point")
                p = step.position + inv[rel]
        w = apply_step(w, step)
    return w, p


def applicable_moves(w: BraidWord, system: RelationSystem) -> list[tuple[Step, BraidWord]]:
    """
    All one-step rewrites of w under the system, in either direction, ordered
    by (position, rule index, direction).  Exhaustive over positions and rules.
    """
    check_alphabet(w, system.calculus)
    if w.strands != system.strands:
        raise StrandMismatchError(f"word on {w.strands} strands under system on {system.strands}")
    by_first, inserters = system._matchers
    letters = w.letters
    L = len(letters)
    found: list[tuple[tuple[int, int, int], Step, BraidWord]] = []
    for k in range(L):
        candidates = by_first.get(letters[k])
        if not candidates:
            continue
        for ridx, rule, forward in candidates:
            matched = rule.left if forward else rule.right
            if k + len(matched) > L or letters[k : k + len(matched)] != matched:
                continue
            replacement = rule.right if forward else rule.left
            result = BraidWord(w.strands, letters[:k] + replacement + letters[k + len(matched):])
            found.append(((k + 1, ridx, 0 if forward else 1), Step(rule, forward, k + 1), result))
    for k in range(L + 1):
        for ridx, rule, forward in inserters:
            replacement = rule.right if forward else rule.left
            result = BraidWord(w.strands, letters[:k] + replacement + letters[k:])
            found.append(((k + 1, ridx, 0 if forward else 1), Step(rule, forward, k + 1), result))
    found.sort(key=lambda item: item[0])
    return [(step, result) for _, step, result in found]


def invariant_signature(w: BraidWord, calculus: Calculus) -> tuple:
    """
    Quantities preserved by every rule of the calculus; differing signatures
    certify distinctness.  B: (permutation, exponent sum); SB/M: plus the two
    color counts; SG: plus black minus white only (R8 consumes one of each).
    """
    perm = underlying_permutation(w)
    exp = w.crossing_exponent_sum()
    calculus = Calculus(calculus)
    if calculus == Calculus.B:
        return (perm, exp)
    b, wh = w.color_count(BLACK), w.color_count(WHITE)
    if calculus == Calculus.SG:
        return (perm, exp, b - wh)
    return (perm, exp, b, wh)


@dataclass(frozen=True)
class SearchBudget:
    """Node and length caps; ``max_length`` defaults to input length + slack."""

    max_nodes: int = 200_000
    max_length: int | None = None
    slack: int = 2

    def cap_for(self, *ws: BraidWord) -> int:
        base = max((len(w) for w in ws), default=0)
        if self.max_length is None:
            return base + self.slack
        return max(self.max_length, base)


@dataclass(frozen=True)
class BudgetUsage:
    nodes: int
    cap: int
    truncated: bool


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: str
    witness: Chain | None
    budget_used: BudgetUsage
    reason: str

    @property
    def is_equal(self) -> bool:
        return self.status == EQUAL


@dataclass
class _Component:
    """A complete rewrite component at some length cap, rooted for witness recovery."""

    root: str
    words: dict[str, BraidWord]
    parents: dict[str, tuple[str, Step] | None]

    def chain_from_root(self, text: str) -> Chain:
        steps: list[Step] = []
        while True:
            entry = self.parents[text]
            if entry is None:
                break
            text, step = entry
            steps.append(step)
        return tuple(reversed(steps))

    def chain_between(self, u_text: str, v_text: str) -> Chain:
        return invert_chain(self.chain_from_root(u_text)) + self.chain_from_root(v_text)


class ClosureCache:
    """
    Remembers complete components keyed by (system, cap, member).  Only fully
    exhausted components are stored, so hits can never flip a verdict that a
    fresh search with the same budget would reach.
    """

    def __init__(self):
        self._components: dict[tuple[int, int, str], _Component] = {}
        self._systems: dict[int, RelationSystem] = {}  # keeps ids stable
        self.hits = 0
        self.misses = 0

    def get(self, system: RelationSystem, cap: int, text: str) -> _Component | None:
        comp = self._components.get((id(system), cap, text))
        if comp is None:
            self.misses += 1
        else:
            self.hits += 1
        return comp

    def store(self, system: RelationSystem, cap: int, comp: _Component) -> None:
        self._systems[id(system)] = system
        for text in comp.words:
            self._components[(id(system), cap, text)] = comp


def _search_side(visited, words, frontier, other_visited, system, cap):
    """Expand one BFS layer of one side; returns a meeting text or None."""
    new_frontier: list[str] = []
    meet = None
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
            if rt in other_visited:
                meet = rt
                break
        if meet is not None:
            break
    return new_frontier, meet


def bfs_equal(
    u: BraidWord,
    v: BraidWord,
    system: RelationSystem,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
) -> EquivalenceVerdict:
    """
    Bidirectional breadth-first search for a rewrite chain from u to v.
    ``equal`` always carries a replayable witness; ``distinct`` is sound for
    the reported length cap (a full component was exhausted, or a conserved
    invariant separates the words).
    """
    if u.strands != v.strands:
        raise StrandMismatchError(f"cannot compare words on {u.strands} and {v.strands} strands")
    check_alphabet(u, system.calculus)
    check_alphabet(v, system.calculus)
    budget = budget or SearchBudget()
    cap = budget.cap_for(u, v)
    ut, vt = u.text(), v.text()
    if ut == vt:
        return EquivalenceVerdict(EQUAL, (), BudgetUsage(0, cap, False), "identical words")
    if invariant_signature(u, system.calculus) != invariant_signature(v, system.calculus):
        return EquivalenceVerdict(DISTINCT, None, BudgetUsage(0, cap, False), "invariant mismatch")
    if cache is not None:
        comp = cache.get(system, cap, ut)
        if comp is not None:
            if vt in comp.words:
                return EquivalenceVerdict(EQUAL, comp.chain_between(ut, vt), BudgetUsage(0, cap, False), "witness found")
            return EquivalenceVerdict(DISTINCT, None, BudgetUsage(0, cap, False), "component exhausted")

    sides = {
        "u": ({ut: None}, {ut: u}, [ut]),
        "v": ({vt: None}, {vt: v}, [vt]),
    }
    nodes = 0
    while True:
        open_sides = [name for name in ("u", "v") if sides[name][2]]
        name = min(open_sides, key=lambda s: (len(sides[s][2]), s))
        visited, words, frontier = sides[name]
        other_visited = sides["v" if name == "u" else "u"][0]
        if nodes + len(frontier) > budget.max_nodes:
            return EquivalenceVerdict(INCONCLUSIVE, None, BudgetUsage(nodes, cap, True), "node budget exhausted")
        nodes += len(frontier)
        new_frontier, meet = _search_side(visited, words, frontier, other_visited, system, cap)
        sides[name] = (visited, words, new_frontier)
        if meet is not None:
            u_vis = sides["u"][0]
            v_vis = sides["v"][0]
            comp_u = _Component(ut, sides["u"][1], u_vis)
            comp_v = _Component(vt, sides["v"][1], v_vis)
            witness = comp_u.chain_from_root(meet) + invert_chain(comp_v.chain_from_root(meet))
            return EquivalenceVerdict(EQUAL, witness, BudgetUsage(nodes, cap, False), "witness found")
        if not new_frontier:
            # this side's component is complete below the cap; the other word
            # was never met, so it lies outside
            comp = _Component(ut if name == "u" else vt, sides[name][1], sides[name][0])
            if cache is not None:
                cache.store(system, cap, comp)
            return EquivalenceVerdict(DISTINCT, None, BudgetUsage(nodes, cap, False), "component exhausted")


@dataclass(frozen=True)
class ClosureResult:
    words: tuple[BraidWord, ...]
    truncated: bool
    nodes_expanded: int
    cap: int


def closure(
    u: BraidWord,
    system: RelationSystem,
    budget: SearchBudget | None = None,
    cache: ClosureCache | None = None,
    length_preserving_only: bool = False,
) -> ClosureResult:
    """
    Breadth-first closed set of words reachable from u within budget, sorted
    by (length, text).  A truncated result means the node budget ran out.
    """
    check_alphabet(u, system.calculus)
    if length_preserving_only:
        system = length_preserving_system(system)
    budget = budget or SearchBudget()
    cap = budget.cap_for(u)
    ut = u.text()
    if cache is not None:
        comp = cache.get(system, cap, ut)
        if comp is not None:
            ordered = sorted(comp.words.values(), key=lambda w: (len(w), w.text()))
            return ClosureResult(tuple(ordered), False, 0, cap)
    visited: dict[str, tuple[str, Step] | None] = {ut: None}
    words: dict[str, BraidWord] = {ut: u}
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
    if not truncated and cache is not None:
        cache.store(system, cap, _Component(ut, words, visited))
    ordered = sorted(words.values(), key=lambda w: (len(w), w.text()))
    return ClosureResult(tuple(ordered), truncated, nodes, cap)


def to_rules_text(system: RelationSystem) -> str:
    """Plain-text rules file: header plus one ``name: lhs <-> rhs`` line per rule."""
    lines = [f"# calculus={system.calculus.value} strands={system.strands} variant={system.variant}"]
    for r in system.rules:
        lhs = " ".join(g.token for g in r.left) or "e"
        rhs = " ".join(g.token for g in r.right) or "e"
        lines.append(f"{r.name}: {lhs} <-> {rhs}")
    return "\n".join(lines) + "\n"


def from_rules_text(text: str) -> RelationSystem:
    """Rebuild a relation system from its rules-file serialization."""
    from .words import parse_word

    header: dict[str, str] = {}
    rules: list[RewriteRule] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for part in line[1:].split():
                if "=" in part:
                    k, _, val = part.partition("=")
                    header[k] = val
            continue
        name, _, body = line.partition(":")
        lhs, _, rhs = body.partition("<->")
        n = int(header["strands"])
        left = parse_word(lhs.strip() or "e", n)
        right = parse_word(rhs.strip() or "e", n)
        db = left.color_count(BLACK) - right.color_count(BLACK)
        dw = left.color_count(WHITE) - right.color_count(WHITE)
        rules.append(RewriteRule(name.strip(), left.letters, right.letters, cancellation=bool(db or dw)))
    system = RelationSystem(
        Calculus(header["calculus"]),
        int(header["strands"]),
        header.get("variant", "loaded"),
        tuple(rules),
    )
    for r in system.rules:
        _validate_rule(r, system.strands)
    return system
