import itertools
from collections import deque
from random import Random

import pytest

from singbraid.rewrite import (
    DISTINCT,
    EQUAL,
    INCONCLUSIVE,
    ChainReplayError,
    ClosureCache,
    SearchBudget,
    applicable_moves,
    bfs_equal,
    closure,
    from_rules_text,
    invariant_signature,
    invert_chain,
    length_preserving_system,
    relation_system,
    replay_chain,
    to_rules_text,
    track_position,
)
from singbraid.words import (
    AlphabetError,
    BraidWord,
    Calculus,
    alphabet_letters,
    empty_word,
    parse_word,
)


def W(text, n):
    return parse_word(text, n)


# --- independent oracle: a naive string rewriter over the n=2 two-color rules,
# --- written out by hand, mirrored after the default system
_NAIVE_RULES_M2 = [
    ("s1 S1", ""),
    ("S1 s1", ""),
    ("s1 S1", "S1 s1"),
    ("s1 t1", "t1 s1"),
    ("S1 t1", "t1 S1"),
    ("s1 u1", "u1 s1"),
    ("S1 u1", "u1 S1"),
]


def _naive_neighbors(word_tokens, cap):
    tokens = list(word_tokens)
    out = set()
    for lhs, rhs in _NAIVE_RULES_M2:
        for a, b in ((lhs.split(), rhs.split()), (rhs.split(), lhs.split())):
            for k in range(len(tokens) - len(a) + 1 if a else len(tokens) + 1):
                if tokens[k : k + len(a)] == a:
                    res = tokens[:k] + b + tokens[k + len(a):]
                    if len(res) <= cap:
                        out.add(tuple(res))
    return out


def _naive_component(text, cap):
    start = tuple(text.split()) if text != "e" else ()
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in _naive_neighbors(cur, cap):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return {" ".join(t) if t else "e" for t in seen}


class TestSystems:
    def test_b_system_has_no_singular_rules(self):
        system = relation_system(Calculus.B, 3)
        for rule in system.rules:
            for g in rule.left + rule.right:
                assert g.is_crossing

    def test_sb_system_restricts_m_to_black(self):
        sb = relation_system(Calculus.SB, 4)
        m = relation_system(Calculus.M, 4)
        sb_names = set(sb.rule_index)
        m_black = {r.name for r in m.rules if all(g.is_crossing or g.color == "black" for g in r.left + r.right)}
        assert sb_names == m_black

    def test_sg_adds_exactly_the_two_cancellations_per_index(self):
        m = relation_system(Calculus.M, 3)
        sg = relation_system(Calculus.SG, 3)
        extra = set(sg.rule_index) - set(m.rule_index)
        assert extra == {"R8a[1]", "R8a[2]", "R8b[1]", "R8b[2]"}

    def test_minimal_variant_is_positive_subset(self):
        mini = relation_system(Calculus.M, 3, "minimal")
        full = relation_system(Calculus.M, 3, "default")
        assert set(mini.rule_index) <= set(full.rule_index)
        for rule in mini.rules:
            assert all(g.sign >= 0 for g in rule.left if g.is_crossing) or rule.name.startswith("R1")

    def test_every_rule_preserves_signature(self):
        for calc in Calculus:
            for n in (2, 3, 4):
                system = relation_system(calc, n)
                for rule in system.rules:
                    lw, rw = BraidWord(n, rule.left), BraidWord(n, rule.right)
                    assert invariant_signature(lw, calc) == invariant_signature(rw, calc), rule.name

    def test_default_rules_derivable_from_minimal(self):
        # each signed rule form must already hold in the congruence generated
        # by the positive forms; the all-negative braid relation needs
        # intermediate words three pairs longer than its sides
        for calc in (Calculus.B, Calculus.M, Calculus.SG):
            full = relation_system(calc, 3, "default")
            mini = relation_system(calc, 3, "minimal")
            budget = SearchBudget(max_nodes=500_000, slack=6)
            cache = ClosureCache()
            for rule in full.rules:
                lw, rw = BraidWord(3, rule.left), BraidWord(3, rule.right)
                verdict = bfs_equal(lw, rw, mini, budget, cache)
                assert verdict.is_equal, f"{rule.name} not derivable from the minimal presentation"


class TestApplicableMoves:
    def test_moves_from_empty_word_are_insertions(self):
        system = relation_system(Calculus.B, 2)
        moves = applicable_moves(empty_word(2), system)
        results = {w.text() for _, w in moves}
        assert results == {"s1 S1", "S1 s1"}

    def test_exchange_move_listed(self):
        system = relation_system(Calculus.M, 2)
        moves = applicable_moves(W("s1 t1", 2), system)
        assert any(step.rule.name == "R6[+,b,1]" and step.position == 1 and w.text() == "t1 s1" for step, w in moves)

    def test_cancellation_move_listed_in_sg(self):
        system = relation_system(Calculus.SG, 2)
        moves = applicable_moves(W("t1 u1", 2), system)
        assert any(step.rule.name == "R8a[1]" and step.position == 1 and w.text() == "e" for step, w in moves)

    def test_alphabet_violation_rejected(self):
        system = relation_system(Calculus.SB, 2)
        with pytest.raises(AlphabetError):
            applicable_moves(W("u1", 2), system)

    def test_order_is_by_position_rule_direction(self):
        system = relation_system(Calculus.M, 2)
        moves = applicable_moves(W("s1 t1", 2), system)
        keys = [(step.position, system.rule_index[step.rule.name], not step.forward) for step, _ in moves]
        assert keys == sorted(keys)

    def test_results_differ_by_one_application(self):
        system = relation_system(Calculus.M, 3)
        w = W("t1 s2 u1", 3)
        for step, result in applicable_moves(w, system):
            assert replay_chain(w, (step,)) == result


class TestBfsEqual:
    def test_exchange_is_one_step(self):
        system = relation_system(Calculus.M, 2)
        verdict = bfs_equal(W("s1 t1", 2), W("t1 s1", 2), system)
        assert verdict.is_equal
        assert len(verdict.witness) == 1

    def test_opposite_orders_distinct_in_m_at_cap4(self):
        system = relation_system(Calculus.M, 2)
        verdict = bfs_equal(W("t1 u1", 2), W("u1 t1", 2), system, SearchBudget(max_length=4))
        assert verdict.status == DISTINCT
        assert verdict.budget_used.cap == 4

    def test_opposite_pair_cancels_in_sg(self):
        system = relation_system(Calculus.SG, 2)
        verdict = bfs_equal(W("t1 u1", 2), W("e", 2), system)
        assert verdict.is_equal

    def test_matches_naive_component_oracle(self):
        # dual route: hand-written rewriter on two strands vs the engine
        system = relation_system(Calculus.M, 2)
        for text in ("t1 u1", "s1 t1 u1", "u1 s1", "s1 S1"):
            cap = len(text.split()) + 2
            expected = _naive_component(text, cap)
            got = closure(W(text, 2), system, SearchBudget(max_length=cap))
            assert not got.truncated
            assert {w.text() for w in got.words} == expected

    def test_witnesses_replay(self):
        rng = Random(5)
        system = relation_system(Calculus.M, 3)
        cache = ClosureCache()
        budget = SearchBudget(max_nodes=20_000)
        letters = alphabet_letters(Calculus.M, 3)
        confirmed = 0
        for _ in range(80):
            u = BraidWord(3, tuple(rng.choice(letters) for _ in range(rng.randint(0, 4))))
            chain = []
            cur = u
            for _ in range(rng.randint(0, 3)):
                moves = [mv for mv in applicable_moves(cur, system) if len(mv[1]) <= len(u) + 2]
                if not moves:
                    break
                step, cur = moves[rng.randrange(len(moves))]
                chain.append(step)
            verdict = bfs_equal(u, cur, system, budget, cache)
            assert verdict.is_equal
            assert replay_chain(u, verdict.witness) == cur
            confirmed += 1
        assert confirmed == 80

    def test_symmetry_of_equal(self):
        system = relation_system(Calculus.M, 2)
        budget = SearchBudget(max_nodes=5_000)
        pairs = [("s1 t1 u1", "t1 u1 s1"), ("t1 u1", "u1 t1"), ("s1 S1", "e")]
        for a, b in pairs:
            va = bfs_equal(W(a, 2), W(b, 2), system, budget)
            vb = bfs_equal(W(b, 2), W(a, 2), system, budget)
            assert (va.status == EQUAL) == (vb.status == EQUAL)

    def test_invariant_prefilter_agrees_with_search(self):
        # signature-distinct pairs must never be joined by the rules: check
        # via raw closures, which do not use the pre-filter
        system = relation_system(Calculus.M, 2)
        letters = alphabet_letters(Calculus.M, 2)
        words = [empty_word(2)] + [BraidWord(2, p) for k in (1, 2) for p in itertools.product(letters, repeat=k)]
        budget = SearchBudget(max_nodes=50_000)
        for u in words[:10]:
            comp = closure(u, system, budget)
            assert not comp.truncated
            sig = invariant_signature(u, Calculus.M)
            for v in words:
                if invariant_signature(v, Calculus.M) != sig:
                    assert v.text() not in {w.text() for w in comp.words}

    def test_inconclusive_when_node_budget_tiny(self):
        system = relation_system(Calculus.B, 3)
        u = W("s1 s2 s1 s1 s2 s1", 3)
        v = W("s2 s1 s2 s2 s1 s2", 3)
        verdict = bfs_equal(u, v, system, SearchBudget(max_nodes=1))
        assert verdict.status == INCONCLUSIVE
        assert verdict.budget_used.truncated
        # the same pair resolves as equal with two more expandable nodes
        assert bfs_equal(u, v, system, SearchBudget(max_nodes=3)).is_equal

    def test_distinct_via_invariant_is_immediate(self):
        system = relation_system(Calculus.B, 3)
        verdict = bfs_equal(W("s1", 3), W("s2", 3), system, SearchBudget(max_nodes=1))
        assert verdict.status == DISTINCT
        assert verdict.budget_used.nodes == 0

    def test_strand_mismatch_rejected(self):
        system = relation_system(Calculus.B, 3)
        from singbraid.words import StrandMismatchError

        with pytest.raises(StrandMismatchError):
            bfs_equal(W("s1", 2), W("s1", 3), system)

    def test_cache_does_not_change_verdicts(self):
        system = relation_system(Calculus.M, 2)
        budget = SearchBudget(max_nodes=10_000)
        cache = ClosureCache()
        pairs = [("t1 u1", "u1 t1"), ("s1 t1", "t1 s1"), ("t1 u1", "s1 S1")]
        fresh = [bfs_equal(W(a, 2), W(b, 2), system, budget).status for a, b in pairs]
        warm1 = [bfs_equal(W(a, 2), W(b, 2), system, budget, cache).status for a, b in pairs]
        warm2 = [bfs_equal(W(a, 2), W(b, 2), system, budget, cache).status for a, b in pairs]
        assert fresh == warm1 == warm2
        assert cache.hits > 0


class TestClosure:
    def test_identity_class_contains_insertions(self):
        system = relation_system(Calculus.B, 2)
        result = closure(empty_word(2), system, SearchBudget(max_length=2))
        texts = {w.text() for w in result.words}
        assert texts == {"e", "s1 S1", "S1 s1"}

    def test_braid_relation_closure_length_preserving(self):
        system = relation_system(Calculus.B, 3)
        result = closure(W("s1 s2 s1", 3), system, SearchBudget(max_length=3), length_preserving_only=True)
        assert {w.text() for w in result.words} == {"s1 s2 s1", "s2 s1 s2"}
        assert not result.truncated

    def test_distance_one_singulars_do_not_commute(self):
        system = relation_system(Calculus.SB, 3)
        result = closure(W("t1 t2", 3), system, SearchBudget(max_length=2))
        assert {w.text() for w in result.words} == {"t1 t2"}

    def test_truncation_flagged(self):
        system = relation_system(Calculus.B, 3)
        result = closure(W("s1 s2", 3), system, SearchBudget(max_nodes=3, slack=4))
        assert result.truncated

    def test_deterministic_order(self):
        system = relation_system(Calculus.M, 2)
        a = closure(W("t1 u1", 2), system, SearchBudget(max_length=4))
        b = closure(W("t1 u1", 2), system, SearchBudget(max_length=4))
        assert [w.text() for w in a.words] == [w.text() for w in b.words]


class TestChains:
    def test_invert_chain_round_trip(self):
        system = relation_system(Calculus.M, 2)
        u = W("s1 t1 u1", 2)
        verdict = bfs_equal(u, W("t1 u1 s1", 2), system)
        assert verdict.is_equal
        assert replay_chain(replay_chain(u, verdict.witness), invert_chain(verdict.witness)) == u

    def test_replay_rejects_mismatched_step(self):
        system = relation_system(Calculus.M, 2)
        moves = applicable_moves(W("s1 t1", 2), system)
        step = next(s for s, w in moves if s.rule.name == "R6[+,b,1]")
        with pytest.raises(ChainReplayError):
            replay_chain(W("u1 u1", 2), (step,))

    def test_track_position_through_exchange(self):
        system = relation_system(Calculus.M, 2)
        u = W("s1 t1", 2)
        step = next(s for s, w in applicable_moves(u, system) if w.text() == "t1 s1")
        w2, p2 = track_position(u, (step,), 2)
        assert w2.text() == "t1 s1" and p2 == 1

    def test_track_position_through_insertion_shift(self):
        system = relation_system(Calculus.M, 2)
        u = W("t1", 2)
        step = next(s for s, w in applicable_moves(u, system) if w.text() == "s1 S1 t1")
        w2, p2 = track_position(u, (step,), 1)
        assert p2 == 3


class TestRulesFile:
    def test_round_trip(self):
        system = relation_system(Calculus.M, 3)
        text = to_rules_text(system)
        loaded = from_rules_text(text)
        assert [r.name for r in loaded.rules] == [r.name for r in system.rules]
        assert [(r.left, r.right) for r in loaded.rules] == [(r.left, r.right) for r in system.rules]
        assert loaded.calculus == Calculus.M and loaded.strands == 3

    def test_loaded_system_searches_identically(self):
        system = relation_system(Calculus.SG, 2)
        loaded = from_rules_text(to_rules_text(system))
        verdict = bfs_equal(W("t1 u1", 2), W("e", 2), loaded)
        assert verdict.is_equal

    def test_header_line(self):
        text = to_rules_text(relation_system(Calculus.SB, 2, "minimal"))
        assert text.splitlines()[0] == "# calculus=SB strands=2 variant=minimal"

    def test_length_preserving_filter(self):
        system = relation_system(Calculus.SG, 2)
        lp = length_preserving_system(system)
        assert all(r.length_preserving for r in lp.rules)
        assert not any(r.name.startswith("R8") or r.name.startswith("R1a") for r in lp.rules)
