"""
singbraid: a workbench for singular braid calculi on the disk.

Words over classical and singular generators, the relation systems of the
four calculi (B, SB, M, SG), budget-bounded rewrite search, left-weighted
normal forms for classical braids, desingularization into the group algebra,
opposite-pair reduction with local-confluence checks, and desk-scale
embedding experiments.  A FastAPI service wraps the package; the CLI is a
thin client of the service.
"""

from .words import (
    BLACK,
    WHITE,
    AlphabetError,
    BraidError,
    BraidWord,
    Calculus,
    Generator,
    LetterPositionError,
    ParseError,
    StrandMismatchError,
    alphabet_letters,
    check_alphabet,
    concat,
    empty_word,
    parse_word,
    recolor,
    resolve,
    sigma,
    tau,
    underlying_permutation,
    upsilon,
)
from .rewrite import (
    DISTINCT,
    EQUAL,
    INCONCLUSIVE,
    ClosureCache,
    EquivalenceVerdict,
    RelationSystem,
    RewriteRule,
    SearchBudget,
    Step,
    applicable_moves,
    bfs_equal,
    closure,
    from_rules_text,
    invariant_signature,
    relation_system,
    replay_chain,
    to_rules_text,
    track_position,
)
from .garside import NormalForm, equal_B, normal_form
from .desingular import FormalSum, eta, eta2, oracle_equal_SB
from .diamond import (
    DiamondOutcome,
    DiamondViolation,
    EmbeddingViolation,
    Move,
    ReductionTrace,
    diamond_check,
    find_opposite_pairs,
    injectivity_experiment,
    reduce_irreducible,
    sg_equal,
)

__version__ = "0.1.0"
