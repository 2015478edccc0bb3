"""
FastAPI service exposing the workbench operations.

All endpoints are stateless POST handlers over the pure package functions.
Rejected inputs (parse errors, alphabet violations, strand mismatches) map
to 400; a falsified-theorem abort maps to 500 so clients cannot mistake it
for a verdict.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..desingular import FormalSum, eta, eta2
from ..diamond import (
    DiamondOutcome,
    DiamondViolation,
    EmbeddingViolation,
    Move,
    ReductionTrace,
    diamond_check,
    injectivity_experiment,
    reduce_irreducible,
    sg_equal,
)
from ..garside import normal_form
from ..permutations import one_line
from ..rewrite import (
    Chain,
    EquivalenceVerdict,
    SearchBudget,
    bfs_equal,
    closure,
    relation_system,
    to_rules_text,
)
from ..words import BraidError, Calculus, check_alphabet, parse_word, underlying_permutation
from . import schemas


def _budget(fields: schemas.BudgetFields) -> SearchBudget:
    return SearchBudget(max_nodes=fields.max_nodes, max_length=fields.max_len, slack=fields.slack)


def _calculus(tag: str) -> Calculus:
    try:
        return Calculus(tag)
    except ValueError:
        raise BraidError(f"unknown calculus {tag!r}; expected one of B, SB, M, SG")


def _steps(chain: Chain | None) -> list[schemas.StepModel] | None:
    if chain is None:
        return None
    return [schemas.StepModel(rule=s.rule.name, forward=s.forward, position=s.position) for s in chain]


def _move(move: Move | None) -> schemas.MoveModel | None:
    if move is None:
        return None
    return schemas.MoveModel(
        insert=move.insert,
        position=move.position,
        index=move.index,
        order=move.order,
        pre_chain=_steps(move.pre_chain),
    )


def _verdict_response(verdict: EquivalenceVerdict) -> schemas.VerdictResponse:
    return schemas.VerdictResponse(
        status=verdict.status,
        reason=verdict.reason,
        witness=_steps(verdict.witness),
        nodes=verdict.budget_used.nodes,
        cap=verdict.budget_used.cap,
        truncated=verdict.budget_used.truncated,
    )


def _eta_response(s: FormalSum) -> schemas.EtaResponse:
    terms = [
        schemas.EtaTermModel(normal_form=nf.text(), black_degree=deg[0], white_degree=deg[1], coefficient=c)
        for (nf, deg), c in s.terms
    ]
    return schemas.EtaResponse(terms=terms, text=s.text())


def _reduce_response(trace: ReductionTrace) -> schemas.ReduceResponse:
    return schemas.ReduceResponse(
        start=trace.start.text(),
        result=trace.result.text(),
        moves=[_move(m) for m in trace.moves],
        exhaustive=trace.exhaustive,
        cap=trace.cap,
        nodes=trace.nodes,
    )


def _diamond_response(out: DiamondOutcome) -> schemas.DiamondResponse:
    return schemas.DiamondResponse(
        kind=out.kind,
        witness=_steps(out.witness),
        eta_word=out.eta_word.text() if out.eta_word is not None else None,
        alpha_move=_move(out.alpha_move),
        gamma_move=_move(out.gamma_move),
        link=_steps(out.link),
        nodes=out.nodes,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="singbraid", version=__version__)

    @app.exception_handler(BraidError)
    async def braid_error_handler(request: Request, exc: BraidError):
        return JSONResponse(status_code=400, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(DiamondViolation)
    async def diamond_violation_handler(request: Request, exc: DiamondViolation):
        return JSONResponse(status_code=500, content={"error": "DiamondViolation", "detail": str(exc)})

    @app.exception_handler(EmbeddingViolation)
    async def embedding_violation_handler(request: Request, exc: EmbeddingViolation):
        return JSONResponse(status_code=500, content={"error": "EmbeddingViolation", "detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/parse", response_model=schemas.ParseResponse, response_model_by_alias=True)
    def parse(req: schemas.ParseRequest):
        w = parse_word(req.word, req.n)
        if req.calc is not None:
            check_alphabet(w, _calculus(req.calc))
        return schemas.ParseResponse(word=w.text(), n=w.strands, length=len(w), letters=[g.token for g in w.letters])

    @app.post("/v1/perm", response_model=schemas.PermResponse, response_model_by_alias=True)
    def perm(req: schemas.PermRequest):
        w = parse_word(req.word, req.n)
        p = underlying_permutation(w)
        return schemas.PermResponse(permutation=[x + 1 for x in p], one_line=one_line(p))

    @app.post("/v1/nf", response_model=schemas.NormalFormResponse, response_model_by_alias=True)
    def nf(req: schemas.NormalFormRequest):
        w = parse_word(req.word, req.n)
        form = normal_form(w)
        return schemas.NormalFormResponse(
            infimum=form.infimum,
            factors=[[x + 1 for x in f] for f in form.factors],
            canonical_length=form.canonical_length,
            text=form.text(),
        )

    @app.post("/v1/equal", response_model=schemas.VerdictResponse, response_model_by_alias=True)
    def equal(req: schemas.EqualRequest):
        calc = _calculus(req.calc)
        u = parse_word(req.left, req.n)
        v = parse_word(req.right, req.n)
        budget = _budget(req.budget)
        if calc == Calculus.SG:
            verdict = sg_equal(u, v, budget)
        else:
            system = relation_system(calc, req.n)
            verdict = bfs_equal(u, v, system, budget)
        return _verdict_response(verdict)

    @app.post("/v1/eta", response_model=schemas.EtaResponse, response_model_by_alias=True)
    def eta_endpoint(req: schemas.EtaRequest):
        w = parse_word(req.word, req.n)
        return _eta_response(eta2(w) if req.colored else eta(w))

    @app.post("/v1/reduce", response_model=schemas.ReduceResponse, response_model_by_alias=True)
    def reduce(req: schemas.ReduceRequest):
        if req.strategy == "randomized" and req.seed is None:
            raise BraidError("randomized reduction requires a seed")
        w = parse_word(req.word, req.n)
        trace = reduce_irreducible(w, _budget(req.budget), req.strategy, req.seed)
        return _reduce_response(trace)

    @app.post("/v1/diamond", response_model=schemas.DiamondResponse, response_model_by_alias=True)
    def diamond(req: schemas.DiamondRequest):
        alpha = parse_word(req.alpha, req.n)
        beta = parse_word(req.beta, req.n)
        gamma = parse_word(req.gamma, req.n)
        out = diamond_check(alpha, beta, gamma, _budget(req.budget))
        return _diamond_response(out)

    @app.post("/v1/inject")
    def inject(req: schemas.InjectRequest):
        return injectivity_experiment(req.n, req.max_len, _budget(req.budget), jobs=req.jobs)

    @app.post("/v1/closure", response_model=schemas.ClosureResponse, response_model_by_alias=True)
    def closure_endpoint(req: schemas.ClosureRequest):
        calc = _calculus(req.calc)
        w = parse_word(req.word, req.n)
        system = relation_system(calc, req.n)
        result = closure(w, system, _budget(req.budget), length_preserving_only=req.length_preserving_only)
        return schemas.ClosureResponse(
            words=[x.text() for x in result.words],
            truncated=result.truncated,
            nodes_expanded=result.nodes_expanded,
            cap=result.cap,
        )

    @app.get("/v1/rules", response_class=PlainTextResponse)
    def rules(calc: str, n: int, variant: str = "default"):
        system = relation_system(_calculus(calc), n, variant)
        return to_rules_text(system)

    return app


app = create_app()
