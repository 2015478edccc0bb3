"""Pydantic request/response models for the workbench service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class BudgetFields(BaseModel):
    max_nodes: int = Field(default=200_000, ge=1)
    max_len: int | None = Field(default=None, ge=0)
    slack: int = Field(default=2, ge=0)


class ParseRequest(BaseModel):
    n: int = Field(ge=1)
    word: str
    calc: str | None = None


class ParseResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    word: str
    n: int
    length: int
    letters: list[str]

    model_config = {"populate_by_name": True}


class PermRequest(BaseModel):
    n: int = Field(ge=1)
    word: str


class PermResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    permutation: list[int]
    one_line: str

    model_config = {"populate_by_name": True}


class NormalFormRequest(BaseModel):
    n: int = Field(ge=1)
    word: str


class NormalFormResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    infimum: int
    factors: list[list[int]]
    canonical_length: int
    text: str

    model_config = {"populate_by_name": True}


class EqualRequest(BaseModel):
    calc: str
    n: int = Field(ge=1)
    left: str
    right: str
    budget: BudgetFields = BudgetFields()


class StepModel(BaseModel):
    rule: str
    forward: bool
    position: int


class VerdictResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    status: str
    reason: str
    witness: list[StepModel] | None
    nodes: int
    cap: int
    truncated: bool

    model_config = {"populate_by_name": True}


class EtaRequest(BaseModel):
    n: int = Field(ge=1)
    word: str
    colored: bool = False


class EtaTermModel(BaseModel):
    normal_form: str
    black_degree: int
    white_degree: int
    coefficient: int


class EtaResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    terms: list[EtaTermModel]
    text: str

    model_config = {"populate_by_name": True}


class ReduceRequest(BaseModel):
    n: int = Field(ge=1)
    word: str
    strategy: str = "deterministic"
    seed: int | None = None
    budget: BudgetFields = BudgetFields()


class MoveModel(BaseModel):
    insert: bool
    position: int
    index: int
    order: str
    pre_chain: list[StepModel]


class ReduceResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    start: str
    result: str
    moves: list[MoveModel]
    exhaustive: bool
    cap: int
    nodes: int

    model_config = {"populate_by_name": True}


class DiamondRequest(BaseModel):
    n: int = Field(ge=1)
    alpha: str
    beta: str
    gamma: str
    budget: BudgetFields = BudgetFields()


class DiamondResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    kind: str
    witness: list[StepModel] | None = None
    eta_word: str | None = None
    alpha_move: MoveModel | None = None
    gamma_move: MoveModel | None = None
    link: list[StepModel] | None = None
    nodes: int

    model_config = {"populate_by_name": True}


class InjectRequest(BaseModel):
    n: int = Field(ge=1, le=3)
    max_len: int = Field(ge=0, le=6)
    jobs: int = Field(default=1, ge=1)
    budget: BudgetFields = BudgetFields()


class ClosureRequest(BaseModel):
    calc: str
    n: int = Field(ge=1)
    word: str
    length_preserving_only: bool = False
    budget: BudgetFields = BudgetFields()


class ClosureResponse(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    words: list[str]
    truncated: bool
    nodes_expanded: int
    cap: int

    model_config = {"populate_by_name": True}


class ErrorResponse(BaseModel):
    error: str
    detail: str
