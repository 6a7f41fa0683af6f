"""HTTP service exposing the workbench: measures, disjointness builds, and
reproduction suites.

Errors carry a structured detail ``{"kind": ..., "message": ...}`` where kind
is ``parse``, ``usage``, or ``resource``; clients map these to exit codes.
Every rational in a response is rendered exactly as ``p/q`` text.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import disj as disj_mod
from . import formats, junta
from .boolfn import RealTable, TruthTable, c0_width, c1_width, is_unambiguous_dnf, uc1_width
from .errors import ParseError, PreconditionError, ResourceLimitError
from .reports import ExperimentReport
from .suites import SUITE_NAMES, run_disj, run_suite

app = FastAPI(title="ufa-workbench", version="0.1.0")


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class ReportModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=1, alias="schema")
    experiment: str
    parameters: dict[str, str]
    quantities: dict[str, str]
    checks: list[CheckModel]
    passed: bool

    @classmethod
    def from_report(cls, report: ExperimentReport) -> "ReportModel":
        return cls.model_validate(report.to_dict())


class MeasureRequest(BaseModel):
    content: str
    c1: bool = False
    c0: bool = False
    uc1: bool = False
    degplus: int | None = None
    eps: str | None = None


class MeasureResponse(BaseModel):
    kind: str
    quantities: dict[str, str]


class DisjRequest(BaseModel):
    n: int
    k: int
    seed: int = 0
    verify: bool = False


class DisjResponse(BaseModel):
    report: ReportModel
    a1: str
    a2: str
    family: str


class ReproRequest(BaseModel):
    suite: str
    seed: int = 0


class ReproResponse(BaseModel):
    report: ReportModel
    passed: bool


def _error(kind: str, exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail={"kind": kind, "message": str(exc)})


def _parse_measure_input(content: str):
    head = content.split(None, 1)[0] if content.split() else ""
    if head == "tt":
        f = formats.parse_truth_table(content)
        return "tt", f, {}
    if head == "dnf":
        d = formats.parse_dnf(content)
        extra = {
            "width": str(d.width),
            "unambiguous": str(is_unambiguous_dnf(d)).lower(),
        }
        return "dnf", d.truth_table(), extra
    if head == "junta":
        h = formats.parse_junta(content)
        return "junta", h, {"degree": str(h.degree)}
    raise ParseError(f"unrecognized input header {head!r}", "line 1")


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/v1/measure", response_model=MeasureResponse)
def measure(req: MeasureRequest) -> MeasureResponse:
    try:
        kind, value, quantities = _parse_measure_input(req.content)
        if kind == "junta":
            table = value.table()
        else:
            table = RealTable.from_truth_table(value)
        truth = None
        if all(v in (0, 1) for v in table.values):
            truth = TruthTable(table.arity, tuple(int(v) for v in table.values))
        if req.c1:
            if truth is None:
                raise PreconditionError("C1 is defined for boolean tables only")
            quantities["c1"] = str(c1_width(truth))
        if req.c0:
            if truth is None:
                raise PreconditionError("C0 is defined for boolean tables only")
            quantities["c0"] = str(c0_width(truth))
        if req.uc1:
            if truth is None:
                raise PreconditionError("UC1 is defined for boolean tables only")
            bound = uc1_width(truth)
            quantities["uc1"] = str(bound.value)
            quantities["uc1_exact"] = str(bound.exact).lower()
        if req.degplus is not None:
            res = junta.approx_nonneg_degree_lp(table, req.degplus)
            quantities["epsilon_star"] = formats.format_rational(res.optimum)
            if req.eps is not None:
                eps = formats.parse_rational(req.eps, "eps")
                verdict = res.optimum <= eps
                quantities["degplus_within_eps"] = str(verdict).lower()
        return MeasureResponse(kind=kind, quantities=quantities)
    except ParseError as exc:
        raise _error("parse", exc) from None
    except ResourceLimitError as exc:
        raise _error("resource", exc) from None
    except PreconditionError as exc:
        raise _error("usage", exc) from None


@app.post("/v1/disj", response_model=DisjResponse)
def disj_endpoint(req: DisjRequest) -> DisjResponse:
    try:
        family = disj_mod.sample_separating_sets(req.n, req.k, req.seed)
        a1 = disj_mod.build_disj_nfa(req.n, req.k, family)
        a2 = disj_mod.build_complement_nfa(req.n, req.k)
        if req.verify:
            report = run_disj(seed=req.seed, n=req.n, k=req.k)
        else:
            report = ExperimentReport(
                "disj",
                parameters={"n": req.n, "k": req.k, "seed": req.seed},
                quantities={
                    "ell": str(family.ell),
                    "attempts": str(family.attempts),
                    "a1_states": str(a1.num_states),
                    "a2_states": str(a2.num_states),
                    "binomial": str(len(disj_mod.subsets_colex(req.n, req.k))),
                },
            )
        return DisjResponse(
            report=ReportModel.from_report(report),
            a1=formats.render_nfa(a1),
            a2=formats.render_nfa(a2),
            family=formats.render_family(family),
        )
    except ResourceLimitError as exc:
        raise _error("resource", exc) from None
    except PreconditionError as exc:
        raise _error("usage", exc) from None
    except ValueError as exc:
        raise _error("usage", exc) from None


@app.post("/v1/repro", response_model=ReproResponse)
def repro(req: ReproRequest) -> ReproResponse:
    if req.suite not in SUITE_NAMES:
        raise HTTPException(
            status_code=400,
            detail={
                "kind": "usage",
                "message": f"unknown suite {req.suite!r}; choose from {sorted(SUITE_NAMES)}",
            },
        )
    try:
        report = run_suite(req.suite, seed=req.seed)
    except ResourceLimitError as exc:
        raise _error("resource", exc) from None
    return ReproResponse(report=ReportModel.from_report(report), passed=report.passed)
