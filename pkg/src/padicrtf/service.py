"""HTTP service exposing the verification batteries and single
computations.  Each battery is a self-contained request/response pair; the
CLI is a thin client of this API."""

from __future__ import annotations

from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import MODES, RunConfig, config_from_dict
from .integrate import CertificationError
from .runner import run_config

app = FastAPI(
    title="padicrtf",
    description=(
        "Exact verification of orbital-integral identities over p-adic "
        "fields: orbit matching, unit-element comparisons, parabolic "
        "descent, split-place matching, and Hecke-algebra oracles."
    ),
)


class RunRequest(BaseModel):
    p: int = 3
    u: str = "-1"
    eps: str = "1"
    count: int = 20
    seed: int = 1
    vanishing: int = 0
    nonmatchable: int = 0
    n2_split: int = 0
    n2_elliptic: int = 0
    invariance_orbits: int = 0
    invariance_twists: int = 20
    window: Optional[int] = None
    certify: bool = True
    jobs: int = 1
    alpha: Optional[Union[str, list]] = None
    beta: Optional[Union[str, list]] = None
    side: str = "sprime"
    test_function: Optional[Union[str, list]] = Field(default="unit")
    f1: Optional[Union[str, list]] = None
    f2: Optional[Union[str, list]] = None
    hecke_op: str = "battery"
    m: int = 2
    lhs: Optional[list] = None
    rhs: Optional[list] = None


class RunResponse(BaseModel):
    config: dict
    results: list
    meta: dict
    # overall verdict; the process exit of the CLI mirrors it
    pass_: bool = Field(alias="pass")

    class Config:
        populate_by_name = True


@app.get("/v1/health")
def health():
    return {"status": "ok"}


def _execute(mode: str, req: RunRequest) -> dict:
    payload = req.model_dump(exclude_none=True)
    payload["mode"] = mode
    try:
        cfg = config_from_dict(payload)
        return run_config(cfg)
    except CertificationError as exc:
        raise HTTPException(status_code=422, detail=f"window certification failed: {exc}")
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _make_endpoint(mode: str):
    def endpoint(req: RunRequest) -> RunResponse:
        return RunResponse(**_execute(mode, req))

    endpoint.__name__ = f"run_{mode}"
    return endpoint


for _mode in MODES:
    app.post(f"/v1/{_mode}", response_model=RunResponse)(_make_endpoint(_mode))
