"""Thin command-line client for the verification service.

By default requests are answered by an in-process instance of the HTTP
app (no network); --server points the same client at a running instance.
Exit status is 0 exactly when every reported check passed.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from .config import MODES, load_config_file
from .reporting import write_report_files


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rtf",
        description="Exact p-adic orbital-integral verification batteries.",
    )
    sub = ap.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument("--p", type=int, default=3, help="odd prime of the base field")
        sp.add_argument("--u", default="-1", help="non-residue unit defining E = F(sqrt u)")
        sp.add_argument("--eps", default="1", help="splitting datum; odd valuation declares the ramified form")
        sp.add_argument("--count", type=int, default=None, help="battery size")
        sp.add_argument("--seed", type=int, default=1, help="generator seed (runs replay byte-identically)")
        sp.add_argument("--window", type=int, default=None, help="explicit enumeration bound B (divisors in [-B, B])")
        sp.add_argument("--no-certify", dest="certify", action="store_false", help="skip window certification")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for battery items")
        sp.add_argument("--config", help="TOML/JSON config file (flags override)")
        sp.add_argument("--server", help="base URL of a running service (default: in-process)")
        sp.add_argument("--out", default="report.json", help="report path")
        sp.add_argument("--csv", default="summary.csv", help="CSV summary path")

    sp = sub.add_parser("fl", help="unit-element comparison battery on matched orbits")
    common(sp)
    sp.add_argument("--vanishing", type=int, default=0)
    sp.add_argument("--nonmatchable", type=int, default=0)
    sp.add_argument("--n2-split", dest="n2_split", type=int, default=0)
    sp.add_argument("--n2-elliptic", dest="n2_elliptic", type=int, default=0)
    sp.add_argument("--invariance-orbits", dest="invariance_orbits", type=int, default=0)
    sp.add_argument("--invariance-twists", dest="invariance_twists", type=int, default=20)

    sp = sub.add_parser("match", help="invariants and matchability of an orbit")
    common(sp)
    sp.add_argument("--alpha", help="scalar like '1+1i' or JSON matrix of 'a+b*r' strings")
    sp.add_argument("--beta", help="partner on the inner-form side")

    sp = sub.add_parser("orbital", help="one orbital integral with certificate")
    common(sp)
    sp.add_argument("--side", choices=("sprime", "g"), default="sprime")
    sp.add_argument("--alpha")
    sp.add_argument("--beta")
    sp.add_argument("--f", dest="test_function", default="unit", help="'unit' or a dominant vector like '1,0'")

    sp = sub.add_parser("descent", help="parabolic descent battery (2 = 1 + 1)")
    common(sp)

    sp = sub.add_parser("split", help="split-place matching battery")
    common(sp)
    sp.add_argument("--f1", help="dominant vector like '1,0'")
    sp.add_argument("--f2")

    sp = sub.add_parser("hecke", help="Hecke algebra computations and oracle battery")
    common(sp)
    sp.add_argument("hecke_op", nargs="?", default="battery", choices=("battery", "conv", "satake"))
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--lhs", help="dominant vector like '1,0'")
    sp.add_argument("--rhs", help="dominant vector like '1,0'")

    sp = sub.add_parser("involution", help="transpose/dagger identity battery")
    common(sp)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8787)
    return ap


def _vector(text):
    if text is None:
        return None
    return [int(x) for x in str(text).replace("(", "").replace(")", "").split(",") if x != ""]


_DEFAULT_COUNTS = {"fl": 50, "descent": 10, "split": 20, "hecke": 200, "involution": 20, "match": 1, "orbital": 1}


def build_payload(args) -> dict:
    payload = {}
    if args.config:
        payload.update(load_config_file(args.config))
    payload.update(
        {
            "p": args.p,
            "u": str(args.u),
            "eps": str(args.eps),
            "seed": args.seed,
            "certify": args.certify,
            "jobs": args.jobs,
        }
    )
    count = args.count if args.count is not None else payload.get("count", _DEFAULT_COUNTS[args.mode])
    payload["count"] = count
    if args.window is not None:
        payload["window"] = args.window
    for key in (
        "vanishing",
        "nonmatchable",
        "n2_split",
        "n2_elliptic",
        "invariance_orbits",
        "invariance_twists",
        "alpha",
        "beta",
        "side",
        "test_function",
        "hecke_op",
        "m",
    ):
        if hasattr(args, key) and getattr(args, key) is not None:
            payload[key] = getattr(args, key)
    for key in ("f1", "f2", "lhs", "rhs"):
        if getattr(args, key, None) is not None:
            payload[key] = _vector(getattr(args, key))
    if payload.get("test_function") not in (None, "unit"):
        payload["test_function"] = _vector(payload["test_function"])
    return payload


def post(mode: str, payload: dict, server: str = None) -> dict:
    if server:
        resp = httpx.post(f"{server.rstrip('/')}/v1/{mode}", json=payload, timeout=None)
    else:
        from fastapi.testclient import TestClient

        from .service import app

        with TestClient(app) as client:
            resp = client.post(f"/v1/{mode}", json=payload)
    if resp.status_code != 200:
        raise SystemExit(f"service error {resp.status_code}: {resp.text}")
    return resp.json()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "serve":
        import uvicorn

        uvicorn.run("padicrtf.service:app", host=args.host, port=args.port)
        return 0
    payload = build_payload(args)
    report = post(args.mode, payload, args.server)
    write_report_files(report, args.out, args.csv)
    rows = report["results"]
    npass = sum(1 for r in rows if r.get("pass", True))
    for r in rows[:12]:
        rid = r.get("orbit_id", "")
        status = "pass" if r.get("pass", True) else "FAIL"
        extra = r.get("case", r.get("check", ""))
        print(f"{rid:28s} {extra:20s} {status}")
    if len(rows) > 12:
        print(f"... {len(rows) - 12} more rows in {args.out}")
    print(f"{npass}/{len(rows)} checks passed; report: {args.out}, summary: {args.csv}")
    ok = report.get("pass", npass == len(rows))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
