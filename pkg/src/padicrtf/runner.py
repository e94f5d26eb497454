"""Battery dispatch shared by the HTTP service and the CLI."""

from __future__ import annotations

import random

from .config import RunConfig
from .flharness import (
    case_tag,
    descent_battery,
    fl_battery,
    fl_verify,
    hecke_battery,
    invariance_battery,
    involution_battery,
    n2_battery,
    nonmatchable_battery,
    split_match_verify,
    vanishing_battery,
)
from .grpspace import EMatrix
from .hecke import HeckeElement, convolve, hecke_from_json, satake
from .integrate import (
    EnumerationWindow,
    gfunc_of_unit,
    orbital_g_canonical,
    orbital_sprime_canonical,
    tilde_of_hecke,
    tilde_of_unit,
)
from .laurent import serialize_laurent
from .orbits import OrbitG, OrbitSPrime, gen_matched_pair_n1, kappa_g, kappa_sprime, match
from .qfield import FieldSpec
from .reporting import build_report


def _parse_matrix(field: FieldSpec, data) -> EMatrix:
    if isinstance(data, str):
        return EMatrix([[field.parse(data)]])
    return EMatrix([[field.parse(x) for x in row] for row in data])


def _parse_test_function(field: FieldSpec, data, tag: str, m: int):
    if data in (None, "unit"):
        return None
    if isinstance(data, (list, tuple)) and data and isinstance(data[0], int):
        return HeckeElement.basis(tag, tuple(data))
    return hecke_from_json(data, tag, m)


def _run_fl(cfg: RunConfig, field: FieldSpec) -> list:
    rows = []
    if cfg.count:
        rows += _pmap(cfg.jobs, _fl_chunk, _fl_tasks(field, cfg.count, cfg.seed))
    if cfg.vanishing:
        rows += vanishing_battery(field, cfg.vanishing, cfg.seed + 1)
    if cfg.nonmatchable:
        rows += nonmatchable_battery(field, cfg.nonmatchable, cfg.seed + 2)
    if cfg.n2_split or cfg.n2_elliptic:
        rows += n2_battery(field, cfg.n2_split, cfg.n2_elliptic, cfg.seed + 3)
    if cfg.invariance_orbits:
        rows += invariance_battery(field, cfg.invariance_orbits, cfg.invariance_twists, cfg.seed + 4)
    return rows


def _fl_tasks(field: FieldSpec, count: int, seed: int):
    from .orbits import gen_matched_pair_tagged

    rng = random.Random(seed)
    tags = ("vanish_xr_lt_1", "kottwitz_case", "big_valuation_case")
    pairs = [gen_matched_pair_tagged(field, rng, t) for t in tags]
    while len(pairs) < count:
        pairs.append(gen_matched_pair_n1(field, rng))
    return [
        (field, o1, o2, f"fl-p{field.p}-{i:04d}") for i, (o1, o2) in enumerate(pairs[: max(count, 3)])
    ]


def _fl_chunk(task):
    field, o1, o2, rid = task
    return fl_verify(field, o1, o2, orbit_id=rid).to_json()


def _pmap(jobs: int, fn, tasks):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    import multiprocessing as mp

    with mp.get_context("fork").Pool(jobs) as pool:
        return pool.map(fn, tasks)


def _run_match(cfg: RunConfig, field: FieldSpec) -> list:
    alpha = _parse_matrix(field, cfg.alpha) if cfg.alpha is not None else None
    beta = _parse_matrix(field, cfg.beta) if cfg.beta is not None else None
    rows = []
    o1 = OrbitSPrime(field, alpha) if alpha is not None else None
    o2 = OrbitG(field, beta) if beta is not None else None
    row = {"orbit_id": "match-0000", "pass": True}
    if o1 is not None:
        row["sprime"] = o1.to_json()
        row["case"] = case_tag(o1)
        if o1.matchable and o1.witness_beta is None and o1.alpha.n == 1:
            w = _search_beta_witness(field, o1)
            row["beta_witness"] = w.to_json() if w is not None else None
    if o2 is not None:
        row["g"] = o2.to_json()
    if o1 is not None and o2 is not None:
        row["match"] = match(o1, o2)
    rows.append(row)
    return rows


def _search_beta_witness(field: FieldSpec, o1: OrbitSPrime):
    """Bounded search for an exact rational witness beta (may fail even for
    matchable orbits; the report says so honestly)."""
    target = (1 - o1.aabar.inv().rows[0][0].a) / field.eps
    w = None
    num = target.numerator
    den = target.denominator
    for b_den in range(1, 30):
        for b_num in range(-30 * b_den, 30 * b_den + 1):
            from fractions import Fraction

            a2 = target + field.u * Fraction(b_num, b_den) ** 2
            if a2 == 0:
                continue
            r = _exact_sqrt(a2)
            if r is not None:
                return EMatrix([[field.e(r, Fraction(b_num, b_den))]])
    return None


def _exact_sqrt(fr):
    import math
    from fractions import Fraction

    if fr < 0:
        return None
    rn = math.isqrt(fr.numerator)
    rd = math.isqrt(fr.denominator)
    if rn * rn == fr.numerator and rd * rd == fr.denominator:
        return Fraction(rn, rd)
    return None


def _run_orbital(cfg: RunConfig, field: FieldSpec) -> list:
    window = None
    if cfg.window is not None:
        b = int(cfg.window)
        window = EnumerationWindow(-b, b, -b, b)
    if cfg.side == "sprime":
        alpha = _parse_matrix(field, cfg.alpha)
        o = OrbitSPrime(field, alpha)
        f = _parse_test_function(field, cfg.test_function, "E", 2 * alpha.n)
        tilde = tilde_of_unit(field) if f is None else tilde_of_hecke(field, f)
        res = orbital_sprime_canonical(field, alpha, tilde, torus=o.torus, window=window, certify=cfg.certify)
        kap = kappa_sprime(field, o.canonical_point())
    else:
        beta = _parse_matrix(field, cfg.beta if cfg.beta is not None else cfg.alpha)
        o = OrbitG(field, beta)
        if cfg.test_function not in (None, "unit"):
            raise ValueError("the G side supports the unit and central shifts")
        res = orbital_g_canonical(field, beta, gfunc_of_unit(), torus=o.torus, window=window, certify=cfg.certify)
        kap = kappa_g(field, o.canonical_point())
    row = res.to_json()
    row.update(
        {
            "orbit_id": f"orbital-{cfg.side}-0000",
            "pass": bool(res.certified or not cfg.certify),
            "kappa": serialize_laurent(kap),
            "kappa_adjusted_str": str(kap * res.value),
            "orbit": o.to_json(),
        }
    )
    return [row]


def _run_hecke(cfg: RunConfig, field: FieldSpec) -> list:
    if cfg.hecke_op == "battery":
        return hecke_battery(field, cfg.count, cfg.seed)
    if cfg.hecke_op == "conv":
        lhs = HeckeElement.basis("F", tuple(cfg.lhs))
        rhs = HeckeElement.basis("F", tuple(cfg.rhs))
        prod = convolve(field, lhs, rhs)
        sat_ok = satake(field, prod) == (satake(field, lhs) * satake(field, rhs)).reduce_square(
            "t", field.p
        )
        return [
            {
                "orbit_id": "hecke-conv-0000",
                "lhs_str": str(lhs.support()),
                "rhs_str": str(rhs.support()),
                "coefficients": prod.to_json(),
                "satake_cross_check": sat_ok,
                "pass": sat_ok,
            }
        ]
    if cfg.hecke_op == "satake":
        f = HeckeElement.basis("F", tuple(cfg.lhs))
        return [
            {
                "orbit_id": "hecke-satake-0000",
                "satake_str": str(satake(field, f)),
                "pass": True,
            }
        ]
    raise ValueError(f"unknown hecke op {cfg.hecke_op!r}")


def _run_split(cfg: RunConfig, field: FieldSpec) -> list:
    f1 = _parse_test_function(field, cfg.f1, "F", 2) or HeckeElement.basis("F", (1, 0))
    f2 = _parse_test_function(field, cfg.f2, "F", 2) or (
        HeckeElement.basis("F", (1, 1)) + HeckeElement.unit("F", 2).scale(2)
    )
    return split_match_verify(field, f1, f2, cfg.count, cfg.seed)


def run_config(cfg: RunConfig) -> dict:
    field = cfg.field()
    if cfg.mode == "fl":
        rows = _run_fl(cfg, field)
    elif cfg.mode == "match":
        rows = _run_match(cfg, field)
    elif cfg.mode == "orbital":
        rows = _run_orbital(cfg, field)
    elif cfg.mode == "descent":
        rows = descent_battery(field, cfg.count, cfg.seed)
    elif cfg.mode == "split":
        rows = _run_split(cfg, field)
    elif cfg.mode == "hecke":
        rows = _run_hecke(cfg, field)
    elif cfg.mode == "involution":
        rows = involution_battery(field, cfg.count, cfg.seed)
    else:
        raise ValueError(f"unknown mode {cfg.mode!r}")
    return build_report(cfg.to_json(), rows)
