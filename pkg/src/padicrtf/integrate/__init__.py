"""Enumeration core: Hermite-form coset representatives, stabilizer-torus
quotient weights, certified finite windows, and the orbital integral engines."""

from .hnf import CosetRep, divisor_profile, double_coset_reps, enum_cosets, hnf_key, hnf_rep
from .windows import CertificationError, EnumerationWindow
from .torus import PairEmbedding, Torus
from .engines import (
    ConjCondition,
    EnumStats,
    GFunc,
    HeckeTilde,
    OrbitalResult,
    UnitTilde,
    enum_pruned,
    four_torus_integral,
    gfunc_central_shift,
    gfunc_of_unit,
    offen_representative,
    orbital_g_at,
    orbital_g_canonical,
    orbital_split,
    orbital_sprime_at,
    orbital_sprime_canonical,
    period_offen,
    split_kappa_g,
    tilde_of_hecke,
    tilde_of_unit,
    twisted_conj_integral,
)

__all__ = [
    "CosetRep",
    "divisor_profile",
    "double_coset_reps",
    "enum_cosets",
    "hnf_key",
    "hnf_rep",
    "CertificationError",
    "EnumerationWindow",
    "PairEmbedding",
    "Torus",
    "ConjCondition",
    "EnumStats",
    "GFunc",
    "HeckeTilde",
    "OrbitalResult",
    "UnitTilde",
    "enum_pruned",
    "four_torus_integral",
    "gfunc_central_shift",
    "gfunc_of_unit",
    "offen_representative",
    "orbital_g_at",
    "orbital_g_canonical",
    "orbital_split",
    "orbital_sprime_at",
    "orbital_sprime_canonical",
    "period_offen",
    "split_kappa_g",
    "tilde_of_hecke",
    "tilde_of_unit",
    "twisted_conj_integral",
]
