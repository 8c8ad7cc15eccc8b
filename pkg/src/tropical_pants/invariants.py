"""Closed-form invariants of the degree-d surface and their cross-checks.

The Euler characteristic identity used here is 12(1 + p_g) = K^2 + chi.
Some sources print a variant with flipped signs that fails on its own
numbers (at d=5 it would give -41 instead of 55); the form above is the one
consistent with every value table in scope, and the discrepancy is called
out in the package docs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericError
from .lattice import interior_lattice_count


@dataclass(frozen=True)
class SurfaceInvariants:
    d: int
    k_squared: int
    chi: int
    tau: int
    p_g: int
    pants_count: int
    vol_ke_total: float
    yamabe: float


def compute_invariants(d: int) -> SurfaceInvariants:
    """All invariant fields for degree d >= 5.

    The signature comes from (K^2 - 2 chi)/3, which must divide exactly.
    """
    if d < 5:
        raise DomainError(f"invariants need d >= 5, got {d}")
    k2 = d * (d - 4) ** 2
    chi = d**3 - 4 * d**2 + 6 * d
    if (k2 - 2 * chi) % 3 != 0:
        raise NumericError(f"signature (K^2 - 2 chi)/3 is not an integer at d={d}")
    tau = (k2 - 2 * chi) // 3
    return SurfaceInvariants(
        d=d,
        k_squared=k2,
        chi=chi,
        tau=tau,
        p_g=interior_lattice_count(d),
        pants_count=k2,
        vol_ke_total=2.0 * math.pi**2 * k2,
        yamabe=-math.sqrt(32.0 * math.pi**2 * k2),
    )


@dataclass(frozen=True)
class ConsistencyEntry:
    d: int
    noether: bool  # 12(1 + p_g) == K^2 + chi
    pants_signature: bool  # 2 chi + 3 tau == K^2 >= 0
    volume: bool  # pants_count * 2 pi^2 == vol_ke_total
    ok: bool


def consistency_checks(d_range) -> list[ConsistencyEntry]:
    """Identity report over a degree range within [5, 50]; failures are recorded."""
    ds = sorted(set(int(d) for d in d_range))
    if not ds:
        raise DomainError("empty degree range")
    if ds[0] < 5 or ds[-1] > 50:
        raise DomainError(f"range {ds[0]}..{ds[-1]} outside [5, 50]")
    out = []
    for d in ds:
        inv = compute_invariants(d)
        noether = 12 * (1 + inv.p_g) == inv.k_squared + inv.chi
        pants_sig = (2 * inv.chi + 3 * inv.tau == inv.k_squared) and inv.k_squared >= 0
        vol = math.isclose(
            inv.pants_count * 2.0 * math.pi**2, inv.vol_ke_total, rel_tol=1e-12
        )
        out.append(ConsistencyEntry(d, noether, pants_sig, vol, noether and pants_sig and vol))
    return out


def invariants_to_dict(inv: SurfaceInvariants) -> dict:
    from .serialization import fmt_float

    return {
        "d": str(inv.d),
        "K2": str(inv.k_squared),
        "chi": str(inv.chi),
        "tau": str(inv.tau),
        "p_g": str(inv.p_g),
        "pants_count": str(inv.pants_count),
        "vol_KE_total": fmt_float(inv.vol_ke_total),
        "yamabe": fmt_float(inv.yamabe),
    }
