"""Patchworking polynomial, rescaled coordinates, and exact exponent identities.

The family f_t(w) = sum over lattice points m of t^(-v(m)) w^m is evaluated in
log coordinates w_i = exp(x_i log t + i theta_i) with the dominant term
factored out, so the scaled value is always bounded by the term count.

Every identity here is certified exactly over the integers: the rescaled
coordinate attached to a lattice point m is Z_m = t^(-v(m)) w^m, and any
monomial w^m expands over the 4 coordinates of a unimodular cell with integer
exponents.  Floats never enter the certification paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lattice
from .errors import CertificationError, DomainError, LemmaViolationError, NumericError
from .lattice import Point3
from .subdivision import LiftLike, RegularSubdivision, resolve_lift, solve_exact


@dataclass(frozen=True)
class PatchworkPolynomial:
    d: int
    terms: tuple[tuple[Point3, int], ...]  # (m, v(m)); coefficient is 1, sign encoded in theta

    def __len__(self) -> int:
        return len(self.terms)


def build_patchwork(d: int, lift: LiftLike = None) -> PatchworkPolynomial:
    if d < 1:
        raise DomainError(f"degree must be >= 1, got {d}")
    fn, _ = resolve_lift(lift)
    return PatchworkPolynomial(
        d, tuple((m, int(fn(m))) for m, _ in lattice.enumerate_delta(d))
    )


def eval_patchwork(
    p: PatchworkPolynomial,
    t: float,
    x: Sequence[float],
    theta: Sequence[float],
) -> tuple[complex, float]:
    """Scaled value f_t(w) * t^(-L) at w_i = exp(x_i log t + i theta_i), plus L.

    L is the largest t-exponent <m,x> - v(m) over all terms; factoring it out
    keeps every summand in [0, 1] in magnitude.
    """
    if not t > 1.0:
        raise DomainError(f"t must exceed 1, got {t}")
    ms = np.array([m for m, _ in p.terms], dtype=float)
    vs = np.array([v for _, v in p.terms], dtype=float)
    exps = ms @ np.asarray(x, dtype=float) - vs
    big = float(exps.max())
    logt = math.log(t)
    phases = ms @ np.asarray(theta, dtype=float)
    val = complex(np.sum(np.exp((exps - big) * logt) * np.exp(1j * phases)))
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise NumericError(f"non-finite scaled value at x={tuple(x)}, t={t}")
    return val, big


def _barycentric(vertices: Sequence[Point3], m: Point3) -> list[Fraction]:
    rows = [
        [Fraction(v[k]) for v in vertices] for k in range(3)
    ] + [[Fraction(1)] * 4]
    rhs = [Fraction(m[0]), Fraction(m[1]), Fraction(m[2]), Fraction(1)]
    return solve_exact(rows, rhs)


def _is_inner_cell(sub: RegularSubdivision, cell_id: int) -> bool:
    return all(lattice.is_interior(v, sub.d) for v in sub.cells[cell_id].vertices)


@dataclass(frozen=True)
class MonomialIdentity:
    cell_id: int
    vertices: tuple[Point3, Point3, Point3, Point3]
    m: Point3
    a: tuple[int, int, int, int]
    exponent: int
    verified: bool


def monomial_identity(
    sub: RegularSubdivision, cell_id: int, m: Point3
) -> MonomialIdentity:
    """Expand w^m over the rescaled coordinates of an inner cell.

    Returns integer exponents a with sum 1 and the t-power, certified by
    substituting the coordinate definitions back in and cancelling exactly.
    """
    if not _is_inner_cell(sub, cell_id):
        raise DomainError(f"cell {cell_id} is not contained in the interior polytope")
    m = tuple(int(c) for c in m)
    if not lattice.in_delta(m, sub.d):
        raise DomainError(f"{m} is not a lattice point of the degree-{sub.d} simplex")
    cell = sub.cells[cell_id]
    coeffs = _barycentric(cell.vertices, m)
    if any(c.denominator != 1 for c in coeffs):
        raise CertificationError(
            f"non-integer expansion {coeffs} for {m} over cell {cell_id}"
        )
    a = tuple(int(c) for c in coeffs)
    exponent = int(cell.support(m))

    # substitution oracle, recomputed from the stored lift values:
    # t^exponent * prod_i (t^(-v(m_i)) w^(m_i))^(a_i) must equal w^m exactly
    v = sub.lift_values
    t_power = exponent - sum(ai * v[vi] for ai, vi in zip(a, cell.vertices))
    recombined = tuple(
        sum(ai * vi[k] for ai, vi in zip(a, cell.vertices)) for k in range(3)
    )
    verified = t_power == 0 and recombined == m and sum(a) == 1
    return MonomialIdentity(cell_id, cell.vertices, m, a, exponent, verified)


@dataclass(frozen=True)
class BoundaryRelation:
    rho: int
    rho_prime: int
    m0: Point3  # vertex of rho away from the shared face
    m4: Point3  # vertex of rho_prime away from the shared face
    shared: tuple[Point3, Point3, Point3]
    eps: tuple[int, int, int]  # aligned with `shared`
    exponent: int
    verified: bool


def boundary_relation(
    sub: RegularSubdivision, rho: int, rho_prime: int
) -> BoundaryRelation:
    """Exchange relation across a shared 2-face: w^(m0+m4) = w^(sum eps_i m_i).

    eps is forced by the lattice geometry; the claimed pattern (two entries 1,
    one entry 0) is checked, and deviation raises rather than being fixed up.
    """
    a = set(sub.cells[rho].vertices)
    b = set(sub.cells[rho_prime].vertices)
    shared = tuple(sorted(a & b))
    if len(shared) != 3:
        raise DomainError(
            f"cells {rho} and {rho_prime} do not share a 2-face"
        )
    (m0,) = a - b
    (m4,) = b - a
    target = tuple(m0[k] + m4[k] for k in range(3))
    rows = [[Fraction(s[k]) for s in shared] for k in range(3)]
    coeffs = solve_exact(rows, [Fraction(c) for c in target])
    if any(c.denominator != 1 for c in coeffs):
        raise LemmaViolationError(
            f"non-integer exchange coefficients {coeffs} across cells {rho},{rho_prime}"
        )
    eps = tuple(int(c) for c in coeffs)
    if sorted(eps) != [0, 1, 1]:
        raise LemmaViolationError(
            f"exchange pattern {eps} is not two ones and a zero"
        )
    exponent = int(sub.cells[rho].support(m4))

    # oracle: -v(m0) == exponent - sum eps_i v(shared_i), exactly
    v = sub.lift_values
    verified = -v[m0] == exponent - sum(e * v[s] for e, s in zip(eps, shared))
    return BoundaryRelation(rho, rho_prime, m0, m4, shared, eps, exponent, verified)


@dataclass(frozen=True)
class ResidualExponent:
    m: Point3
    exponent: int
    cell_id: int  # which cell's affine form produced the exponent
    a: tuple[int, int, int, int]


def residual_exponents(
    sub: RegularSubdivision, cell_id: int, partner_ids: Sequence[int] = ()
) -> list[ResidualExponent]:
    """Exponent l(m') - v(m') for every lattice point m' on the simplex boundary.

    The form l comes from the base cell when possible; a partner cell is used
    when the base expansion puts a negative power on the coordinate opposite
    the shared face (the pole the exchange relation removes).  A partner that
    has m' among its own vertices is skipped: there the monomial is a leading
    term of that chart, not a residual, and the base form already certifies
    decay.  Preference order: base cell first, then partners by ascending id.
    Every exponent must come out strictly negative; anything else raises.
    """
    if sub.d < 5:
        raise DomainError(f"need degree >= 5, got {sub.d}")
    if not _is_inner_cell(sub, cell_id):
        raise DomainError(f"cell {cell_id} is not contained in the interior polytope")
    base = sub.cells[cell_id]
    base_vs = set(base.vertices)
    partners = []
    for pid in sorted(int(p) for p in partner_ids):
        shared = base_vs & set(sub.cells[pid].vertices)
        if len(shared) != 3:
            raise DomainError(f"partner {pid} does not share a 2-face with {cell_id}")
        (off_vertex,) = base_vs - shared
        partners.append((pid, base.vertices.index(off_vertex)))

    out = []
    for m, interior in lattice.enumerate_delta(sub.d):
        if interior or not lattice.facets_containing(m, sub.d):
            continue
        chosen = cell_id
        coeffs = _barycentric(base.vertices, m)
        for pid, off_idx in partners:
            if coeffs[off_idx] >= 0 or m in sub.cells[pid].vertices:
                continue
            chosen = pid
            coeffs = _barycentric(sub.cells[pid].vertices, m)
            break
        if any(c.denominator != 1 for c in coeffs):
            raise CertificationError(f"non-integer expansion for {m}")
        exponent = sub.cells[chosen].support(m) - sub.lift_values[m]
        if exponent >= 0:
            raise LemmaViolationError(
                f"residual exponent {exponent} >= 0 at boundary point {m}"
            )
        out.append(
            ResidualExponent(m, int(exponent), chosen, tuple(int(c) for c in coeffs))
        )
    return out


def identity_certificate(sub: RegularSubdivision, cell_id: int) -> dict:
    """JSON-ready sweep of the monomial identity over every lattice point."""
    entries = []
    for m, _ in lattice.enumerate_delta(sub.d):
        rec = monomial_identity(sub, cell_id, m)
        entries.append(
            {
                "m": [str(c) for c in rec.m],
                "a": [str(c) for c in rec.a],
                "exponent": str(rec.exponent),
                "verified": rec.verified,
            }
        )
    return {
        "schema": 1,
        "d": str(sub.d),
        "cell": str(cell_id),
        "cell_vertices": [[str(c) for c in v] for v in sub.cells[cell_id].vertices],
        "entries": entries,
    }
