"""Bounded-degree ideal membership over Z_(p) (optionally Z_(p)[s], s^(p-1) = p).

Given a target and generators, look for multipliers f_m with coefficients in
the valuation ring and degree at most ``degree_bound`` such that
``target == sum f_m * g_m`` after applying ``substitution`` (the model ring's
z -> (c*x + d*y)/p^N). The search is a single :class:`DVRSystem` over the
monomial basis; a returned witness is always exact, a ``None`` only means no
witness exists within the bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dvr import DVRSystem, Solution, dvr_solve
from .poly import Polynomial, mono_degree, mono_mul, monomials_up_to

ROOT = "s"


@dataclass
class MembershipWitness:
    multipliers: list  # one Polynomial per generator, over the ring variables
    degree_bound: int

    def combine(self, generators: Sequence[Polynomial]) -> Polynomial:
        out = Polynomial()
        for f, g in zip(self.multipliers, generators):
            out = out + f * g
        return out


def default_degree_bound(target: Polynomial, generators: Sequence[Polynomial], weights=None) -> int:
    gmax = max((g.total_degree(weights) for g in generators), default=0)
    return max(target.total_degree(weights), 0) + max(gmax, 0) + 2


def bounded_ideal_member(
    target: Polynomial,
    generators: Sequence[Polynomial],
    p: int,
    degree_bound: int | None = None,
    *,
    ring_vars: Sequence[str] = ("x", "y"),
    substitution: Mapping[str, Polynomial] | None = None,
    root: bool = False,
    weights: Mapping[str, int] | None = None,
    escalations: int = 2,
) -> MembershipWitness | None:
    """Search for Z_(p)-integral multipliers expressing ``target`` in the ideal.

    ``root=True`` enlarges the coefficient ring to Z_(p)[s] with s^(p-1) = p
    (each unknown splits into p - 1 rational components). ``weights`` turns on
    graded search: when the substitution and generators are homogeneous for
    those weights, only multiplier monomials of matching degree are used.
    Without an explicit bound the default bound is tried and then doubled
    ``escalations`` times.
    """
    substitution = dict(substitution or {})
    cache: dict = {}
    img_target = target.substitute(substitution, cache)
    if root:
        img_target = img_target.reduce_root(p)
    if img_target.is_zero():
        return MembershipWitness([Polynomial() for _ in generators], degree_bound or 0)
    img_gens = [g.substitute(substitution, cache) for g in generators]
    if root:
        img_gens = [g.reduce_root(p) for g in img_gens]

    graded = weights is not None and _graded_ok(img_gens, substitution, weights)
    if degree_bound is not None:
        bounds = [degree_bound]
    else:
        b0 = default_degree_bound(target, generators, weights if graded else None)
        bounds = [b0 * 2**k for k in range(escalations + 1)]
    for bound in bounds:
        w = _solve_once(img_target, img_gens, p, bound, ring_vars, substitution, cache, root,
                        weights if graded else None)
        if w is not None:
            return w
    return None


def _image_weights():
    return {"x": 1, "y": 1}


def _graded_ok(img_gens, substitution, weights) -> bool:
    iw = _image_weights()
    for v, img in substitution.items():
        comps = img.homogeneous_components({**iw, ROOT: 0})
        if len(comps) > 1 or (comps and next(iter(comps)) != weights.get(v, 1)):
            return False
    return all(g.is_homogeneous({**iw, ROOT: 0}) for g in img_gens)


def _solve_once(img_target, img_gens, p, bound, ring_vars, substitution, cache, root, weights):
    iw = {"x": 1, "y": 1, ROOT: 0}
    target_degrees = set(img_target.homogeneous_components(iw)) if weights else None
    all_monos = monomials_up_to(ring_vars, bound, weights)
    by_degree: dict = {}
    if weights is not None:
        for mu in all_monos:
            by_degree.setdefault(mono_degree(mu, weights), []).append(mu)
    root_powers = range(p - 1) if root and p > 2 else range(1)

    columns = []  # (generator index, monomial, root power, image polynomial)
    for gi, g in enumerate(img_gens):
        if g.is_zero():
            continue
        if weights is not None:
            gdeg = g.total_degree(iw)
            monos = [mu for t in target_degrees for mu in by_degree.get(t - gdeg, ())]
        else:
            monos = all_monos
        for mu in monos:
            mu_img = Polynomial.monomial(mu).substitute(substitution, cache)
            base = mu_img * g
            for r in root_powers:
                col = base.mul_monomial(((ROOT, r),) if r else ())
                if root:
                    col = col.reduce_root(p)
                if col:
                    columns.append((gi, mu, r, col))
    row_index: dict = {}
    sparse_cols = []
    for _, _, _, col in columns:
        entries = {}
        for m, c in col.terms.items():
            entries[row_index.setdefault(m, len(row_index))] = c
        sparse_cols.append(entries)
    for m in img_target.terms:
        row_index.setdefault(m, len(row_index))
    if not columns:
        return None
    rows = [dict() for _ in range(len(row_index))]
    for j, entries in enumerate(sparse_cols):
        for r, c in entries.items():
            rows[r][j] = c
    rhs = [Fraction(0)] * len(row_index)
    for m, c in img_target.terms.items():
        rhs[row_index[m]] = c
    sol = dvr_solve(DVRSystem(rows, rhs, p, ncols=len(columns)))
    if not isinstance(sol, Solution):
        return None
    mults = [dict() for _ in img_gens]
    for (gi, mu, r, _), val in zip(columns, sol.x):
        if val:
            key = mono_mul(mu, ((ROOT, r),) if r else ())
            mults[gi][key] = mults[gi].get(key, 0) + val
    return MembershipWitness([Polynomial(d) for d in mults], bound)
