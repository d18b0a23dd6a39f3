"""Relation instances and the model ring they define.

An instance fixes a prime p, exponents N >= 1 and K >= 0, and polynomials
c, d in x, y with Z_(p) coefficients. The model ring is

    R = O[x, y, z] / (p^N z - c x - d y),   O = Z_(p)[s],  s^(p-1) = p,

realized inside S = Q(s)[x, y] by z -> (c x + d y) / p^N. Elements of R are
carried as *lifts*: polynomials in x, y, z, s with rational coefficients.
A lift whose coefficients all have valuation >= t proves the element lies
in p^t R; its *image* is the substituted polynomial in x, y, s.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..membership import MembershipWitness, bounded_ideal_member
from ..padic import is_prime, tau_value
from ..poly import Polynomial, X, Y, min_p_valuation

ROOT = "s"


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class RelationInstance:
    p: int
    N: int
    K: int
    c: Polynomial
    d: Polynomial

    def __post_init__(self):
        if not is_prime(self.p):
            raise InstanceError(f"p = {self.p} is not prime")
        if self.N < 1:
            raise InstanceError("N must be a positive integer")
        if self.K < 0:
            raise InstanceError("K must be nonnegative")
        for name in ("c", "d"):
            f = getattr(self, name)
            if not isinstance(f, Polynomial):
                object.__setattr__(self, name, Polynomial.const(f))
                f = getattr(self, name)
            if f.variables() - {"x", "y"}:
                raise InstanceError(f"{name} must be a polynomial in x, y")
            if min_p_valuation(f, self.p) < 0:
                raise InstanceError(f"{name} must have Z_({self.p}) coefficients")

    @property
    def e(self) -> Fraction:
        return Fraction(1, self.p ** (self.K + 1))

    @property
    def zbar(self) -> Polynomial:
        return (self.c * X + self.d * Y).scale(Fraction(1, self.p**self.N))

    def relation_holds(self) -> bool:
        return (self.zbar.scale(self.p**self.N) - self.c * X - self.d * Y).is_zero()

    def with_K(self, K: int) -> "RelationInstance":
        return RelationInstance(self.p, self.N, K, self.c, self.d)

    def key(self) -> tuple:
        return (self.p, self.N, self.K, str(self.c), str(self.d))

    def __eq__(self, other):
        return isinstance(other, RelationInstance) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        return f"p={self.p} N={self.N} K={self.K} c={self.c} d={self.d}"


@dataclass
class ModelRing:
    """Membership and valuation services for one instance."""

    instance: RelationInstance
    degree_bound: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        inst = self.instance
        self.p = inst.p
        self.root = inst.p > 2
        self.substitution = {"z": inst.zbar}
        self.weights = self._grading()

    def _grading(self):
        c, d = self.instance.c, self.instance.d
        degs = {f.total_degree() for f in (c, d) if not f.is_zero()}
        if len(degs) == 1 and all(f.is_homogeneous() for f in (c, d)):
            return {"x": 1, "y": 1, "z": degs.pop() + 1}
        return None

    # -- scalars ----------------------------------------------------------
    def p_power(self, t) -> Polynomial:
        """p^t for t in (1/(p-1))Z as a lift: p^q s^r with (p-1)t = q(p-1) + r."""
        t = Fraction(t)
        e = t * (self.p - 1)
        if e.denominator != 1:
            raise ArithmeticError(f"p^{t} is not a power of the root s")
        q, r = divmod(int(e), self.p - 1)
        scalar = Fraction(self.p) ** q
        return Polynomial.monomial(((ROOT, r),) if r else (), scalar)

    def tau(self, n: int) -> Fraction:
        return tau_value(n, self.p)

    # -- elements ---------------------------------------------------------
    def normalize(self, lift: Polynomial) -> Polynomial:
        return lift.reduce_root(self.p) if self.root else lift

    def image(self, lift: Polynomial) -> Polynomial:
        img = lift.substitute(self.substitution, self._cache)
        return img.reduce_root(self.p) if self.root else img

    def valuation(self, lift: Polynomial):
        return min_p_valuation(self.normalize(lift), self.p)

    def member(self, target: Polynomial, generators, degree_bound: int | None = None) -> MembershipWitness | None:
        """Witness for target in (generators)R; all inputs are lifts."""
        return bounded_ideal_member(
            target, list(generators), self.p,
            degree_bound if degree_bound is not None else self.degree_bound,
            ring_vars=("x", "y", "z"),
            substitution=self.substitution,
            root=self.root,
            weights=self.weights,
        )

    def least_exponent(self, target: Polynomial, generators, cap: int):
        """Least D in [0, cap] with p^D target in (generators)R, with its witness."""
        for D in range(cap + 1):
            w = self.member(target.scale(self.p**D), generators)
            if w is not None:
                return D, w
        return None, None
