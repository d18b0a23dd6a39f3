"""Coefficient transformations for monic polynomials f(T) = sum a_i T^(n-i).

* root shift: coefficients b_i of g(T) with g(z - x*w) = 0 whenever f(w) = 0;
* coefficient completion: choose a_k so the k-th shifted coefficient lies in y^k;
* degree lift: move a coefficient sequence from degree p^L to p^M;
* index shift: multiply by y^d and move coefficients d places to the right.

Coefficients are :class:`Polynomial` objects over S = Q[x, y] (with the
root-of-p variable ``s`` allowed); the element ``y`` is always the variable
y so that "in y^k S" is the monomial test ``monomial_ideal_member``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Sequence

from .padic import vp
from .poly import Polynomial, T, X, Y, monomial_ideal_member, mono


def _as_poly(a) -> Polynomial:
    return a if isinstance(a, Polynomial) else Polynomial.const(a)


def _coeffs(a: Sequence) -> list:
    out = [_as_poly(c) for c in a]
    if not out or out[0] != Polynomial.const(1):
        raise ValueError("coefficient sequences start with a_0 = 1")
    return out


@dataclass(frozen=True)
class ShiftContext:
    """The pair of parameters x, y and the element z; y must be the variable y."""

    x: Polynomial = X
    y: Polynomial = Y
    z: Polynomial = field(default_factory=Polynomial)

    def __post_init__(self):
        if self.y.is_zero():
            raise ValueError("y must be nonzero")


def y_power(k: int) -> tuple:
    return (mono(y=k),)


def in_y_power(f: Polynomial, k: int) -> bool:
    return monomial_ideal_member(f, y_power(k)) if k > 0 else True


def _powers(f: Polynomial, n: int) -> list:
    out = [Polynomial.const(1)]
    for _ in range(n):
        out.append(out[-1] * f)
    return out


def shifted_sum(a: Sequence, top: int, k: int, x: Polynomial, z: Polynomial,
                zpow=None, xpow=None) -> Polynomial:
    """sum_{j=0}^{k} C(top - j, k - j) a_j z^(k-j) x^j (missing a_j count as 0)."""
    zpow = zpow or _powers(z, k)
    xpow = xpow or _powers(x, k)
    out = Polynomial()
    for j in range(min(k, len(a) - 1) + 1):
        aj = _as_poly(a[j])
        if aj.is_zero():
            continue
        c = comb(top - j, k - j) if top - j >= 0 else _gen_binom(top - j, k - j)
        if c:
            out = out + (aj * zpow[k - j] * xpow[j]).scale(c)
    return out


def _gen_binom(n: int, k: int) -> int:
    # binomial for negative top, only reached by out-of-range callers
    return prod(range(n - k + 1, n + 1)) // prod(range(1, k + 1)) if k >= 0 else 0


# ---------------------------------------------------------------------------
# root shift
# ---------------------------------------------------------------------------


def build_b_coefficients(a: Sequence, ctx: ShiftContext, n: int | None = None) -> list:
    """b_i = (-1)^i sum_{j<=i} C(n-j, i-j) a_j z^(i-j) x^j for i = 0..n."""
    a = _coeffs(a)
    n = len(a) - 1 if n is None else n
    if len(a) != n + 1:
        raise ValueError("need a_0..a_n")
    zpow, xpow = _powers(ctx.z, n), _powers(ctx.x, n)
    return [shifted_sum(a, n, i, ctx.x, ctx.z, zpow, xpow).scale((-1) ** i) for i in range(n + 1)]


def poly_in_T(coeffs: Sequence, n: int) -> Polynomial:
    out = Polynomial()
    for i, c in enumerate(coeffs):
        out = out + _as_poly(c) * Polynomial.var("T", n - i)
    return out


def verify_root_shift_identity(a: Sequence, ctx: ShiftContext, n: int | None = None) -> bool:
    """g(T) == (-1)^n x^n f((z - T)/x), with x^n cleared into the sum."""
    if ctx.x.is_zero():
        raise ValueError("x must be nonzero")
    a = _coeffs(a)
    n = len(a) - 1 if n is None else n
    g = poly_in_T(build_b_coefficients(a, ctx, n), n)
    shift = ctx.z - T
    rhs = Polynomial()
    xp, sp = _powers(ctx.x, n), _powers(shift, n)
    for i, ai in enumerate(a):
        rhs = rhs + ai * xp[i] * sp[n - i]
    return g == rhs.scale((-1) ** n)


# ---------------------------------------------------------------------------
# completion
# ---------------------------------------------------------------------------


def completion_condition(a: Sequence, ctx: ShiftContext, n: int, k: int) -> bool:
    """The k-th condition sum_{j<=k} C(n-j, k-j) a_j z^(k-j) x^j in y^k S."""
    return in_y_power(shifted_sum(a, n, k, ctx.x, ctx.z), k)


def complete_next_coefficient(a: Sequence, x_coeff: Polynomial, n: int,
                              ctx: ShiftContext | None = None) -> Polynomial:
    """Return a_k (k = len(a)) killing the k-th condition for z = x_coeff*x + (...)*y.

    a_k = -sum_{j<k} C(n-j, k-j) a_j x_coeff^(k-j). If ``ctx`` is given the
    k-th condition is checked against the actual z and an ArithmeticError is
    raised if it fails.
    """
    a = _coeffs(a)
    k = len(a)
    if k > n:
        raise ValueError("k > n")
    if x_coeff is None:
        raise ValueError("missing decomposition of z")
    x_coeff = _as_poly(x_coeff)
    apow = _powers(x_coeff, k)
    ak = Polynomial()
    for j in range(k):
        ak = ak - (a[j] * apow[k - j]).scale(comb(n - j, k - j))
    if ctx is not None and not completion_condition(a + [ak], ctx, n, k):
        raise ArithmeticError(f"completion condition {k} fails")
    return ak


# ---------------------------------------------------------------------------
# degree lift
# ---------------------------------------------------------------------------


def lift_factor(j: int, L: int, M: int, p: int) -> Fraction:
    return prod((Fraction(p**M - m, p**L - m) for m in range(j)), start=Fraction(1))


def lift_degree(a: Sequence, L: int, M: int, p: int):
    """Return (a_tilde, q) with a_tilde_j = prod_{m<j} (p^M-m)/(p^L-m) a_j and
    a_tilde_j = p^(M-L) q_j a_j for j >= 1 (q_0 = 1 by convention)."""
    if M <= L:
        raise ValueError("need M > L")
    a = _coeffs(a)
    if len(a) - 1 >= p**L:
        raise ValueError("indices must stay below p^L")
    out, qs = [a[0]], [Fraction(1)]
    for j in range(1, len(a)):
        f = lift_factor(j, L, M, p)
        q = f / p ** (M - L)
        if vp(q, p) != 0:
            raise ArithmeticError(f"q_{j} = {q} is not a unit")
        qs.append(q)
        out.append(a[j].scale(f))
    return out, qs


def verify_lift(a: Sequence, a_tilde: Sequence, L: int, M: int, ctx: ShiftContext,
                k_max: int, p: int) -> bool:
    """For i <= k_max: the degree-p^M sum of a_tilde equals prod_{m<i} (p^M-m)/(p^L-m)
    times the degree-p^L sum of a, and lies in y^i."""
    for i in range(k_max + 1):
        lhs = shifted_sum(a_tilde, p**M, i, ctx.x, ctx.z)
        rhs = shifted_sum(a, p**L, i, ctx.x, ctx.z).scale(lift_factor(i, L, M, p))
        if lhs != rhs or not in_y_power(lhs, i):
            return False
    return True


# ---------------------------------------------------------------------------
# index shift
# ---------------------------------------------------------------------------


def _check_shift_range(d, i, L, M, p, strict=True):
    if strict:
        if not (0 < d < i <= p**L <= p**M):
            raise ValueError("need 0 < d < i <= p^L <= p^M")
    # relaxed form: every factorial in the ratio identity stays defined
    elif not (0 < d < i and i - d <= p**L and i <= p**M and L <= M):
        raise ValueError("need 0 < d < i, i - d <= p^L, i <= p^M, L <= M")


def shift_transform(a: Sequence, d: int, i: int, L: int, M: int, ctx: ShiftContext, p: int,
                    strict: bool = True) -> list:
    """a_tilde_j = 0 for j < d, else y^d C(p^L - j + d, i - j) a_{j-d} / C(p^M - j, i - j),
    for j = 0..i-1.

    ``strict=False`` only requires i - d <= p^L instead of i <= p^L; the
    recursion needs that when an early exponent is small.
    """
    _check_shift_range(d, i, L, M, p, strict)
    a = [_as_poly(c) for c in a]
    if len(a) < i - d:
        raise ValueError("need a_0..a_{i-d-1}")
    yd = ctx.y ** d
    out = []
    for j in range(i):
        if j < d:
            out.append(Polynomial())
            continue
        num = comb(p**L - j + d, i - j)
        den = comb(p**M - j, i - j)
        out.append((yd * a[j - d]).scale(Fraction(num, den)))
    return out


@dataclass
class ShiftReport:
    memberships: dict
    q_values: dict
    q_independent: bool

    @property
    def ok(self) -> bool:
        return self.q_independent and all(self.memberships.values())


def shift_ratio(m: int, k: int, d: int, i: int, L: int, M: int, p: int) -> Fraction:
    """C(p^M-m-d, k-m-d) C(p^L-m, i-m-d) / (C(p^M-m-d, i-m-d) C(p^L-m, k-d-m))."""
    num = comb(p**M - m - d, k - m - d) * comb(p**L - m, i - m - d)
    den = comb(p**M - m - d, i - m - d) * comb(p**L - m, k - d - m)
    return Fraction(num, den)


def verify_shift(a: Sequence, a_tilde: Sequence, d: int, i: int, L: int, M: int,
                 ctx: ShiftContext, p: int, strict: bool = True) -> ShiftReport:
    _check_shift_range(d, i, L, M, p, strict)
    memberships, qs, indep = {}, {}, True
    for k in range(i):
        memberships[k] = in_y_power(shifted_sum(a_tilde, p**M, k, ctx.x, ctx.z), k)
        if k < d:
            continue
        q0 = shift_ratio(0, k, d, i, L, M, p)
        qs[k] = q0
        if any(shift_ratio(m, k, d, i, L, M, p) != q0 for m in range(1, k - d + 1)):
            indep = False
    return ShiftReport(memberships=memberships, q_values=qs, q_independent=indep)
