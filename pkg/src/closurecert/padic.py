"""Base-p digit arithmetic, the shifted digit-sum function tau, and exact
p-adic valuations of integers, rationals, factorials and binomials.

All quantities are exact: tau values carry the denominator ``p - 1``
explicitly and every comparison happens on :class:`fractions.Fraction`.
The valuation of zero is ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

INF = math.inf

Valuation = Union[int, Fraction, float]  # float only ever for INF


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeBase:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"not a prime: {self.p!r}")

    def __int__(self) -> int:
        return self.p


def _prime(p) -> int:
    if isinstance(p, PrimeBase):
        return p.p
    if not is_prime(p):
        raise ValueError(f"not a prime: {p!r}")
    return p


@dataclass(frozen=True)
class DigitVector:
    """Base-p digits, least significant first; zero is the empty tuple."""

    digits: tuple[int, ...]
    p: int

    def __post_init__(self):
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError("digit out of range")
        if self.digits and self.digits[-1] == 0:
            raise ValueError("non-canonical digit vector (trailing zero)")

    def value(self) -> int:
        return sum(d * self.p**k for k, d in enumerate(self.digits))

    def digit(self, k: int) -> int:
        return self.digits[k] if k < len(self.digits) else 0

    def digit_sum(self) -> int:
        return sum(self.digits)

    def __len__(self) -> int:
        return len(self.digits)


def digits_base_p(n: int, p) -> DigitVector:
    p = _prime(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    while n:
        n, r = divmod(n, p)
        out.append(r)
    return DigitVector(tuple(out), p)


@dataclass(frozen=True, order=False)
class Tau:
    """tau(n) = (digit sum of n - 1 in base p) / (p - 1).

    ``numerator`` is the integer digit sum (tau-bar); the denominator is
    always ``p - 1``.
    """

    numerator: int
    p: int

    @property
    def denominator(self) -> int:
        return self.p - 1

    @property
    def bar(self) -> int:
        return self.numerator

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.p - 1)

    def __eq__(self, other):
        if isinstance(other, Tau):
            # cross-multiplication keeps the comparison exact across primes
            return self.numerator * (other.p - 1) == other.numerator * (self.p - 1)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


@lru_cache(maxsize=None)
def _tau_bar(n: int, p: int) -> int:
    return digits_base_p(n - 1, p).digit_sum()


def tau(n: int, p) -> Tau:
    p = _prime(p)
    if n < 1:
        raise ValueError("tau is defined for n >= 1")
    return Tau(_tau_bar(n, p), p)


def tau_value(n: int, p: int) -> Fraction:
    """Shorthand for ``tau(n, p).value``."""
    if n < 1:
        raise ValueError("tau is defined for n >= 1")
    return Fraction(_tau_bar(n, p), p - 1)


def sigma(m: int, p) -> Tau:
    """Unshifted variant: sigma(m) = tau(m + 1), i.e. digit sum of m over p - 1."""
    if m < 0:
        raise ValueError("sigma is defined for m >= 0")
    return tau(m + 1, p)


def vp_int(n: int, p: int) -> Valuation:
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(q, p: int) -> Valuation:
    """Exact p-adic valuation of an integer or rational; +inf for zero."""
    q = Fraction(q)
    if q == 0:
        return INF
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def legendre_factorial_valuation(n: int, p) -> int:
    """v_p(n!) by Legendre's formula sum_k floor(n / p^k)."""
    p = _prime(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    total, pk = 0, p
    while pk <= n:
        total += n // pk
        pk *= p
    return total


def binomial_valuation_digitwise(i: int, j: int, p) -> int:
    """v_p(C(i + j, i)) as the number of digit positions where the digits of
    ``i`` and ``j`` add up to more than the digit of ``i + j``."""
    p = _prime(p)
    if i < 0 or j < 0:
        raise ValueError("i, j must be nonnegative")
    a, b, c = _digits(i, p), _digits(j, p), _digits(i + j, p)
    width = len(c)
    a, b = a + (0,) * (width - len(a)), b + (0,) * (width - len(b))
    return sum(1 for da, db, dc in zip(a, b, c) if da + db > dc)


@lru_cache(maxsize=1 << 14)
def _digits(n: int, p: int) -> tuple:
    return digits_base_p(n, p).digits


def binomial_valuation(n: int, k: int, p) -> Valuation:
    """v_p(C(n, k)) for 0 <= k <= n; +inf when the binomial vanishes."""
    if k < 0 or k > n:
        return INF
    return binomial_valuation_digitwise(k, n - k, p)


# ---------------------------------------------------------------------------
# tau identities and inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    variant: str
    params: dict
    lhs: Valuation
    rhs: Fraction
    rhs_integral: bool
    equal: bool

    @property
    def ok(self) -> bool:
        return self.equal and self.rhs_integral


def _tau_rhs(variant: str, i: int, j: int, L: int, p: int, tau_fn=tau_value) -> Fraction:
    if variant in ("a", "b"):
        return tau_fn(j, p) + tau_fn(i - j + 1, p) - tau_fn(i, p)
    return L + tau_fn(i + 1, p) - tau_fn(i, p) - tau_fn(2, p)


def check_binomial_tau_identity(variant: str, i: int, j: int = 0, L: int = 0, p=2, tau_fn=tau_value) -> IdentityReport:
    """Compare v_p of the binomial in variant a, b or c with its tau expression.

    (a) C(i-1, j-1); (b) C(p^L - j, i - j); (c) C(p^L, i).
    ``tau_fn`` exists so tests can inject a faulty tau.
    """
    p = _prime(p)
    if variant in ("a", "b"):
        if not (0 < j < i):
            raise ValueError("need 0 < j < i")
        if variant == "b" and not i < p**L:
            raise ValueError("need i < p^L")
        if variant == "a" and L and not i < p**L:
            raise ValueError("need i < p^L")
    elif variant == "c":
        if not 0 < i < p**L:
            raise ValueError("need 0 < i < p^L")
    else:
        raise ValueError(f"unknown variant {variant!r}")

    if variant == "a":
        lhs = binomial_valuation(i - 1, j - 1, p)
    elif variant == "b":
        lhs = binomial_valuation(p**L - j, i - j, p)
    else:
        lhs = binomial_valuation(p**L, i, p)
    rhs = _tau_rhs(variant, i, j, L, p, tau_fn)
    return IdentityReport(
        variant=variant,
        params={"i": i, "j": j, "L": L, "p": p},
        lhs=lhs,
        rhs=rhs,
        rhs_integral=rhs.denominator == 1,
        equal=lhs == rhs,
    )


@dataclass
class InequalityReport:
    params: dict
    checked: int = 0
    violations: list = None

    def __post_init__(self):
        if self.violations is None:
            self.violations = []

    @property
    def ok(self) -> bool:
        return not self.violations


def check_tau_budget(K: int, i_max: int | None = None, p=2) -> InequalityReport:
    """Check i / p^(K+1) + K - tau(i) >= 0 for 1 <= i <= i_max.

    ``i_max`` defaults to p^(K+4).
    """
    p = _prime(p)
    if K < -1:
        raise ValueError("K must be >= -1")
    if i_max is None:
        i_max = p ** (K + 4)
    if i_max < 1:
        raise ValueError("i_max must be positive")
    e = Fraction(1, p ** (K + 1))
    rep = InequalityReport(params={"K": K, "i_max": i_max, "p": p})
    for i in range(1, i_max + 1):
        margin = e * i + K - tau_value(i, p)
        rep.checked += 1
        if margin < 0:
            rep.violations.append({"i": i, "margin": margin})
    return rep


@dataclass
class ExponentLedger:
    K: int
    p: int
    rows: list  # (i, valuation, threshold, margin, ok)

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.rows)


def check_root_scaling_exponents(K: int, n: int, a_valuations, p=2) -> ExponentLedger:
    """Exponent bookkeeping for scaling a root by p^e, e = 1/p^(K+1).

    ``a_valuations[i - 1]`` is the valuation of the i-th coefficient. For each
    i the hypothesis v(a_i) >= K - tau(i) must imply v(a_i) + e*i >= 0; the
    margin reported is v(a_i) + e*i. Zero coefficients (valuation inf) pass.
    """
    p = _prime(p)
    if len(a_valuations) != n:
        raise ValueError("need one valuation per coefficient a_1..a_n")
    e = Fraction(1, p ** (K + 1))
    rows = []
    for i, v in enumerate(a_valuations, start=1):
        threshold = K - tau_value(i, p)
        if v == INF:
            rows.append({"i": i, "valuation": INF, "threshold": threshold, "margin": INF, "ok": True})
            continue
        v = Fraction(v)
        margin = v + e * i
        hyp = v >= threshold
        # under the hypothesis the margin can never be negative
        rows.append({"i": i, "valuation": v, "threshold": threshold, "margin": margin,
                     "hypothesis": hyp, "ok": hyp and margin >= 0})
    return ExponentLedger(K=K, p=p, rows=rows)
