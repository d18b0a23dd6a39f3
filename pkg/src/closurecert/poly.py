"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted in the
canonical variable order (x, y, z, T, s, then alphabetical); zero exponents
are never stored. A polynomial maps monomials to nonzero Fractions.

The variable ``s`` is reserved by the model ring for a root of p of order
p - 1 (s^(p-1) = p); :meth:`Polynomial.reduce_root` applies that relation and
:func:`min_p_valuation` weights each power of ``s`` by 1/(p-1).
"""
from __future__ import annotations

from functools import lru_cache

from fractions import Fraction
from typing import Iterable, Mapping

from .padic import INF, vp

Monomial = tuple  # tuple[tuple[str, int], ...]

_ORDER = {"x": 0, "y": 1, "z": 2, "T": 3, "s": 4}


def var_key(v: str):
    return (_ORDER.get(v, 99), v)


def mono(**exps: int) -> Monomial:
    return _canon(exps.items())


def _canon(items: Iterable) -> Monomial:
    return tuple(sorted(((v, e) for v, e in items if e), key=lambda t: var_key(t[0])))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return _canon(d.items())


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff monomial ``a`` divides monomial ``b``."""
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    d = dict(b)
    for v, e in a:
        d[v] = d.get(v, 0) - e
        if d[v] < 0:
            raise ArithmeticError("monomial does not divide")
    return _canon(d.items())


def mono_degree(m: Monomial, weights: Mapping[str, int] | None = None) -> int:
    if weights is None:
        return sum(e for _, e in m)
    return sum(weights.get(v, 1) * e for v, e in m)


def mono_exp(m: Monomial, var: str) -> int:
    for v, e in m:
        if v == var:
            return e
    return 0


def monomials_up_to(variables: Iterable[str], bound: int, weights: Mapping[str, int] | None = None):
    """All monomials in ``variables`` of (weighted) degree <= bound, in a
    deterministic order (by degree, then lexicographic)."""
    wkey = tuple(sorted(weights.items())) if weights else None
    return list(_monomials_cached(tuple(sorted(variables, key=var_key)), bound, wkey))


@lru_cache(maxsize=256)
def _monomials_cached(variables: tuple, bound: int, wkey):
    weights = dict(wkey) if wkey else {}
    out = []

    def rec(idx, left, acc):
        if idx == len(variables):
            out.append(_canon(acc))
            return
        v = variables[idx]
        w = weights.get(v, 1)
        for e in range(left // w + 1):
            rec(idx + 1, left - e * w, acc + ([(v, e)] if e else []))

    rec(0, bound, [])
    wts = weights or None
    return tuple(sorted(set(out), key=lambda m: (mono_degree(m, wts), _mono_sort_key(m))))


def _mono_sort_key(m: Monomial):
    return tuple((var_key(v), e) for v, e in m)


class Polynomial:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    t[m] = c
        self.terms: dict = t
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Polynomial":
        return cls({((name, exp),): 1}) if exp else cls.const(1)

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Polynomial":
        return cls({m: c})

    @staticmethod
    def _raw(terms: dict) -> "Polynomial":
        p = Polynomial.__new__(Polynomial)
        p.terms = terms
        p._hash = None
        return p

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def total_degree(self, weights: Mapping[str, int] | None = None) -> int:
        """Degree of the zero polynomial is -1."""
        if not self.terms:
            return -1
        return max(mono_degree(m, weights) for m in self.terms)

    def degree(self, var: str) -> int:
        if not self.terms:
            return -1
        return max(mono_exp(m, var) for m in self.terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def homogeneous_components(self, weights: Mapping[str, int] | None = None) -> dict:
        comps: dict = {}
        for m, c in self.terms.items():
            comps.setdefault(mono_degree(m, weights), {})[m] = c
        return {d: Polynomial._raw(t) for d, t in sorted(comps.items())}

    def is_homogeneous(self, weights: Mapping[str, int] | None = None) -> bool:
        return len({mono_degree(m, weights) for m in self.terms}) <= 1

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Polynomial._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial()
        return Polynomial._raw({m: v * c for m, v in self.terms.items()})

    def mul_monomial(self, m: Monomial, c=1) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial()
        return Polynomial._raw({mono_mul(k, m): v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = t.get(m, 0) + c1 * c2
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        return Polynomial._raw(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, Polynomial):
            return self.exact_div(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result, base = Polynomial.const(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exact_div(self, g: "Polynomial") -> "Polynomial":
        """Exact quotient self / g; raises ArithmeticError when g does not
        divide self."""
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if g.is_constant():
            return self.scale(1 / g.constant_term())
        names = sorted(self.variables() | g.variables(), key=var_key)
        key = lambda m: _lex_key(m, names)  # noqa: E731
        lead = max(g.terms, key=key)
        lc = g.terms[lead]
        rem, quo = self, Polynomial()
        while rem:
            m = max(rem.terms, key=key)
            if not mono_divides(lead, m):
                raise ArithmeticError(f"{g} does not divide {self}")
            q = mono_div(m, lead)
            c = rem.terms[m] / lc
            quo = quo + Polynomial.monomial(q, c)
            rem = rem - g.mul_monomial(q, c)
        return quo

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- substitution -----------------------------------------------------
    def substitute(self, mapping: Mapping[str, "Polynomial"], cache: dict | None = None) -> "Polynomial":
        """Replace variables by polynomials. Rational images such as
        (c*x + d*y)/p^N are ordinary polynomials with rational coefficients."""
        if not mapping:
            return self
        powers = cache if cache is not None else {}
        out: dict = {}
        for m, c in self.terms.items():
            keep = []
            img = None
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    pw = powers.get(key)
                    if pw is None:
                        pw = mapping[v] ** e
                        powers[key] = pw
                    img = pw if img is None else img * pw
                else:
                    keep.append((v, e))
            part = Polynomial._raw({tuple(keep): c}) if img is None else img.mul_monomial(tuple(keep), c)
            for mm, cc in part.terms.items():
                s = out.get(mm, 0) + cc
                if s:
                    out[mm] = s
                else:
                    out.pop(mm, None)
        return Polynomial._raw(out)

    def reduce_root(self, p: int, var: str = "s") -> "Polynomial":
        """Apply var^(p-1) = p, leaving every exponent of ``var`` below p - 1.
        For p = 2 the variable disappears entirely (s = 2)."""
        k = p - 1
        if not any(mono_exp(m, var) >= k for m in self.terms):
            return self
        out: dict = {}
        for m, c in self.terms.items():
            e = mono_exp(m, var)
            if e >= k:
                q, r = divmod(e, k)
                rest = tuple((v, x) for v, x in m if v != var)
                m = mono_mul(rest, ((var, r),) if r else ())
                c = c * p**q
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    # -- display ----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-mono_degree(t[0]), _mono_sort_key(t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mstr = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not m:
                body = _fmt_rational(abs(c))
            elif abs(c) == 1:
                body = mstr
            else:
                body = f"{_fmt_rational(abs(c))}*{mstr}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _lex_key(m: Monomial, names):
    d = dict(m)
    return tuple(d.get(v, 0) for v in names)


X = Polynomial.var("x")
Y = Polynomial.var("y")
Z = Polynomial.var("z")
T = Polynomial.var("T")
S = Polynomial.var("s")


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def poly_multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def poly_scale(f: Polynomial, c) -> Polynomial:
    return f.scale(c)


def poly_power(f: Polynomial, n: int) -> Polynomial:
    return f**n


def poly_substitute(f: Polynomial, mapping: Mapping[str, Polynomial]) -> Polynomial:
    return f.substitute(mapping)


def term_valuation(m: Monomial, c: Fraction, p: int, root_var: str | None = "s"):
    v = vp(c, p)
    if root_var is not None:
        e = mono_exp(m, root_var)
        if e:
            v = v + Fraction(e, p - 1)
    return v


def min_p_valuation(f: Polynomial, p: int, root_var: str | None = "s"):
    """Minimum p-adic valuation over the coefficients of ``f``; +inf for 0.

    Powers of ``root_var`` (a (p-1)-th root of p) add 1/(p-1) each. After
    :meth:`Polynomial.reduce_root` the fractional parts of distinct
    s-powers differ, so this is the exact valuation of each x,y,z-coefficient.
    """
    if not f.terms:
        return INF
    return min(term_valuation(m, c, p, root_var) for m, c in f.terms.items())


class PValuationProfile:
    """Per-coefficient valuations of a polynomial (grouped by the monomial
    with ``root_var`` stripped) and their minimum."""

    def __init__(self, f: Polynomial, p: int, root_var: str | None = "s"):
        per: dict = {}
        for m, c in f.terms.items():
            base = tuple((v, e) for v, e in m if v != root_var) if root_var else m
            v = term_valuation(m, c, p, root_var)
            per[base] = min(per.get(base, INF), v)
        self.per_coefficient = per
        self.minimum = min(per.values()) if per else INF

    def at_least(self, t) -> bool:
        return self.minimum >= t


def monomial_ideal_member(f: Polynomial, generators: Iterable, ignore: Iterable[str] = ("s",)) -> bool:
    """True iff every term of ``f`` is divisible by one of the monomial
    generators. Generators may be monomial tuples or single-term polynomials.
    Variables in ``ignore`` (scalars such as the root of p) never count
    against divisibility."""
    gens = []
    for g in generators:
        if isinstance(g, Polynomial):
            if len(g.terms) != 1:
                raise ValueError("monomial generators only")
            (g,) = g.terms
        gens.append(g)
    ignore = set(ignore)
    for m in f.terms:
        core = tuple((v, e) for v, e in m if v not in ignore)
        if not any(mono_divides(g, core) for g in gens):
            return False
    return True
