"""Exhaustive and seeded-random sweeps over the valuation and transform identities.

Every sweep returns a :class:`SweepResult` with the number of cases checked
and the first few counterexamples, so reports stay small even when a fault
is injected.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .padic import (binomial_valuation_digitwise, check_binomial_tau_identity,
                    check_tau_budget, legendre_factorial_valuation, tau_value, vp)
from .poly import Polynomial, X, Y, mono
from .transforms import (ShiftContext, complete_next_coefficient, completion_condition, lift_degree,
                         shift_transform, verify_lift, verify_root_shift_identity, verify_shift)

MAX_EXAMPLES = 5


@dataclass
class SweepResult:
    name: str
    params: dict
    checked: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def record(self, ok: bool, payload: Callable[[], dict]):
        self.checked += 1
        if not ok:
            self.failure_count += 1
            if len(self.failures) < MAX_EXAMPLES:
                self.failures.append(payload())

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked,
                "failure_count": self.failure_count, "params": _plain(self.params),
                "failures": _plain(self.failures)}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Polynomial):
        return str(v)
    if isinstance(v, float):
        return "inf" if v == float("inf") else repr(v)
    return v


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------


def sweep_binomial_oracle(n_max: int = 1000, primes: Iterable[int] = (2, 3, 5)) -> SweepResult:
    """Digit-comparison valuation of C(n, i) against Legendre's formula."""
    primes = tuple(primes)
    res = SweepResult("binomial_oracle", {"n_max": n_max, "primes": list(primes)})
    for p in primes:
        leg = [legendre_factorial_valuation(n, p) for n in range(n_max + 1)]
        for n in range(n_max + 1):
            for i in range(n + 1):
                got = binomial_valuation_digitwise(i, n - i, p)
                want = leg[n] - leg[i] - leg[n - i]
                res.record(got == want, lambda: {"p": p, "n": n, "i": i, "digitwise": got, "legendre": want})
    return res


def sweep_tau_identities(bounds: dict | None = None, tau_fn=tau_value,
                         variants: Iterable[str] = ("a", "b", "c")) -> SweepResult:
    """Variants a, b, c for 0 < j < i < p^L, L up to ``bounds[p]``.

    ``tau_fn`` is passed through so a faulty tau can be injected. With a
    single variant the result is named ``binomial_tau_identity[v]``.
    """
    bounds = bounds if bounds is not None else {2: 5, 3: 5, 5: 3, 7: 3}
    variants = tuple(variants)
    name = "binomial_tau_identity" + (f"[{variants[0]}]" if len(variants) == 1 else "")
    res = SweepResult(name, {"L_max": dict(bounds), "variants": list(variants)})
    for p, L_max in sorted(bounds.items()):
        for L in range(1, L_max + 1):
            q = p**L
            for i in range(1, q):
                if "c" in variants:
                    rep = check_binomial_tau_identity("c", i, L=L, p=p, tau_fn=tau_fn)
                    res.record(rep.ok, lambda: {"variant": "c", **rep.params, "lhs": rep.lhs, "rhs": rep.rhs})
                for j in range(1, i):
                    for variant in variants:
                        if variant == "c":
                            continue
                        rep = check_binomial_tau_identity(variant, i, j, L=L, p=p, tau_fn=tau_fn)
                        res.record(rep.ok, lambda: {"variant": variant, **rep.params, "lhs": rep.lhs, "rhs": rep.rhs})
    return res


def sweep_tau_budget(Ks: Iterable[int] = (-1, 0, 1, 2, 3, 4), primes: Iterable[int] = (2, 3, 5)) -> SweepResult:
    Ks, primes = tuple(Ks), tuple(primes)
    res = SweepResult("tau_budget", {"K": list(Ks), "primes": list(primes)})
    for p in primes:
        for K in Ks:
            rep = check_tau_budget(K, p=p)
            res.checked += rep.checked - 1
            res.record(rep.ok, lambda: {"p": p, "K": K, "violations": rep.violations[:MAX_EXAMPLES]})
    return res


def sweep_exponent_identities(i_max: int = 64, primes: Iterable[int] = (2, 3, 5),
                              Ks: Iterable[int] = (0, 1, 2), tau_fn=tau_value) -> SweepResult:
    """Exponent bookkeeping of the general recursion, for 1 <= j < i <= i_max and 1 < n < i.

    (a) E_i - (tau(i-1) + tau(2) - tau(i)) = K - tau(i-1), and
        v_p(p^L - (i-1)) = tau(i-1) + tau(2) - tau(i) for i - 1 < p^L;
    (b) (-E_i) + (tau(j) + tau(i-j+1) - tau(i)) + (K - tau(j)) = tau(i-j+1) - tau(2) >= 0;
    (c) for j + n - i > 0 the n-branch budget equals K - tau(j) exactly;
    (d) for j + n - i = 0 the budget condition is L >= K + tau(2), true for L >= K + 1.
    """
    primes, Ks = tuple(primes), tuple(Ks)
    res = SweepResult("exponent_identities", {"i_max": i_max, "primes": list(primes), "K": list(Ks)})
    for p in primes:
        t = [Fraction(0)] + [tau_fn(m, p) for m in range(1, i_max + 2)]
        L_cover = 1
        while p**L_cover < i_max:
            L_cover += 1
        for K in Ks:
            E = lambda i: K - t[i] + t[2]  # noqa: E731
            for i in range(2, i_max + 1):
                lhs = E(i) - (t[i - 1] + t[2] - t[i])
                ok = lhs == K - t[i - 1]
                if K == Ks[0]:
                    ok = ok and vp(p**L_cover - (i - 1), p) == t[i - 1] + t[2] - t[i]
                res.record(ok, lambda: {"inv": "a", "p": p, "K": K, "i": i})
                for j in range(1, i):
                    lhs = -E(i) + (t[j] + t[i - j + 1] - t[i]) + (K - t[j])
                    res.record(lhs == t[i - j + 1] - t[2] and lhs >= 0,
                               lambda: {"inv": "b", "p": p, "K": K, "i": i, "j": j, "lhs": lhs})
                    for n in range(2, i):
                        if j + n - i > 0:
                            m = j + n - i
                            lhs = ((E(i) - E(n)) + (t[m] + t[i - j + 1] - t[n]) + (K - t[m])
                                   - (t[j] + t[i - j + 1] - t[i]))
                            res.record(lhs == K - t[j],
                                       lambda: {"inv": "c", "p": p, "K": K, "i": i, "j": j, "n": n, "lhs": lhs})
                        elif j + n - i == 0:
                            for L in range(K + 1, K + 4):
                                lhs = ((E(i) - E(n)) + (L - t[i - j] + t[i - j + 1] - t[2])
                                       - (t[j] + t[i - j + 1] - t[i]))
                                reduced = t[n] + L - t[2] - t[i - j] >= K
                                ok = (lhs >= K - t[j]) == reduced == (L >= K + t[2]) and t[2] <= 1 and reduced
                                res.record(ok, lambda: {"inv": "d", "p": p, "K": K, "i": i, "j": j, "n": n, "L": L})
    return res


# ---------------------------------------------------------------------------
# seeded random transform checks
# ---------------------------------------------------------------------------


def _rand_rational(rng: random.Random, p: int) -> Fraction:
    num = rng.randint(-6, 6)
    den = p ** rng.randint(0, 2) * rng.choice((1, 1, 1, 5 if p != 5 else 7))
    return Fraction(num, den)


def random_polynomial(rng: random.Random, p: int, max_terms: int = 3, max_deg: int = 2) -> Polynomial:
    out = Polynomial()
    for _ in range(rng.randint(1, max_terms)):
        ex, ey = rng.randint(0, max_deg), rng.randint(0, max_deg)
        if ex + ey > max_deg:
            continue
        out = out + Polynomial.monomial(mono(x=ex, y=ey), _rand_rational(rng, p))
    return out


def _completed(rng: random.Random, p: int, n: int, upto: int, a_bar=None, b_bar=None):
    """Context z = a_bar x + b_bar y and a_0..a_upto from iterated completion."""
    a_bar = a_bar if a_bar is not None else random_polynomial(rng, p, max_deg=1)
    b_bar = b_bar if b_bar is not None else random_polynomial(rng, p, max_deg=1)
    ctx = ShiftContext(X, Y, a_bar * X + b_bar * Y)
    a = [Polynomial.const(1)]
    for _ in range(upto):
        a.append(complete_next_coefficient(a, a_bar, n, ctx))
    return ctx, a, a_bar, b_bar


def sweep_root_shift(count: int = 200, primes: Iterable[int] = (2, 3), seed: int = 0,
                     max_degree: int = 8) -> SweepResult:
    primes = tuple(primes)
    res = SweepResult("root_shift_identity", {"count": count, "primes": list(primes), "seed": seed,
                                              "max_degree": max_degree})
    for p in primes:
        rng = random.Random(f"{seed}:root_shift:{p}")
        for _ in range(count):
            n = rng.randint(1, max_degree)
            a = [Polynomial.const(1)] + [random_polynomial(rng, p, max_deg=1) for _ in range(n)]
            x = X.scale(rng.choice((1, 2, 3))) + Y.scale(rng.randint(0, 1))
            ctx = ShiftContext(x, Y, random_polynomial(rng, p))
            ok = verify_root_shift_identity(a, ctx, n)
            res.record(ok, lambda: {"p": p, "n": n, "a": a, "z": ctx.z, "x": ctx.x})
    return res


def sweep_completion(count: int = 100, primes: Iterable[int] = (2, 3), seed: int = 0,
                     max_degree: int = 8) -> SweepResult:
    primes = tuple(primes)
    res = SweepResult("completion", {"count": count, "primes": list(primes), "seed": seed,
                                     "max_degree": max_degree})
    rng = random.Random(f"{seed}:completion")
    for t in range(count):
        p = primes[t % len(primes)]
        n = rng.randint(1, max_degree)
        try:
            ctx, a, a_bar, b_bar = _completed(rng, p, n, n)
            ok = all(completion_condition(a, ctx, n, k) for k in range(1, n + 1))
        except ArithmeticError:
            ok, a, a_bar, b_bar = False, [], None, None
        res.record(ok, lambda: {"p": p, "n": n, "a_bar": a_bar, "b_bar": b_bar})
    return res


def _exponent_choices(p: int):
    return {2: (1, 2), 3: (1,), 5: (1,)}.get(p, (1,))


def sweep_lift(count: int = 100, primes: Iterable[int] = (2, 3), seed: int = 0) -> SweepResult:
    primes = tuple(primes)
    res = SweepResult("degree_lift", {"count": count, "primes": list(primes), "seed": seed})
    rng = random.Random(f"{seed}:lift")
    for t in range(count):
        p = primes[t % len(primes)]
        L = rng.choice(_exponent_choices(p))
        M = L + rng.randint(1, 2 if p == 2 else 1)
        k_max = rng.randint(0, p**L - 1)
        ctx, a, _, _ = _completed(rng, p, p**L, k_max)
        try:
            a_tilde, qs = lift_degree(a, L, M, p)
            units = all(vp(q, p) == 0 for q in qs)
            ok = units and verify_lift(a, a_tilde, L, M, ctx, k_max, p)
        except ArithmeticError:
            ok, units = False, False
        res.record(ok, lambda: {"p": p, "L": L, "M": M, "k_max": k_max, "units": units})
    return res


def sweep_shift(count: int = 100, primes: Iterable[int] = (2, 3), seed: int = 0) -> SweepResult:
    primes = tuple(primes)
    res = SweepResult("index_shift", {"count": count, "primes": list(primes), "seed": seed})
    rng = random.Random(f"{seed}:shift")
    for t in range(count):
        p = primes[t % len(primes)]
        L = rng.choice(_exponent_choices(p))
        M = L + rng.randint(0, 1)
        i = rng.randint(2, p**L)
        d = rng.randint(1, i - 1)
        ctx, a, _, _ = _completed(rng, p, p**L, i - d - 1)
        a_tilde = shift_transform(a, d, i, L, M, ctx, p)
        rep = verify_shift(a, a_tilde, d, i, L, M, ctx, p)
        res.record(rep.ok, lambda: {"p": p, "L": L, "M": M, "i": i, "d": d,
                                    "memberships": rep.memberships, "q_independent": rep.q_independent})
    return res
