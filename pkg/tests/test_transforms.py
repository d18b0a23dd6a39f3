import random
from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from closurecert.poly import Polynomial, T, X, Y, Z
from closurecert.sweeps import random_polynomial
from closurecert.transforms import (ShiftContext, build_b_coefficients, complete_next_coefficient,
                                    completion_condition, lift_degree, shift_ratio, shift_transform,
                                    verify_lift, verify_root_shift_identity, verify_shift)

ONE = Polynomial.const(1)
sx, sy, sz, sT = sympy.symbols("x y z T")


def to_sympy(f: Polynomial):
    out = sympy.Integer(0)
    env = {"x": sx, "y": sy, "z": sz, "T": sT}
    for m, c in f.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in m:
            term *= env[v] ** e
        out += term
    return sympy.expand(out)


def sympy_b(a, x, z, n):
    """Coefficients of (-1)^n x^n f((z - T)/x), read off in powers of T."""
    w = (to_sympy(z) - sT) / to_sympy(x)
    f = sum(to_sympy(ai) * w ** (n - i) for i, ai in enumerate(a))
    g = sympy.expand(sympy.cancel((-1) ** n * to_sympy(x) ** n * f))
    poly = sympy.Poly(g, sT)
    return [sympy.expand(poly.coeff_monomial(sT ** (n - i))) for i in range(n + 1)]


# -- root shift -----------------------------------------------------------


def test_b_degree_one():
    c = Polynomial.const(5)
    b = build_b_coefficients([ONE, -c], ShiftContext(ONE, Y, Z), 1)
    assert b == [ONE, -(Z - c)]


def test_b_for_power_of_T():
    b = build_b_coefficients([ONE] + [Polynomial()] * 4, ShiftContext(X, Y, Polynomial()), 4)
    assert b[0] == ONE and all(bi.is_zero() for bi in b[1:])


def test_b_square():
    b = build_b_coefficients([ONE, Polynomial(), Polynomial()], ShiftContext(ONE, Y, ONE), 2)
    assert b == [ONE, Polynomial.const(-2), ONE]


def test_identity_rejects_zero_x():
    with pytest.raises(ValueError):
        verify_root_shift_identity([ONE, ONE], ShiftContext(Polynomial(), Y, Z))


def test_context_rejects_zero_y():
    with pytest.raises(ValueError):
        ShiftContext(X, Polynomial(), Z)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3]))
def test_root_shift_matches_sympy(seed, p):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    a = [ONE] + [random_polynomial(rng, p, max_deg=1) for _ in range(n)]
    x = X.scale(rng.choice((1, 2))) + Y.scale(rng.randint(0, 1))
    z = random_polynomial(rng, p)
    ctx = ShiftContext(x, Y, z)
    ours = [to_sympy(b) for b in build_b_coefficients(a, ctx, n)]
    assert [sympy.expand(o - s) for o, s in zip(ours, sympy_b(a, x, z, n))] == [0] * (n + 1)
    assert verify_root_shift_identity(a, ctx, n)


def test_root_shift_kills_the_shifted_root():
    # f(T) = (T - 3)(T + 1): roots w = 3, -1; g(z - x w) = 0
    a = [ONE, Polynomial.const(-2), Polynomial.const(-3)]
    ctx = ShiftContext(X, Y, Z)
    g = sum((b * T ** (2 - i) for i, b in enumerate(build_b_coefficients(a, ctx, 2))), Polynomial())
    for w in (3, -1):
        assert g.substitute({"T": Z - X.scale(w)}).is_zero()


# -- completion -----------------------------------------------------------


def test_completion_first_coefficient():
    a_bar = Polynomial.const(Fraction(3, 2))
    assert complete_next_coefficient([ONE], a_bar, 5) == a_bar.scale(-5)


def test_completion_with_z_in_y():
    ctx = ShiftContext(X, Y, Y.scale(7))
    a = [ONE]
    for _ in range(4):
        a.append(complete_next_coefficient(a, Polynomial(), 4, ctx))
    assert all(c.is_zero() for c in a[1:])


def test_completion_square_pattern():
    a_bar = X + 2
    a1 = complete_next_coefficient([ONE], a_bar, 2)
    assert complete_next_coefficient([ONE, a1], a_bar, 2) == a_bar**2


def test_completion_errors():
    with pytest.raises(ValueError):
        complete_next_coefficient([ONE, ONE, ONE], ONE, 1)
    with pytest.raises(ValueError):
        complete_next_coefficient([ONE], None, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_completion_conditions_hold(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    a_bar, b_bar = random_polynomial(rng, 2, max_deg=1), random_polynomial(rng, 2, max_deg=1)
    ctx = ShiftContext(X, Y, a_bar * X + b_bar * Y)
    a = [ONE]
    for _ in range(n):
        a.append(complete_next_coefficient(a, a_bar, n, ctx))
    assert all(completion_condition(a, ctx, n, k) for k in range(1, n + 1))


# -- degree lift ----------------------------------------------------------


def test_lift_examples():
    a = [ONE, X, Y]
    a_t, q = lift_degree(a[:2], 1, 2, 2)
    assert a_t[1] == X.scale(2) and q[1] == 1
    a_t, q = lift_degree([ONE, X, Y], 2, 3, 2)
    assert a_t[0] == ONE
    _, q = lift_degree([ONE, X, Y, X], 2, 3, 2)
    assert all(qj.denominator % 2 and qj.numerator % 2 for qj in q)


def test_lift_factor_at_two():
    # prod_{m<2} (4 - m)/(2 - m) = 6 = 2 * 3
    from closurecert.transforms import lift_factor
    assert lift_factor(2, 1, 2, 2) == 6


def test_lift_errors():
    with pytest.raises(ValueError):
        lift_degree([ONE, X], 2, 2, 2)
    with pytest.raises(ValueError):
        lift_degree([ONE, X, X], 1, 2, 2)


@pytest.mark.parametrize("p,L,M,k_max", [(2, 1, 2, 1), (3, 1, 3, 2), (2, 2, 3, 3)])
def test_verify_lift_on_completed_sequences(p, L, M, k_max):
    rng = random.Random(p * 100 + M)
    a_bar, b_bar = random_polynomial(rng, p, max_deg=1), random_polynomial(rng, p, max_deg=1)
    ctx = ShiftContext(X, Y, a_bar * X + b_bar * Y)
    a = [ONE]
    for _ in range(k_max):
        a.append(complete_next_coefficient(a, a_bar, p**L, ctx))
    a_t, q = lift_degree(a, L, M, p)
    assert verify_lift(a, a_t, L, M, ctx, k_max, p)


# -- index shift ----------------------------------------------------------


def test_shift_zero_below_d():
    a = [ONE, X, Y]
    out = shift_transform(a, 2, 4, 2, 2, ShiftContext(X, Y, Z), 2)
    assert out[0].is_zero() and out[1].is_zero()


def test_shift_single_entry():
    p, L, M, i = 2, 2, 3, 3
    out = shift_transform([ONE], i - 1, i, L, M, ShiftContext(X, Y, Z), p)
    assert out[i - 1] == (Y ** (i - 1)).scale(Fraction(comb(p**L, 1), comb(p**M - i + 1, 1)))


def test_shift_formula_against_expansion():
    p, L, M, i, d = 2, 2, 2, 3, 1
    a = [ONE, X.scale(3)]
    out = shift_transform(a, d, i, L, M, ShiftContext(X, Y, Z), p)
    for j in range(d, i):
        want = Y * a[j - d]
        want = want.scale(Fraction(comb(p**L - j + d, i - j), comb(p**M - j, i - j)))
        assert out[j] == want


def test_verify_shift_small_instance():
    p, L, M, i, d = 2, 2, 2, 3, 1
    a_bar = Polynomial.const(Fraction(1, 2))
    ctx = ShiftContext(X, Y, a_bar * X + Y.scale(Fraction(1, 2)))
    a = [ONE]
    for _ in range(i - d - 1):
        a.append(complete_next_coefficient(a, a_bar, p**L, ctx))
    rep = verify_shift(a, shift_transform(a, d, i, L, M, ctx, p), d, i, L, M, ctx, p)
    assert rep.ok and rep.q_independent


def test_shift_degenerate_sequence():
    rep = verify_shift([ONE], shift_transform([ONE], 1, 2, 1, 1, ShiftContext(X, Y, Z), 2), 1, 2, 1, 1,
                       ShiftContext(X, Y, Z), 2)
    assert rep.ok


@pytest.mark.parametrize("d,i,L,M", [(0, 2, 1, 1), (2, 2, 1, 1), (1, 5, 2, 2), (1, 2, 2, 1)])
def test_shift_range_errors(d, i, L, M):
    with pytest.raises(ValueError):
        shift_transform([ONE, X], d, i, L, M, ShiftContext(X, Y, Z), 2)


def test_relaxed_shift_range():
    # i may exceed p^L as long as i - d stays within it
    shift_transform([ONE], 3, 4, 1, 2, ShiftContext(X, Y, Z), 2, strict=False)
    with pytest.raises(ValueError):
        shift_transform([ONE, X, X], 1, 4, 1, 2, ShiftContext(X, Y, Z), 2, strict=False)


def test_shift_ratio_is_independent_of_m():
    for p, L, M in [(2, 2, 3), (3, 1, 2)]:
        for i in range(2, p**L + 1):
            for d in range(1, i):
                for k in range(d, i):
                    q0 = shift_ratio(0, k, d, i, L, M, p)
                    assert all(shift_ratio(m, k, d, i, L, M, p) == q0 for m in range(k - d + 1))
