from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from closurecert.dvr import (DVRSystem, DimensionError, Infeasible, Solution, check_infeasibility_certificate,
                             dvr_solve, residual_is_zero)
from closurecert.engine.certificate import parse_polynomial
from closurecert.membership import bounded_ideal_member
from closurecert.padic import INF, vp
from closurecert.poly import (PValuationProfile, Polynomial, S, X, Y, Z, min_p_valuation, mono,
                              monomial_ideal_member, monomials_up_to)

small_q = st.fractions(min_value=-8, max_value=8, max_denominator=12)


@st.composite
def polys(draw, variables=("x", "y", "z"), max_terms=4, max_exp=3):
    out = Polynomial()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {v: draw(st.integers(0, max_exp)) for v in variables}
        out = out + Polynomial.monomial(mono(**exps), draw(small_q))
    return out


# -- polynomial arithmetic ------------------------------------------------


def test_arithmetic_examples():
    assert (X + Y) + (-X) == Y
    assert (X + Y) ** 2 == X**2 + (X * Y).scale(2) + Y**2
    rel = Z.scale(2) - X - Y
    assert rel.substitute({"z": (X + Y).scale(Fraction(1, 2))}).is_zero()


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == Polynomial()


@given(polys(), polys())
def test_exact_division(f, g):
    if g.is_zero():
        return
    assert (f * g).exact_div(g) == f


def test_exact_division_rejects_remainders():
    with pytest.raises(ArithmeticError):
        (X + 1).exact_div(Y)


@given(polys(variables=("x", "y", "z", "s")))
def test_canonical_string_round_trip(f):
    assert parse_polynomial(str(f)) == f
    assert str(parse_polynomial(str(f))) == str(f)


def test_root_reduction():
    assert (S**5).reduce_root(3) == (S * 9).reduce_root(3)
    assert (S**3).reduce_root(2) == Polynomial.const(8)
    assert min_p_valuation((S * X).reduce_root(3), 3) == Fraction(1, 2)


@pytest.mark.parametrize("f,p,v", [(X.scale(4) + Y.scale(2), 2, 1), (Polynomial(), 3, INF),
                                   (X.scale(Fraction(3, 2)), 2, -1)])
def test_min_valuation(f, p, v):
    assert min_p_valuation(f, p) == v
    assert PValuationProfile(f, p).minimum == v


@pytest.mark.parametrize("f,gens,expected", [(Y**3 * X + Y**2, [mono(y=2)], True),
                                             (X + Y, [mono(x=2), mono(y=2)], False),
                                             (Polynomial(), [mono(x=1)], True)])
def test_monomial_membership(f, gens, expected):
    assert monomial_ideal_member(f, gens) is expected


def test_weighted_monomials():
    ms = monomials_up_to(["x", "y", "z"], 3, {"x": 1, "y": 1, "z": 2})
    assert mono(x=1, z=1) in ms and mono(z=2) not in ms
    assert len(set(ms)) == len(ms)


# -- DVR solver -----------------------------------------------------------


def test_solver_examples():
    sol = dvr_solve(DVRSystem([[2]], [2], 2))
    assert isinstance(sol, Solution) and sol.x == [1]
    bad = DVRSystem([[2]], [1], 2)
    inf = dvr_solve(bad)
    assert isinstance(inf, Infeasible) and not inf
    assert check_infeasibility_certificate(bad, inf)
    sol = dvr_solve(DVRSystem([[1, 2], [0, 0]], [3, 0], 2))
    assert sol.x == [3, 0]


def test_solver_dimension_errors():
    with pytest.raises(DimensionError):
        DVRSystem([[1, 2], [1]], [0, 0], 2)
    with pytest.raises(DimensionError):
        DVRSystem([[1]], [0, 0], 2)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([2, 3, 5]), st.data())
def test_solver_is_sound(m, n, p, data):
    A = [[data.draw(small_q) for _ in range(n)] for _ in range(m)]
    b = [data.draw(small_q) for _ in range(m)]
    sys_ = DVRSystem(A, b, p)
    out = dvr_solve(sys_)
    if out:
        assert residual_is_zero(sys_, out.x)
        assert all(vp(v, p) >= 0 for v in out.x if v)
    else:
        assert check_infeasibility_certificate(sys_, out)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.sampled_from([2, 3]), st.data())
def test_solver_finds_planted_solutions(m, n, p, data):
    ints = st.integers(-5, 5)
    A = [[Fraction(data.draw(ints), data.draw(st.sampled_from([1, p, p * p]))) for _ in range(n)] for _ in range(m)]
    x = [data.draw(ints) for _ in range(n)]
    b = [sum(a * xi for a, xi in zip(row, x)) for row in A]
    assert dvr_solve(DVRSystem(A, b, p))


def test_solver_is_deterministic():
    A = [[2, 4, 1], [6, 3, 3]]
    assert dvr_solve(DVRSystem(A, [1, 3], 2)).x == dvr_solve(DVRSystem(A, [1, 3], 2)).x


# -- bounded membership ---------------------------------------------------


def test_membership_examples():
    w = bounded_ideal_member(X**3, [X**2, Y**2], 2, 1)
    assert w.multipliers == [X, Polynomial()]
    assert bounded_ideal_member(X.scale(Fraction(1, 2)) + Y, [X, Y], 2) is None
    w = bounded_ideal_member(Polynomial(), [X, Y], 2)
    assert all(f.is_zero() for f in w.multipliers)


@settings(max_examples=60, deadline=None)
@given(polys(variables=("x", "y"), max_terms=3), polys(variables=("x", "y"), max_terms=3))
def test_membership_reconstructs(f, g):
    gens = [X**2, Y**2]
    target = f * gens[0] + g * gens[1]
    target = Polynomial({m: Fraction(c.numerator) for m, c in target.terms.items()})
    w = bounded_ideal_member(target, gens, 3, 6)
    if w is not None:
        assert w.combine(gens) == target
    assert (w is not None) == monomial_ideal_member(target, [mono(x=2), mono(y=2)])


def test_membership_through_substitution():
    # in Z_(2)[x, y, (x + y)/2], 2z lies in (x, y) but z does not
    sub = {"z": (X + Y).scale(Fraction(1, 2))}
    kw = dict(ring_vars=("x", "y", "z"), substitution=sub, weights={"x": 1, "y": 1, "z": 1})
    assert bounded_ideal_member(Z, [X, Y], 2, **kw) is None
    w = bounded_ideal_member(Z.scale(2), [X, Y], 2, **kw)
    assert w is not None
    img = [f.substitute(sub) for f in w.multipliers]
    assert img[0] * X + img[1] * Y == X + Y
