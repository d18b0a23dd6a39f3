"""Fixed-degree construction when the relation module is generated by one triple.

With L = K + N fixed, every coefficient is built in two parts,
a_i = a_i' + y^i a_i'', and each z_i is decomposed over the three generators
x^i, y^i, (xy)^(i-1) z only. The simplified variant takes N = 1, K = 0, L = 1
and drops the tau budget (every exponent E_i is 0, every threshold 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from ..padic import vp
from ..poly import Polynomial, X, Y, Z
from .general import EngineError, TrivialCase
from .instance import ModelRing, RelationInstance


class CyclicFailure(EngineError):
    """z_i has no decomposition over (x^i, y^i, (xy)^(i-1) z)R."""


@dataclass
class CyclicStep:
    i: int
    z_lift: Polynomial
    c1: Polynomial
    c2: Polynomial
    c3: Polynomial
    E: Fraction
    divisor_check: bool | None = None  # v_p(p^L - (i-1)) matches the tau prediction


@dataclass
class CyclicRun:
    instance: RelationInstance
    L: int
    table: list  # a_0 .. a_{p^L}
    steps: list = field(default_factory=list)
    use_tau: bool = True

    @property
    def degree(self) -> int:
        return self.instance.p**self.L


def _poly(t) -> Polynomial:
    return t if isinstance(t, Polynomial) else Polynomial.const(t)


def _E(ring: ModelRing, K: int, i: int, use_tau: bool) -> Fraction:
    return K - ring.tau(i) + ring.tau(2) if use_tau else Fraction(0)


def cyclic_z(full: list, i: int, n: int, E, ring: ModelRing) -> Polynomial:
    """z_i = p^(-E) sum_{j<i} C(n-j, i-j) a_j z^(i-j) x^j (a_(i-1) still without its y-part)."""
    acc = Polynomial()
    for j in range(i):
        cj = comb(n - j, i - j)
        if cj and not full[j].is_zero():
            acc = acc + (full[j] * Z ** (i - j) * X**j).scale(cj)
    return ring.normalize(ring.p_power(-E) * acc)


def apply_decomposition(full: list, i: int, n: int, E, c1: Polynomial, c3: Polynomial,
                        ring: ModelRing) -> list:
    """Given z_i = c1 x^i + c2 y^i + c3 (xy)^(i-1) z, set a_i' = -p^E c1 and add
    y^(i-1) a_(i-1)'' with a_(i-1)'' = -p^E c3 / (n - (i-1)). The i-th sum then
    equals p^E c2 y^i."""
    out = list(full)
    a_pp = ring.normalize(ring.p_power(E) * c3).scale(Fraction(-1, n - (i - 1)))
    out[i - 1] = ring.normalize(out[i - 1] + a_pp * Y ** (i - 1))
    out.append(ring.normalize((ring.p_power(E) * c1).scale(-1)))
    return out


def run_cyclic(instance: RelationInstance, generator_triple=None, K: int | None = None,
               L: int | None = None, use_tau: bool = True, degree_bound: int | None = None) -> CyclicRun:
    """Build a_1..a_(p^L) with L = K + N.

    ``generator_triple`` is (a, b) with p^N z + a x + b y = 0; the default
    (-c, -d) comes straight from the instance relation.
    """
    K = instance.K if K is None else K
    inst = instance.with_K(K)
    ring = ModelRing(inst, degree_bound)
    p = inst.p
    L = K + inst.N if L is None else L
    a, b = (_poly(t) for t in (generator_triple or (-inst.c, -inst.d)))
    if not (inst.zbar.scale(p**inst.N) + a * X + b * Y).is_zero():
        raise CyclicFailure("generator triple does not satisfy p^N z + a x + b y = 0", {"i": 1})
    w = ring.member(Z, [X, Y])
    if w is not None:
        raise TrivialCase(*w.multipliers)

    n = p**L
    full = [Polynomial.const(1), ring.normalize(a.scale(p**K))]
    steps = []
    for i in range(2, n + 1):
        E = _E(ring, K, i, use_tau)
        z_lift = cyclic_z(full, i, n, E, ring)
        gens = [X**i, Y**i, (X * Y) ** (i - 1) * Z]
        w = ring.member(z_lift, gens)
        if w is None:
            raise CyclicFailure(f"z_{i} is not in (x^{i}, y^{i}, (xy)^{i - 1} z)R", {"i": i})
        c1, c2, c3 = w.multipliers
        step = CyclicStep(i=i, z_lift=z_lift, c1=c1, c2=c2, c3=c3, E=E)
        if use_tau:
            predicted = ring.tau(i - 1) + ring.tau(2) - ring.tau(i)
            step.divisor_check = vp(n - (i - 1), p) == predicted
            if not step.divisor_check:
                raise CyclicFailure(f"v_p(p^L - {i - 1}) differs from the tau prediction", {"i": i})
        full = apply_decomposition(full, i, n, E, c1, c3, ring)
        steps.append(step)
    return CyclicRun(instance=inst, L=L, table=full, steps=steps, use_tau=use_tau)


def run_simplified(instance: RelationInstance, generator_triple=None, degree_bound: int | None = None) -> CyclicRun:
    if instance.N != 1:
        raise ValueError(f"simplified mode needs N = 1, got N = {instance.N}")
    return run_cyclic(instance, generator_triple, K=0, L=1, use_tau=False, degree_bound=degree_bound)
