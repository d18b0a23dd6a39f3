"""Recursive construction of closure certificates for p^N z in (x, y)R.

At step i the state holds an exponent L_i and coefficients a_{0i} = 1,
a_{1i}, ..., a_{ii} such that

  (1) a_{ji} lies in p^(K - tau(j)) R             (checked on lifts);
  (2) sum_{j<=k} C(p^(L_i) - j, k - j) a_{ji} z^(k-j) x^j lies in y^k S  for k <= i;
  (3) p^N z_i lies in (x^i, y^i)R                  (measured, see ``colon_exponent``).

The run stops when i = p^(L_i); the coefficient table at that step is the
certificate polynomial f(T) = T^(p^L) + a_1 T^(p^L - 1) + ... + a_(p^L).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod

from ..padic import INF, binomial_valuation
from ..poly import Polynomial, X, Y, Z
from ..transforms import ShiftContext, in_y_power, lift_factor, shift_transform, shifted_sum
from .instance import ModelRing, RelationInstance


class EngineError(RuntimeError):
    """A step-level check failed; ``where`` carries the (i, j, n) coordinates."""

    def __init__(self, message: str, where: dict | None = None):
        super().__init__(message)
        self.where = where or {}


class CapExceeded(EngineError):
    def __init__(self, message: str, states: list, where: dict | None = None):
        super().__init__(message, where)
        self.states = states


class TrivialCase(Exception):
    """z already lies in (x, y)R (D_1 = 0)."""

    def __init__(self, alpha: Polynomial, beta: Polynomial):
        super().__init__("z lies in (x, y)R")
        self.alpha, self.beta = alpha, beta


@dataclass
class Policy:
    max_L: int = 6
    max_steps: int = 64
    D_cap: int | None = None  # default 2N
    colon_cap: int | None = None  # default 2N
    degree_bound: int | None = None

    def d_cap(self, N: int) -> int:
        return self.D_cap if self.D_cap is not None else 2 * N

    def c_cap(self, N: int) -> int:
        return self.colon_cap if self.colon_cap is not None else 2 * N


@dataclass
class StepState:
    i: int
    L: int
    table: list  # lifts a_{0i} .. a_{ii}
    z_lift: Polynomial  # z_i
    D: int
    E: Fraction
    u: Fraction = Fraction(1)
    colon_exponent: int | None = None  # least m with p^m z_i in (x^i, y^i)R
    witness: dict = field(default_factory=dict)  # c, b, c_n as lifts
    valuations: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)


class GeneralRun:
    """Mutable driver for one instance; ``states[i - 1]`` is step i."""

    def __init__(self, instance: RelationInstance, policy: Policy | None = None):
        self.inst = instance
        self.policy = policy or Policy()
        self.ring = ModelRing(instance, self.policy.degree_bound)
        self.p = instance.p
        self.K = instance.K
        self.states: list[StepState] = []
        self.zbar = instance.zbar
        self.ctx = ShiftContext(X, Y, self.ring.image(Z))

    # -- helpers ----------------------------------------------------------
    def E(self, i: int) -> Fraction:
        return self.K - self.ring.tau(i) + self.ring.tau(2)

    def threshold(self, j: int) -> Fraction:
        return self.K - self.ring.tau(j)

    def images(self, table) -> list:
        return [self.ring.image(a) for a in table]

    def condition(self, table, L: int, k: int) -> bool:
        return in_y_power(shifted_sum(self.images(table[: k + 1]), self.p**L, k, X, self.ctx.z), k)

    def _state(self, **kw) -> StepState:
        return StepState(**kw)

    # -- step 1 -----------------------------------------------------------
    def init_step(self) -> StepState:
        """D_1, L_1 = K + D_1 and a_11 = p^K a where p^(D_1) z + a x lies in yR."""
        D1, w = self.ring.least_exponent(Z, [X, Y], self.inst.N)
        if D1 is None:
            raise EngineError("no D_1 <= N found for p^D z in (x, y)R", {"i": 1})
        alpha, beta = w.multipliers
        if D1 == 0:
            raise TrivialCase(alpha, beta)
        L1 = self.K + D1
        a11 = self.ring.normalize((-alpha).scale(self.p**self.K))
        table = [Polynomial.const(1), a11]
        st = self._state(i=1, L=L1, table=table, z_lift=Z, D=D1, E=Fraction(0),
                         witness={"a": -alpha, "b": beta})
        st.valuations = [self.ring.valuation(a11)]
        st.colon_exponent = self.inst.N
        st.flags.update(self._flags(st))
        if not st.flags["valuations"] or not st.flags["conditions"]:
            raise EngineError("step 1 conditions fail", {"i": 1})
        self.states.append(st)
        return st

    # -- z_i ----------------------------------------------------------------
    def compute_z_i(self) -> tuple[Polynomial, dict]:
        prev = self.states[-1]
        i = prev.i + 1
        Lp = prev.L
        E = self.E(i)
        acc = Polynomial()
        for j in range(i):
            c = comb(self.p**Lp - j, i - j)
            if c and not prev.table[j].is_zero():
                acc = acc + (prev.table[j] * Z ** (i - j) * X**j).scale(c)
        z_lift = self.ring.normalize(self.ring.p_power(-E) * acc)
        audit = self._z_audit(i, Lp, prev)
        audit["lift_integral"] = self.ring.valuation(z_lift) >= 0
        if not audit["lift_integral"] or not audit["inequalities"]:
            raise EngineError(f"z_{i} is not in R", {"i": i})
        return z_lift, audit

    def _z_audit(self, i: int, Lp: int, prev: StepState) -> dict:
        """Term-by-term valuation bound for z_i from the tau identities."""
        tau = self.ring.tau
        ok = True
        for j in range(1, i):
            lhs = (-self.K + tau(i) - tau(2)) + (tau(j) + tau(i - j + 1) - tau(i)) + (self.K - tau(j))
            if lhs != tau(i - j + 1) - tau(2) or lhs < 0:
                ok = False
        v0 = binomial_valuation(self.p**Lp, i, self.p)
        if v0 != INF and -self.E(i) + v0 < 0:
            ok = False
        return {"inequalities": ok, "L_prev_ge_K_plus_1": Lp >= self.K + 1}

    # -- D_i ----------------------------------------------------------------
    def q_star(self, i: int) -> list:
        gens = [X**i, Y**i]
        for n in range(1, i):
            gens.append((X * Y) ** (i - n) * self.states[n - 1].z_lift)
        return gens

    def find_D_i(self, z_lift: Polynomial, i: int):
        cap = self.policy.d_cap(self.inst.N)
        D, w = self.ring.least_exponent(z_lift, self.q_star(i), cap)
        if D is None:
            raise EngineError(f"no D_{i} <= {cap} with p^D z_{i} in Q_{i}*", {"i": i})
        return D, w

    def colon_exponent(self, z_lift: Polynomial, i: int):
        m, _ = self.ring.least_exponent(z_lift, [X**i, Y**i], self.policy.c_cap(self.inst.N))
        return m

    # -- step i > 1 ----------------------------------------------------------
    def step_general(self) -> StepState:
        prev = self.states[-1]
        i = prev.i + 1
        p, ring = self.p, self.ring
        z_lift, audit = self.compute_z_i()
        D, w = self.find_D_i(z_lift, i)
        m = self.colon_exponent(z_lift, i)
        f_x, f_y, *f_n = w.multipliers
        c, b = -f_x, f_y
        c_n = {n: -f for n, f in enumerate(f_n, start=1)}
        L = prev.L + D
        E = self.E(i)
        u = prod((Fraction(p**L - k, p**prev.L - k) for k in range(1, i)), start=Fraction(1))

        # n = 0: degree lift of the previous row plus the new leading coefficient
        parts = {0: [Polynomial.const(1)] + [prev.table[j].scale(lift_factor(j, prev.L, L, p)) for j in range(1, i)]
                 + [ring.normalize(ring.p_power(E) * c).scale(u)]}
        # n = 1: a single entry in position i - 1
        row = [Polynomial() for _ in range(i + 1)]
        if not c_n.get(1, Polynomial()).is_zero():
            den = p**L - (i - 1)
            row[i - 1] = ring.normalize(ring.p_power(E) * c_n[1] * Y ** (i - 1)).scale(Fraction(u, den))
        parts[1] = row
        # n > 1: index shift of the table at step n - 1 by d = i - n
        for n in range(2, i):
            row = [Polynomial() for _ in range(i + 1)]
            if not c_n[n].is_zero():
                d = i - n
                shifted = shift_transform(self.states[n - 2].table, d, i, self.states[n - 2].L, L, ShiftContext(X, Y, Z), p,
                                          strict=False)
                scale = ring.normalize(ring.p_power(E - self.E(n)) * c_n[n]).scale(u)
                for j in range(d, i):
                    if not shifted[j].is_zero():
                        row[j] = ring.normalize(scale * shifted[j])
            parts[n] = row

        for n, row in parts.items():
            for j in range(1, len(row)):
                if row[j].is_zero():
                    continue
                if ring.valuation(row[j]) < self.threshold(j):
                    raise EngineError(f"a_({j},{i},{n}) fails the valuation bound", {"i": i, "j": j, "n": n})

        table = [Polynomial.const(1)]
        for j in range(1, i):
            acc = Polynomial()
            for row in parts.values():
                acc = acc + row[j]
            table.append(ring.normalize(acc))
        table.append(parts[0][i])

        st = self._state(i=i, L=L, table=table, z_lift=z_lift, D=D, E=E, u=u, colon_exponent=m,
                         witness={"c": c, "b": b, **{f"c_{n}": v for n, v in c_n.items()}})
        st.valuations = [ring.valuation(a) for a in table[1:]]
        st.flags.update(audit)
        st.flags.update(self._flags(st))
        # the i-th sum collapses to p^E u b y^i
        ith = shifted_sum(self.images(table), p**L, i, X, self.ctx.z)
        st.flags["ith_identity"] = ith == ring.image(ring.p_power(E) * b * Y**i).scale(u)
        st.flags["colon_within_N"] = m is not None and m <= self.inst.N
        if not st.flags["valuations"]:
            raise EngineError(f"step {i}: valuation condition fails", {"i": i})
        if not st.flags["conditions"] or not st.flags["ith_identity"]:
            raise EngineError(f"step {i}: membership condition fails", {"i": i})
        self.states.append(st)
        return st

    def _flags(self, st: StepState) -> dict:
        vals_ok = all(v >= self.threshold(j) for j, v in enumerate(st.valuations, start=1))
        conds = all(self.condition(st.table, st.L, k) for k in range(1, st.i + 1))
        return {"valuations": vals_ok, "conditions": conds}

    # -- driver ---------------------------------------------------------------
    def run(self, stop_at_termination: bool = True, max_steps: int | None = None) -> list[StepState]:
        max_steps = max_steps or self.policy.max_steps
        st = self.init_step()
        while True:
            if stop_at_termination and st.i == self.p**st.L:
                return self.states
            if st.L > self.policy.max_L:
                raise CapExceeded(f"L_{st.i} = {st.L} exceeds max_L = {self.policy.max_L}", self.states,
                                  {"i": st.i})
            if st.i >= max_steps:
                if not stop_at_termination:
                    return self.states
                raise CapExceeded(f"no termination within {max_steps} steps", self.states, {"i": st.i})
            st = self.step_general()


def init_step(instance: RelationInstance, policy: Policy | None = None) -> StepState:
    return GeneralRun(instance, policy).init_step()
