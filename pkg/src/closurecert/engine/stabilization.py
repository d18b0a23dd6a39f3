"""Watch the exponents D_i of a general run until they settle at 0."""
from __future__ import annotations

from dataclasses import dataclass, field

from .general import EngineError, GeneralRun, Policy, TrivialCase
from .instance import RelationInstance


@dataclass
class StabilizationReport:
    i_max: int
    D: dict  # i -> D_i
    colon: dict  # i -> least m with p^m z_i in (x^i, y^i)R, None if above the cap
    n: int | None  # smallest n with D_i = 0 for n < i <= last step
    stabilized: bool
    last_step: int
    generators: dict = field(default_factory=dict)  # i -> number of generators of Q_i*
    stopped: str = ""  # why the run ended before i_max, if it did

    @property
    def status(self) -> str:
        return "stabilized" if self.stabilized else "not yet stabilized"

    def to_dict(self) -> dict:
        return {
            "i_max": self.i_max,
            "last_step": self.last_step,
            "n": self.n,
            "status": self.status,
            "D": {str(i): d for i, d in sorted(self.D.items())},
            "colon_exponent": {str(i): m for i, m in sorted(self.colon.items())},
            "generators": {str(i): g for i, g in sorted(self.generators.items())},
            "stopped": self.stopped,
        }


def stabilization_index(D: dict) -> int | None:
    """Smallest n with D_i = 0 for every recorded i > n (None when empty)."""
    if not D:
        return None
    n = max(D)
    for i in sorted(D, reverse=True):
        if D[i] != 0:
            break
        n = i - 1
    return n


def detect_stabilization(instance: RelationInstance, i_max: int, policy: Policy | None = None) -> StabilizationReport:
    """Keep stepping past termination up to i_max and record D_i.

    A run that stops early (cap exceeded, no D_i found) still yields a
    report over the steps it completed; ``stopped`` says why.
    """
    if i_max < 1:
        raise ValueError("i_max must be positive")
    policy = policy or Policy()
    run = GeneralRun(instance, Policy(max_L=max(policy.max_L, 64), max_steps=i_max, D_cap=policy.D_cap,
                                      colon_cap=policy.colon_cap, degree_bound=policy.degree_bound))
    stopped = ""
    try:
        run.run(stop_at_termination=False, max_steps=i_max)
    except TrivialCase:
        return StabilizationReport(i_max, {1: 0}, {1: 0}, 0, True, 1, stopped="trivial")
    except EngineError as exc:
        stopped = str(exc)
    D = {st.i: st.D for st in run.states}
    colon = {st.i: st.colon_exponent for st in run.states}
    gens = {st.i: 2 + (st.i - 1) for st in run.states}
    n = stabilization_index(D)
    last = max(D) if D else 0
    # a tail of zeros counts only if it is nonempty
    stabilized = n is not None and n < last
    return StabilizationReport(i_max, D, colon, n, stabilized, last, gens, stopped)
