"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL`` line and the lines are
repeated in the terminal summary. Criteria 8 and 9 ask for a terminating
certificate on 2z = x + y; no such certificate exists on the model ring
(see ``test_engine.test_degree_two_certificate_is_impossible_for_main_instance``),
so those two are strict xfails: they report FAIL, and the suite turns red
if they ever start passing.
"""
import time

import pytest

from closurecert import sweeps
from closurecert.cli import main
from closurecert.engine import (EngineError, GeneralRun, Policy, RelationInstance, TrivialCase,
                                certificate_from_cyclic, certificate_from_general, run_cyclic, run_simplified,
                                trivial_certificate, verify_certificate)
from closurecert.poly import Polynomial

from conftest import CRITERIA

SEED = 0
MAIN = RelationInstance(2, 1, 0, Polynomial.const(1), Polynomial.const(1))


def record(n: int, ok: bool, detail: str = "", started: float | None = None) -> None:
    took = f" [{time.perf_counter() - started:.1f}s]" if started is not None else ""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}{took}" + (f"  {detail}" if detail else "")
    CRITERIA[n] = line
    print(line)


def sweep_detail(*results) -> str:
    bad = [r for r in results if not r.ok]
    if not bad:
        return f"{sum(r.checked for r in results)} cases"
    return "; ".join(f"{r.name}: {r.failure_count} failures, first {r.failures[0]}" for r in bad)


def run_sweeps(n: int, budget: float, *fns):
    t0 = time.perf_counter()
    results = [f() for f in fns]
    took = time.perf_counter() - t0
    ok = all(r.ok for r in results) and took < budget
    record(n, ok, sweep_detail(*results) + ("" if took < budget else f"; over {budget:.0f}s budget"), t0)
    assert ok


def test_criterion_1_binomial_oracle():
    run_sweeps(1, 30, lambda: sweeps.sweep_binomial_oracle(1000, (2, 3, 5)))


def test_criterion_2_tau_identities():
    bounds = {2: 5, 3: 5, 5: 3, 7: 3}
    run_sweeps(2, 60, *[lambda v=v: sweeps.sweep_tau_identities(bounds, variants=(v,)) for v in "abc"])


def test_criterion_3_tau_budget():
    run_sweeps(3, 10, lambda: sweeps.sweep_tau_budget((-1, 0, 1, 2, 3, 4), (2, 3, 5)))


def test_criterion_4_root_shift():
    run_sweeps(4, 60, lambda: sweeps.sweep_root_shift(200, (2, 3), SEED, max_degree=8))


def test_criterion_5_completion():
    run_sweeps(5, 60, lambda: sweeps.sweep_completion(100, (2, 3), SEED, max_degree=8))


def test_criterion_6_lift_and_shift():
    run_sweeps(6, 120, lambda: sweeps.sweep_lift(100, (2, 3), SEED), lambda: sweeps.sweep_shift(100, (2, 3), SEED))


def test_criterion_7_exponent_identities():
    run_sweeps(7, 30, lambda: sweeps.sweep_exponent_identities(64, (2, 3, 5)))


def general_certificate(instance):
    run = GeneralRun(instance, Policy())
    try:
        run.run()
    except TrivialCase as t:
        return trivial_certificate(instance, t.alpha), ""
    except EngineError as exc:
        return None, f"general: {exc}"
    return certificate_from_general(run), ""


def cyclic_certificate(instance, simplified=False):
    try:
        run = run_simplified(instance) if simplified else run_cyclic(instance)
    except TrivialCase as t:
        return trivial_certificate(instance, t.alpha), ""
    except EngineError as exc:
        return None, f"{'simplified' if simplified else 'cyclic'}: {exc}"
    return certificate_from_cyclic(run, "simplified" if simplified else "cyclic"), ""


def verified(cert, why):
    if cert is None:
        return False, why
    rep = verify_certificate(cert, MAIN)
    return rep.ok, ", ".join(rep.failed)


@pytest.mark.xfail(strict=True, reason="no terminating certificate exists for 2z = x + y on the model ring")
def test_criterion_8_end_to_end_general():
    t0 = time.perf_counter()
    ok, detail = verified(*general_certificate(MAIN))
    ok = ok and time.perf_counter() - t0 < 300
    record(8, ok, detail, t0)
    assert ok


@pytest.mark.xfail(strict=True, reason="no terminating certificate exists for 2z = x + y on the model ring")
def test_criterion_9_simplified_and_cyclic():
    t0 = time.perf_counter()
    simp = cyclic_certificate(MAIN, simplified=True)
    outcomes = [verified(*simp), verified(*cyclic_certificate(MAIN)), verified(*general_certificate(MAIN))]
    degree_ok = simp[0] is not None and simp[0].L == 1 and simp[0].degree == 2
    ok = degree_ok and all(o for o, _ in outcomes) and time.perf_counter() - t0 < 120
    record(9, ok, "; ".join(d for o, d in outcomes if not o), t0)
    assert ok


def test_criterion_8_fault_injection():
    # the main instance yields no certificate, so perturbations run on
    # trivial-case certificates, where every check is exercised
    from closurecert.engine import Certificate, run_general
    from closurecert.engine.certificate import decode_number, encode_number
    t0 = time.perf_counter()
    problems = []
    for args in [(2, 1, 0, 2, 2), (2, 1, 2, 2, 2), (3, 1, 1, 3, 6)]:
        inst = RelationInstance(*args[:3], Polynomial.const(args[3]), Polynomial.const(args[4]))
        cert = run_general(inst)
        if not verify_certificate(cert, inst).ok:
            problems.append(f"{args}: clean certificate fails")
        for j in range(1, cert.degree + 1):
            d = cert.to_dict()
            v = decode_number(d["coefficients"][j]["valuation"])
            if v == float("inf"):
                continue
            d["coefficients"][j]["valuation"] = encode_number(v - 1)
            failed = verify_certificate(Certificate.from_dict(d), inst).failed
            if failed != [f"valuation[{j}]"]:
                problems.append(f"{args} valuation[{j}] -> {failed}")
        bumped = Certificate.from_json(cert.to_json())
        v = cert.valuations[0]
        bumped.coefficients[1] = bumped.coefficients[1] + Polynomial.const(inst.p ** (int(v) + 1))
        failed = verify_certificate(bumped, inst).failed
        if "membership[1]" not in failed or any(not f.startswith("membership") for f in failed):
            problems.append(f"{args} a_1 perturbed -> {failed}")
        if cert.degree == 1 and failed != ["membership[1]"]:
            problems.append(f"{args} a_1 perturbed -> {failed}")
    ok = not problems
    line = f"criterion 8 (fault injection): {'PASS' if ok else 'FAIL'} [{time.perf_counter() - t0:.1f}s]"
    CRITERIA[8.5] = line + ("  " + "; ".join(problems) if problems else "")
    print(CRITERIA[8.5])
    assert ok


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    snapshots = []
    for rep in range(2):
        out = tmp_path / "out"
        snap = [r.to_dict() for r in (
            sweeps.sweep_root_shift(200, (2, 3), SEED, max_degree=8),
            sweeps.sweep_completion(100, (2, 3), SEED, max_degree=8),
            sweeps.sweep_lift(100, (2, 3), SEED),
            sweeps.sweep_shift(100, (2, 3), SEED),
            sweeps.sweep_exponent_identities(64, (2, 3, 5)),
        )]
        inst = tmp_path / "main.txt"
        inst.write_text("p=2 N=1 K=0 c=1 d=1\n")
        for mode in ("general", "cyclic", "simplified"):
            main(["--out-dir", str(out), "run-instance", str(inst), "--mode", mode])
            cert = out / "certificate.json"
            snap.append((mode, (out / "run-instance-report.json").read_bytes(),
                         cert.read_bytes() if cert.exists() else None))
        snapshots.append(snap)
    ok = snapshots[0] == snapshots[1]
    record(10, ok, "" if ok else "reports differ between runs", t0)
    assert ok
