"""Command-line front end.

    closurecert verify-lemmas       valuation and transform sweeps
    closurecert run-instance FILE   build and verify a certificate
    closurecert verify-certificate CERT INSTANCE
    closurecert sweep               exponent identities and stabilization profiles

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
or I/O errors. Reports and certificates go to ``--out-dir``, else to
$CLOSURECERT_OUT_DIR, else to ./closurecert-out.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

from . import sweeps
from .engine.certificate import (Certificate, CertificateFormatError, certificate_from_cyclic,
                                 certificate_from_general, parse_polynomial, trivial_certificate,
                                 verify_certificate)
from .engine.cyclic import run_cyclic, run_simplified
from .engine.general import EngineError, GeneralRun, Policy, TrivialCase
from .engine.instance import InstanceError, RelationInstance
from .engine.stabilization import detect_stabilization
from .padic import is_prime, tau_value

OUT_ENV = "CLOSURECERT_OUT_DIR"
DEFAULT_OUT = "closurecert-out"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------

_KEY = re.compile(r"(?:^|\s)(p|N|K|c|d)\s*=")
_REQUIRED = ("p", "N", "K", "c", "d")


def parse_instance_text(text: str) -> RelationInstance:
    """``key=value`` pairs for p, N, K, c, d separated by whitespace or
    newlines; ``#`` starts a comment. Values of c and d may contain spaces."""
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines())
    matches = list(_KEY.finditer(body))
    if not matches:
        raise UsageError("instance file has no key=value pairs")
    if body[: matches[0].start()].strip():
        raise UsageError(f"unexpected text before first key: {body[: matches[0].start()].strip()!r}")
    fields: dict = {}
    for m, nxt in zip(matches, matches[1:] + [None]):
        key = m.group(1)
        if key in fields:
            raise UsageError(f"duplicate key {key}")
        fields[key] = body[m.end(): nxt.start() if nxt else len(body)].strip()
    missing = [k for k in _REQUIRED if k not in fields or not fields[k]]
    if missing:
        raise UsageError(f"instance file is missing {', '.join(missing)}")
    try:
        ints = {k: int(fields[k]) for k in ("p", "N", "K")}
    except ValueError as exc:
        raise UsageError(f"p, N, K must be integers: {exc}") from exc
    try:
        return RelationInstance(ints["p"], ints["N"], ints["K"],
                                parse_polynomial(fields["c"]), parse_polynomial(fields["d"]))
    except (CertificateFormatError, InstanceError) as exc:
        raise UsageError(str(exc)) from exc


def read_instance(path: str) -> RelationInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_instance_text(text)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def out_dir(args) -> Path:
    return Path(args.out_dir or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _config_echo(args) -> dict:
    skip = {"func", "out_dir", "timing"}
    return {k: (v if isinstance(v, (int, str, bool, type(None))) else str(v))
            for k, v in sorted(vars(args).items()) if k not in skip}


def make_report(command: str, args, checks: list, extra: dict | None = None, started: float | None = None) -> dict:
    rep = {
        "command": command,
        "config": _config_echo(args),
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }
    if extra:
        rep.update(extra)
    if getattr(args, "timing", False) and started is not None:
        rep["timing_seconds"] = round(time.perf_counter() - started, 3)
    return rep


def write_json(path: Path, payload) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True, indent=1) + "\n"
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _emit(args, name: str, report: dict) -> int:
    target = Path(args.report) if getattr(args, "report", None) else out_dir(args) / f"{name}-report.json"
    write_json(target, report)
    for c in report["checks"]:
        detail = f"  ({c['detail']})" if not c["ok"] and c.get("detail") else ""
        print(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}{detail}")
    print(f"report: {target}")
    return EXIT_OK if report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def int_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def int_range(text: str) -> list:
    """``a..b`` (inclusive) or a comma list."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    return int_list(text)


def prime_bounds(text: str) -> dict:
    """``2:5,3:5,5:3`` -> {2: 5, 3: 5, 5: 3}."""
    out = {}
    for part in filter(None, (t.strip() for t in text.split(","))):
        try:
            p, L = part.split(":")
            out[int(p)] = int(L)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected p:L pairs, got {part!r}") from exc
    return out


def _faulty_tau(n: int, p: int):
    # off by one in the argument
    return tau_value(n + 1, p)


def _policy(args) -> Policy:
    return Policy(max_L=args.max_L, max_steps=args.max_steps, D_cap=args.D_cap)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify_lemmas(args) -> int:
    started = time.perf_counter()
    tau_fn = _faulty_tau if args.inject_fault == "tau-off-by-one" else tau_value
    primes = args.primes
    bounds = {p: L for p, L in args.L_max.items() if p in primes} if primes else {}
    results = []
    if primes:
        results.append(sweeps.sweep_binomial_oracle(args.n_max, primes))
    for v in ("a", "b", "c"):
        results.append(sweeps.sweep_tau_identities(bounds, tau_fn, variants=(v,)))
    if primes and args.K_range:
        results.append(sweeps.sweep_tau_budget(args.K_range, primes))
    rand_primes = [p for p in primes if p in (2, 3, 5, 7)]
    if rand_primes and args.count:
        results.append(sweeps.sweep_root_shift(args.count, rand_primes, args.seed))
        results.append(sweeps.sweep_completion(args.count, rand_primes, args.seed))
        results.append(sweeps.sweep_lift(args.count, rand_primes, args.seed))
        results.append(sweeps.sweep_shift(args.count, rand_primes, args.seed))
    checks = [r.to_dict() for r in results if r.checked]
    return _emit(args, "verify-lemmas", make_report("verify-lemmas", args, checks, started=started))


def build_certificate(instance: RelationInstance, mode: str, policy: Policy) -> Certificate:
    """Run the requested constructor; the trivial case short-circuits in every mode."""
    try:
        if mode == "general":
            run = GeneralRun(instance, policy)
            run.run()
            return certificate_from_general(run)
        if mode == "cyclic":
            return certificate_from_cyclic(run_cyclic(instance), "cyclic")
        return certificate_from_cyclic(run_simplified(instance), "simplified")
    except TrivialCase as t:
        return trivial_certificate(instance, t.alpha)


def cmd_run_instance(args) -> int:
    started = time.perf_counter()
    instance = read_instance(args.instance)
    if args.mode == "simplified" and instance.N != 1:
        raise UsageError(f"simplified mode needs N = 1, the instance has N = {instance.N}")
    policy = _policy(args)
    checks, extra = [], {"instance": str(instance)}
    try:
        cert = build_certificate(instance, args.mode, policy)
    except EngineError as exc:
        checks.append({"name": "construction", "ok": False, "detail": str(exc),
                       "where": {k: v for k, v in sorted(exc.where.items())}})
        return _emit(args, "run-instance", make_report("run-instance", args, checks, extra, started))
    target = Path(args.certificate) if args.certificate else out_dir(args) / "certificate.json"
    write_json(target, cert.to_json())
    checks.append({"name": "construction", "ok": True, "detail": f"mode {cert.mode}, degree {cert.degree}"})
    ver = verify_certificate(cert, instance)
    checks.extend(c.to_dict() for c in ver.checks)
    extra["certificate"] = str(target)
    return _emit(args, "run-instance", make_report("run-instance", args, checks, extra, started))


def cmd_verify_certificate(args) -> int:
    started = time.perf_counter()
    instance = read_instance(args.instance)
    try:
        text = Path(args.certificate).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.certificate}: {exc.strerror}") from exc
    try:
        cert = Certificate.from_json(text)
    except CertificateFormatError as exc:
        raise UsageError(f"certificate schema violation: {exc}") from exc
    ver = verify_certificate(cert, instance)
    checks = [c.to_dict() for c in ver.checks]
    checks.append({"name": "round_trip", "ok": cert.to_json() == Certificate.from_json(cert.to_json()).to_json()})
    return _emit(args, "verify-certificate", make_report("verify-certificate", args, checks, started=started))


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    checks = []
    if args.primes and args.i_max:
        checks.append(sweeps.sweep_exponent_identities(args.i_max, args.primes, args.K_range or (0,)).to_dict())
    profiles = {}
    for path in args.instances:
        inst = read_instance(path)
        rep = detect_stabilization(inst, args.stab_i_max, _policy(args))
        profiles[path] = rep.to_dict()
        checks.append({"name": f"stabilization[{path}]", "ok": rep.stabilized, "detail": rep.status})
    extra = {"stabilization": profiles} if profiles else None
    return _emit(args, "sweep", make_report("sweep", args, checks, extra, started))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="closurecert", description="closure certificate toolkit")
    ap.add_argument("--out-dir", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    ap.add_argument("--timing", action="store_true", help="add wall-clock time to reports")
    sub = ap.add_subparsers(dest="command", required=True)

    def policy_flags(p):
        p.add_argument("--max-L", dest="max_L", type=int, default=6)
        p.add_argument("--max-steps", type=int, default=64)
        p.add_argument("--D-cap", dest="D_cap", type=int, default=None, help="default 2N")

    v = sub.add_parser("verify-lemmas", help="valuation identities and transform checks")
    v.add_argument("--primes", type=int_list, default=[2, 3, 5])
    v.add_argument("--n-max", type=int, default=1000)
    v.add_argument("--L-max", dest="L_max", type=prime_bounds, default=prime_bounds("2:5,3:5,5:3,7:3"))
    v.add_argument("--K-range", dest="K_range", type=int_range, default=list(range(-1, 5)))
    v.add_argument("--count", type=int, default=200, help="random cases per transform")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-fault", choices=["tau-off-by-one"], default=None)
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify_lemmas)

    r = sub.add_parser("run-instance", help="build a certificate for an instance file")
    r.add_argument("instance")
    r.add_argument("--mode", choices=["general", "cyclic", "simplified"], default="general")
    r.add_argument("--certificate", help="certificate path (default OUT/certificate.json)")
    r.add_argument("--report")
    policy_flags(r)
    r.set_defaults(func=cmd_run_instance)

    c = sub.add_parser("verify-certificate", help="re-verify a certificate against an instance")
    c.add_argument("certificate")
    c.add_argument("instance")
    c.add_argument("--report")
    c.set_defaults(func=cmd_verify_certificate)

    s = sub.add_parser("sweep", help="exponent identities and stabilization profiles")
    s.add_argument("--primes", type=int_list, default=[2, 3, 5])
    s.add_argument("--i-max", type=int, default=64)
    s.add_argument("--K-range", dest="K_range", type=int_range, default=[0, 1, 2])
    s.add_argument("--instances", nargs="*", default=[])
    s.add_argument("--stab-i-max", type=int, default=8)
    s.add_argument("--report")
    policy_flags(s)
    s.set_defaults(func=cmd_sweep)
    return ap


def _validate(args) -> None:
    for name in ("n_max", "count", "i_max", "max_steps", "stab_i_max", "seed"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise UsageError(f"--{name.replace('_', '-')} must be nonnegative")
    for p in getattr(args, "primes", []) or []:
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
