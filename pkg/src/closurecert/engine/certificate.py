"""Closure certificates: construction, canonical serialization, verification.

A certificate is a monic f(T) = T^n + a_1 T^(n-1) + ... + a_n with n = p^L,
each a_j stored as a lift (polynomial in x, y, z and the root variable s)
together with its recorded p-valuation. Verification recomputes everything
from the instance alone:

* relation   -- p^N z - c x - d y vanishes and the instance matches;
* monic      -- a_0 = 1;
* degree     -- n = p^L, with L consistent with the mode;
* valuation[j]  -- recorded valuation equals the recomputed one and
                   clears the budget K - tau(j) (0 in simplified mode);
* membership[k] -- the k-th root-shift coefficient lies in y^k S;
* exponent_ledger -- v(a_i) + i/p^(K+1) >= 0 for every i.

Files are JSON with sorted keys; integers are decimal strings, rationals
"num/den", infinite valuations "inf", polynomials their canonical string.
"""
from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from ..padic import INF, check_root_scaling_exponents, tau_value
from ..poly import Polynomial, X, Y, Z, monomial_ideal_member, mono
from ..transforms import ShiftContext, build_b_coefficients
from .instance import ModelRing, RelationInstance

MODES = ("general", "cyclic", "simplified", "trivial")
FORMAT = "closure-certificate/1"


class CertificateFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalar and polynomial encoding
# ---------------------------------------------------------------------------


def encode_number(q) -> str:
    if q == INF:
        return "inf"
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decode_number(s: str):
    if not isinstance(s, str):
        raise CertificateFormatError(f"expected a number string, got {s!r}")
    if s == "inf":
        return INF
    try:
        q = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateFormatError(f"bad number {s!r}") from exc
    return q.numerator if q.denominator == 1 else q


_VARS = {"x", "y", "z", "T", "s"}


def parse_polynomial(text: str) -> Polynomial:
    """Parse a polynomial string such as ``-3/4*x^2*y + z*s + 7``.

    Only integer literals, the variables x, y, z, T, s, the operators
    + - * / and nonnegative integer powers are accepted; division is by
    nonzero constants only.
    """
    if not isinstance(text, str) or not text.strip():
        raise CertificateFormatError("empty polynomial")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise CertificateFormatError(f"cannot parse polynomial {text!r}") from exc
    return _eval(tree.body, text)


def _eval(node, text) -> Polynomial:
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return Polynomial.const(node.value)
    if isinstance(node, ast.Name) and node.id in _VARS:
        return Polynomial.var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, text)
        if isinstance(node.op, ast.Pow):
            e = node.right
            if not (isinstance(e, ast.Constant) and type(e.value) is int and e.value >= 0):
                raise CertificateFormatError(f"bad exponent in {text!r}")
            return left ** e.value
        right = _eval(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or right.is_zero():
                raise CertificateFormatError(f"division by a non-constant in {text!r}")
            return left.scale(1 / right.constant_term())
    raise CertificateFormatError(f"unsupported expression in {text!r}")


def instance_to_dict(inst: RelationInstance) -> dict:
    return {"p": str(inst.p), "N": str(inst.N), "K": str(inst.K), "c": str(inst.c), "d": str(inst.d)}


def instance_from_dict(d: dict) -> RelationInstance:
    try:
        return RelationInstance(int(d["p"]), int(d["N"]), int(d["K"]),
                                parse_polynomial(d["c"]), parse_polynomial(d["d"]))
    except KeyError as exc:
        raise CertificateFormatError(f"instance field {exc} missing") from exc
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    mode: str
    instance: RelationInstance
    L: int
    coefficients: list  # lifts a_0 .. a_n
    valuations: list  # recorded valuations of a_1 .. a_n
    steps: list = field(default_factory=list)  # per-step bookkeeping dicts
    status: str = "terminated"

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def threshold(self, j: int) -> Fraction:
        if self.mode == "simplified":
            return Fraction(0)
        return self.instance.K - tau_value(j, self.instance.p)

    def polynomial(self) -> Polynomial:
        n = self.degree
        out = Polynomial()
        for i, a in enumerate(self.coefficients):
            out = out + a * Polynomial.var("T", n - i)
        return out

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "mode": self.mode,
            "status": self.status,
            "instance": instance_to_dict(self.instance),
            "L": str(self.L),
            "degree": str(self.degree),
            "coefficients": [
                {"j": str(j), "lift": str(a),
                 **({"valuation": encode_number(self.valuations[j - 1]),
                     "threshold": encode_number(self.threshold(j))} if j else {})}
                for j, a in enumerate(self.coefficients)
            ],
            "steps": [_encode_tree(s) for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        try:
            if d.get("format") != FORMAT:
                raise CertificateFormatError(f"unknown format {d.get('format')!r}")
            mode = d["mode"]
            if mode not in MODES:
                raise CertificateFormatError(f"unknown mode {mode!r}")
            coeffs = sorted(d["coefficients"], key=lambda e: int(e["j"]))
            if [int(e["j"]) for e in coeffs] != list(range(len(coeffs))):
                raise CertificateFormatError("coefficient indices are not 0..n")
            return cls(
                mode=mode,
                instance=instance_from_dict(d["instance"]),
                L=int(d["L"]),
                coefficients=[parse_polynomial(e["lift"]) for e in coeffs],
                valuations=[decode_number(e["valuation"]) for e in coeffs[1:]],
                steps=list(d.get("steps", [])),
                status=d.get("status", "terminated"),
            )
        except CertificateFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"not JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        return cls.from_dict(d)


def _encode_tree(v):
    """Stable encoding for step bookkeeping: numbers become strings."""
    if isinstance(v, dict):
        return {str(k): _encode_tree(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode_tree(x) for x in v]
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, Fraction)) or v == INF:
        return encode_number(v)
    return str(v)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _recorded(ring: ModelRing, coeffs: list) -> list:
    return [ring.valuation(a) for a in coeffs[1:]]


def trivial_certificate(instance: RelationInstance, alpha: Polynomial) -> Certificate:
    """f(T) = (T - alpha)^(p^K) for z = alpha x + beta y, so L = K."""
    ring = ModelRing(instance)
    n = instance.p**instance.K
    apow = [Polynomial.const(1)]
    for _ in range(n):
        apow.append(ring.normalize(apow[-1] * (-alpha)))
    coeffs = [apow[j].scale(comb(n, j)) for j in range(n + 1)]
    return Certificate("trivial", instance, instance.K, coeffs, _recorded(ring, coeffs),
                       steps=[{"i": 1, "D": 0, "L": instance.K}], status="trivial")


def certificate_from_general(run) -> Certificate:
    final = run.states[-1]
    steps = []
    for st in run.states:
        steps.append({"i": st.i, "L": st.L, "D": st.D, "E": st.E, "u": st.u,
                      "colon_exponent": "none" if st.colon_exponent is None else st.colon_exponent,
                      "flags": dict(sorted(st.flags.items()))})
    status = "terminated" if final.i == run.p**final.L else "incomplete"
    return Certificate("general", run.inst, final.L, list(final.table), _recorded(run.ring, final.table), steps,
                       status)


def certificate_from_cyclic(run, mode: str = "cyclic") -> Certificate:
    ring = ModelRing(run.instance)
    steps = [{"i": s.i, "E": s.E, "divisor_check": s.divisor_check} for s in run.steps]
    return Certificate(mode, run.instance, run.L, list(run.table), _recorded(ring, run.table), steps)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    @property
    def failed(self) -> list:
        return [c.name for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failed": self.failed, "checks": [c.to_dict() for c in self.checks]}


def _expected_L(cert: Certificate):
    inst = cert.instance
    return {"trivial": inst.K, "cyclic": inst.K + inst.N, "simplified": 1}.get(cert.mode)


def verify_certificate(cert: Certificate, instance: RelationInstance | None = None) -> VerificationReport:
    inst = cert.instance
    checks = []
    same = instance is None or instance == inst
    holds = inst.relation_holds()
    checks.append(Check("relation", same and holds,
                        "" if same else f"certificate is for {inst}, expected {instance}"))
    if not same:
        inst = instance

    ring = ModelRing(inst)
    a = cert.coefficients
    n = len(a) - 1
    checks.append(Check("monic", n >= 1 and a[0] == Polynomial.const(1)))
    want_L = _expected_L(cert)
    deg_ok = n == inst.p**cert.L and (want_L is None or cert.L == want_L)
    checks.append(Check("degree", deg_ok, f"n = {n}, L = {cert.L}"))

    actual = []
    for j in range(1, n + 1):
        v = ring.valuation(a[j])
        actual.append(v)
        rec = cert.valuations[j - 1] if j - 1 < len(cert.valuations) else None
        thr = cert.threshold(j) if same else inst.K - tau_value(j, inst.p)
        ok = rec is not None and v == rec and v >= thr
        checks.append(Check(f"valuation[{j}]", ok,
                            f"recorded {encode_number(rec) if rec is not None else 'missing'}, "
                            f"actual {encode_number(v)}, threshold {encode_number(thr)}"))

    if n >= 1:
        ctx = ShiftContext(X, Y, ring.image(Z))
        images = [ring.image(c) for c in a]
        bs = build_b_coefficients(images, ctx, n)
        for k in range(1, n + 1):
            checks.append(Check(f"membership[{k}]", monomial_ideal_member(bs[k], (mono(y=k),))))

    ledger = check_root_scaling_exponents(inst.K, n, actual, inst.p) if n >= 1 else None
    checks.append(Check("exponent_ledger", ledger is not None and ledger.ok))
    return VerificationReport(checks)
