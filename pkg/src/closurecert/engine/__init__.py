"""Certificate constructors, verification and the stabilization detector."""
from .certificate import (Certificate, CertificateFormatError, VerificationReport, certificate_from_cyclic,
                          certificate_from_general, parse_polynomial, trivial_certificate, verify_certificate)
from .cyclic import CyclicFailure, CyclicRun, run_cyclic, run_simplified
from .general import CapExceeded, EngineError, GeneralRun, Policy, StepState, TrivialCase, init_step
from .instance import InstanceError, ModelRing, RelationInstance
from .stabilization import StabilizationReport, detect_stabilization

__all__ = [
    "Certificate", "CertificateFormatError", "VerificationReport", "certificate_from_cyclic",
    "certificate_from_general", "parse_polynomial", "trivial_certificate", "verify_certificate",
    "CyclicFailure", "CyclicRun", "run_cyclic", "run_simplified",
    "CapExceeded", "EngineError", "GeneralRun", "Policy", "StepState", "TrivialCase", "init_step",
    "InstanceError", "ModelRing", "RelationInstance",
    "StabilizationReport", "detect_stabilization", "run_general",
]


def run_general(instance: RelationInstance, policy: Policy | None = None) -> Certificate:
    """Run the general recursion to termination and package the result.

    The trivial case (z already in (x, y)R) returns (T - alpha)^(p^K).
    """
    try:
        run = GeneralRun(instance, policy)
        run.run()
    except TrivialCase as t:
        return trivial_certificate(instance, t.alpha)
    return certificate_from_general(run)
