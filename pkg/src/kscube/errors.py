"""Exception hierarchy.

Every exception carries an ``exit_code`` so the command line can map failures
onto its stable exit codes: 1 for a failed verification claim, 2 for bad
input, 3 for a resource limit.
"""

from __future__ import annotations


class KSError(Exception):
    exit_code = 2


class InputError(KSError):
    exit_code = 2


class ParseError(InputError):
    pass


class ZeroVector(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotAState(InputError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("not a density matrix: " + ", ".join(self.violations))


class DuplicateRay(InputError):
    pass


class KTooLarge(InputError):
    pass


class WeightMismatch(InputError):
    pass


class PlanMismatch(InputError):
    pass


class NonCommutingPair(InputError):
    def __init__(self, u: str, v: str):
        self.pair = (u, v)
        super().__init__(f"observables for {u!r} and {v!r} do not commute")


class TooLarge(KSError):
    exit_code = 3


class VerificationError(KSError):
    exit_code = 1


class GraphMismatch(VerificationError):
    def __init__(self, message: str, pairs: list[tuple[str, str]] | None = None):
        self.pairs = list(pairs or [])
        if self.pairs:
            shown = ", ".join(f"{u}-{v}" for u, v in self.pairs[:8])
            message = f"{message} (offending pairs: {shown})"
        super().__init__(message)


class Uncolorable(VerificationError):
    pass


class PhaseConstraintViolated(VerificationError):
    pass


class VerificationFailed(VerificationError):
    pass
