"""Exception hierarchy.

Every error carries a short machine-readable ``category`` that the CLI
reports on failure.
"""


class OpaError(Exception):
    category = "opa_error"


class MissingKey(OpaError):
    category = "missing_key"

    def __init__(self, name):
        super().__init__(f"required key {name!r} not present")
        self.name = name


class UnitParseError(OpaError):
    category = "unit_parse"

    def __init__(self, key, detail=""):
        msg = f"cannot parse value/unit for {key!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.key = key


class InvariantViolation(OpaError):
    category = "invariant"


class SingularInput(OpaError):
    category = "singular_input"


class AboveThreshold(OpaError):
    category = "above_threshold"


class ZeroCoupling(OpaError):
    category = "zero_coupling"


class SingularSystem(OpaError):
    category = "singular_system"

    def __init__(self, omega):
        super().__init__(f"system matrix singular at Omega = {omega!r} rad/s")
        self.omega = omega


class AssumptionViolated(OpaError):
    category = "assumption_violated"

    def __init__(self, violations):
        super().__init__("limiting-case assumptions violated: " + "; ".join(violations))
        self.violations = list(violations)


class UnstableIntegration(OpaError):
    category = "unstable_integration"


class NoCutoffFound(OpaError):
    category = "no_cutoff"


class ZeroFrequency(OpaError):
    category = "zero_frequency"


class MissingFilterLinewidth(OpaError):
    category = "missing_filter_linewidth"
