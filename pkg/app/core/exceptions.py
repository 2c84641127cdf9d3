class BristleBotError(Exception):
    """Base for every failure the toolkit raises on purpose.

    ``exit_code`` is what the CLI returns when the error escapes a command:
    1 for invalid input, 2 for numerical failure, 3 for a sweep that lost too
    many points.

    ``partial`` is set by the integrator to the trajectory recorded before
    the failure, so callers can still write what was computed.
    """

    exit_code = 2
    partial = None


class InvalidParameters(BristleBotError):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(f"Invalid parameters: {detail}")


class NoConvergence(BristleBotError):
    def __init__(self, what: str, iterations: int, residual: float):
        super().__init__(
            f"{what} did not converge after {iterations} iterations "
            f"(residual {residual:.3e}); check for pathological parameters such as kappa ~ 0"
        )


class StaticallyUnstable(BristleBotError):
    def __init__(self, name: str, omega_squared: float):
        super().__init__(
            f"{name} squared is negative ({omega_squared:.6g} rad^2/s^2): "
            "the configuration is statically unstable"
        )


class GeometricLock(BristleBotError):
    def __init__(self, direction: str, denominator: float):
        super().__init__(
            f"{direction} slip is geometrically locked (1 + mu_k*sgn*tan(theta) = "
            f"{denominator:.3e} <= 0, i.e. mu_k*tan(theta) >= 1)"
        )


class StepSizeUnderflow(BristleBotError):
    def __init__(self, t: float, regime: str, message: str = ""):
        suffix = f": {message}" if message else ""
        super().__init__(f"Step size underflow at t={t:.9g} s in {regime}{suffix}")


class ChatterLimitExceeded(BristleBotError):
    def __init__(self, t: float, count: int, window: float):
        super().__init__(
            f"Chatter limit exceeded at t={t:.9g} s: {count} transitions within one "
            f"drive period ({window:.3e} s)"
        )


class PartialSweepFailure(BristleBotError):
    exit_code = 3

    def __init__(self, failed: int, total: int):
        super().__init__(f"{failed} of {total} sweep points failed")
        self.failed = failed
        self.total = total


class FrictionOrderingWarning(UserWarning):
    """mu_k > mu_s: accepted, but unusual enough to say so."""
