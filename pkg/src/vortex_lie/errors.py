"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameter, grid size, or configuration key."""


class DataIntegrityError(ValueError):
    """Input data violates a structural invariant (e.g. Hermitian symmetry)."""


class InputError(ValueError):
    """Malformed input to a diagnostic or writer (too few frames, ragged series, ...)."""


class FilamentDegenerateError(ArithmeticError):
    """The parametrization speed |x_xi| fell below the allowed threshold."""

    def __init__(self, min_speed, location, stage=None, time=None):
        self.min_speed = float(min_speed)
        self.location = float(location)
        self.stage = stage
        self.time = time
        msg = f"filament degenerate: min|x_xi| = {self.min_speed:.3e} at xi = {self.location:.6f}"
        if stage is not None:
            msg += f" (stage {stage})"
        if time is not None:
            msg += f" at t = {time:.6g}"
        super().__init__(msg)


class HasimotoUndefinedError(ArithmeticError):
    """Curvature vanishes somewhere, so the Hasimoto field is undefined.

    The geometry report computed without the complex field is attached as
    ``report``.
    """

    def __init__(self, min_curvature, report=None):
        self.min_curvature = float(min_curvature)
        self.report = report
        super().__init__(f"Hasimoto transform undefined: min curvature {self.min_curvature:.3e}")


class PicardDivergedError(ArithmeticError):
    def __init__(self, time, iterations, defect):
        self.time = float(time)
        self.iterations = int(iterations)
        self.defect = float(defect)
        super().__init__(
            f"Picard iteration did not converge at t = {self.time:.6g}: "
            f"defect {self.defect:.3e} after {self.iterations} iterations"
        )
