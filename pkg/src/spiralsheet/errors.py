"""Exception types shared across the package."""


class SpiralSheetError(Exception):
    """Base class for all spiralsheet errors."""


class OriginError(SpiralSheetError):
    """Evaluation requested at the origin (or with r <= 0), where every
    field and the strip map are undefined."""


class OnSpiral(SpiralSheetError):
    """Point lies on (or within tolerance of) one of the sheets.

    Attributes
    ----------
    spiral_index : int
        Index of the sheet that was hit.
    residual : float
        Value of a*(2*pi*j + theta_k - theta) + log(r) at the nearest
        integer j; zero means exactly on the sheet.
    """

    def __init__(self, spiral_index=0, residual=0.0):
        self.spiral_index = int(spiral_index)
        self.residual = float(residual)
        super().__init__(
            f"point on sheet {self.spiral_index} (residual {self.residual:.3e})"
        )


class OnCutLine(SpiralSheetError):
    """Strip point lies on one of the sheet-image lines, where the
    piecewise field formulas are one-sided."""

    def __init__(self, line_index=0):
        self.line_index = int(line_index)
        super().__init__(f"point on strip line {self.line_index}")


class ResonantParameter(SpiralSheetError):
    """sin(4*pi*a^2/(1+a^2)) vanishes, so the closed strip-solution
    constant is undefined (a^2 in {1/3, 1, 3})."""


class SingularSystem(SpiralSheetError):
    """The matching linear system is singular or numerically rank
    deficient at the requested parameters."""


class ProbeTooClose(SpiralSheetError):
    """A jump-probe offset point is closer to some other sheet (or turn)
    than to the probed one, so the one-sided limit is contaminated."""
