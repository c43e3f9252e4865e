"""Exception hierarchy.

Every error type carries a short stable ``code`` string; the command-line
front end uses it when mapping failures to machine-readable reports.
"""


class DstkError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class DimensionMismatch(DstkError):
    code = "dimension-mismatch"


class DomainMismatch(DstkError):
    code = "domain-mismatch"


class SingularPencil(DstkError):
    code = "singular-pencil"


class SingularTransform(DstkError):
    code = "singular-transform"


class SingularD(DstkError):
    code = "singular-d"


class NotSquare(DstkError):
    code = "not-square"


class NotInvertibleTFM(DstkError):
    code = "not-invertible-tfm"


class EvalAtPole(DstkError):
    code = "eval-at-pole"


class IterationFailure(DstkError):
    code = "iteration-failure"


class SpectraNotDisjoint(DstkError):
    code = "spectra-not-disjoint"


class UnstablePair(DstkError):
    code = "unstable-pair"


class ZeroDenominator(DstkError):
    code = "zero-denominator"


class PoleOnBoundary(DstkError):
    code = "pole-on-boundary"


class RegionInvalid(DstkError):
    code = "region-invalid"


class PlacementFailure(DstkError):
    code = "placement-failure"


class ImproperInput(DstkError):
    code = "improper-input"


class UnstableInput(DstkError):
    code = "unstable-input"


class UnstableSystem(DstkError):
    code = "unstable-system"


class NonstrictlyProperContinuous(DstkError):
    code = "nonstrictly-proper-continuous"


class NonstrictlyProperF(DstkError):
    code = "nonstrictly-proper-f"


class BoundaryZeros(DstkError):
    code = "boundary-zeros"


class RankDeficiencyUnsupported(DstkError):
    code = "rank-deficiency-unsupported"


class UnsupportedShape(DstkError):
    code = "unsupported-shape"


class Incompatible(DstkError):
    code = "incompatible"


class ParseError(DstkError):
    code = "parse-error"
