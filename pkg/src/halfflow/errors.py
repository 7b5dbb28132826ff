"""Exception hierarchy for the halfflow solver."""


class HalfflowError(Exception):
    """Base class for all errors raised by this package."""


class InstanceSyntaxError(HalfflowError):
    """Input text is not well-formed (bad JSON, wrong types, missing keys)."""


class ValidationError(HalfflowError):
    """Instance violates a structural invariant (loop, duplicate edge, ...)."""


class UnboundedInstance(HalfflowError):
    """An edge joins two terminals: the optimum is unbounded."""


class DisjointnessError(HalfflowError):
    """The two sets of a signed pair are not disjoint."""


class NotInBase(HalfflowError):
    """Vector is outside the base polyhedron of the block bound."""


class CutShapeError(HalfflowError):
    """A cut does not separate source from sink as required."""


class Unbounded(HalfflowError):
    """An augmenting structure with unlimited capacity was found."""


class InfeasiblePotential(HalfflowError):
    """A potential violates the per-edge feasibility constraint."""


class DegenerateInstance(HalfflowError):
    """The instance geometry violates the degree/cost preconditions."""


class NotOptimalYet(HalfflowError):
    """Circulation extraction requested before the source cut is minimal."""


class NormalizationFailed(HalfflowError):
    """The normalized minimum cut does not satisfy the expected patterns."""


class PatternError(HalfflowError):
    """A cut trace on a node group matches no potential-update pattern."""


class InfiniteCut(HalfflowError):
    """Cut capacity is infinite; the corresponding update is infeasible."""


class SupportInconsistent(HalfflowError):
    """Path extraction could not consume the support; upstream bug."""


class InfeasibleDual(HalfflowError):
    """The dual vector fails the per-path covering constraint."""


class TooLarge(HalfflowError):
    """Brute-force oracle would exceed its size guard."""
