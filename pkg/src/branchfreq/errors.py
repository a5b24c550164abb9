"""Exception types shared across the package."""


class BranchFreqError(Exception):
    """Base class for all branchfreq errors."""


class DivergentMass(BranchFreqError):
    """An integral against a jump measure diverges."""


class DegenerateInput(BranchFreqError):
    """Inputs do not identify the quantity being estimated."""


class InvalidTruncation(BranchFreqError):
    """A radial truncation window has zero or infinite mass."""


class BoundaryRegion(BranchFreqError):
    """A simplex region reaches the w1 + w2 = 1 boundary where mass diverges."""


class RegimeMismatch(BranchFreqError):
    """Parameters are inconsistent with the requested simulation regime."""


class InvalidConfig(BranchFreqError):
    """A simulation or experiment configuration is malformed."""


class InvalidPath(BranchFreqError):
    """A path violates the preconditions of a path operation."""


class BeyondHorizon(BranchFreqError):
    """A changed-time query lies at or past the final value of the clock."""


class InvalidState(BranchFreqError):
    """A state value lies outside the process state space."""


class NotClosed(BranchFreqError):
    """A moment system is not closed and cannot be propagated as a linear ODE."""
