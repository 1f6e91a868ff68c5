"""Exception types shared across the package."""


class MagnonicError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateDenominator(MagnonicError):
    """Drive strength sits on the parametric resonance of the cavity response.

    The eliminated-cavity weight has denominator delta_a^2 + kappa_a^2 -
    omega^2; within eps_den of zero the steady-state reduction is singular.
    """


class ZeroCoupling(MagnonicError):
    """Operation requires a nonzero cavity-magnon coupling."""


class InadmissibleBranch(MagnonicError):
    """Requested quantity is defined only for admissible steady branches."""


class PhaseInconsistent(MagnonicError):
    """Steady-state phase equation has no unimodular solution.

    Signals an internal inconsistency: the candidate occupation does not
    actually solve the amplitude equations.
    """


class NoRealThreshold(MagnonicError):
    """Critical drive formula produced a negative radicand."""


class ConvergenceFailure(MagnonicError):
    """Iterative numerical routine failed to converge."""


class UnstableDrift(MagnonicError):
    """Covariance equation has no stationary solution for an unstable drift."""


class SingularSystem(MagnonicError):
    """Linear solve encountered a singular or near-singular system."""


class Diverged(MagnonicError):
    """Time integration left the trust region."""


class UnstableRegion(MagnonicError):
    """Requested point-wise quantity is undefined where no phase is stable."""
