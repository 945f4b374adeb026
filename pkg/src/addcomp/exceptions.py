"""Exception types shared across the package."""


class ConfigurationError(Exception):
    """A structural precondition on the problem setup is violated.

    Raised for things like basis dimensions that do not fit the sample
    size, or a variance space that fails the half-trace condition.
    """


class DesignDegeneracyError(Exception):
    """The target and nuisance spaces overlap for the given design.

    The procedure needs the sampled target basis and the sampled
    nuisance basis to intersect only at the origin; unlucky or
    degenerate design points can break that.
    """
