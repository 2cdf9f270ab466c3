"""Exception types shared across the package."""


class PromiseViolation(RuntimeError):
    """An update was requested at a vertex whose neighbourhood breaks its promise.

    This signals that ``(G, k)`` lies outside the regime the sampler supports;
    it is never raised for valid inputs in the supported regime.
    """

    def __init__(self, update, message, **stats):
        self.update = update
        self.stats = stats
        detail = ", ".join(f"{key}={value}" for key, value in stats.items())
        super().__init__(f"{update} promise violated: {message} ({detail})")


class InvariantViolation(AssertionError):
    """An internal invariant that the algorithm guarantees did not hold."""


class SeedingFailure(RuntimeError):
    """Moser-Tardos resampling hit its cap without finding a seeding set."""

    def __init__(self, resamples, violators):
        self.resamples = resamples
        self.violators = violators
        super().__init__(
            f"no seeding set after {resamples} resamplings ({violators} violators left)"
        )


class GraphParseError(ValueError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")
