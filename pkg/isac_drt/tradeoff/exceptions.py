class EmptyDesignGridError(ValueError):
    def __init__(self, message: str = "empty design grid") -> None:
        super().__init__(message)


class InfeasibleBudgetError(ValueError):
    def __init__(self, message: str = "infeasible budget") -> None:
        super().__init__(message)


class InconsistentEnvelopeError(ValueError):
    pass


class OffFrontAtomError(ValueError):
    pass
