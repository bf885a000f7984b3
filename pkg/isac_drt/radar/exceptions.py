from isac_drt._math.exceptions import (  # noqa: F401
    NonHermitianMatrixError,
    NotPositiveSemidefiniteError,
)


class TargetUnobservableError(ValueError):
    def __init__(self, message: str = "target unobservable") -> None:
        super().__init__(message)


class TangentBracketError(ValueError):
    def __init__(self, message: str = "tangent bracket failure") -> None:
        super().__init__(message)


class RankDeficientSnapshotsError(ValueError):
    pass
