class NonHermitianMatrixError(ValueError):
    pass


class NotPositiveSemidefiniteError(ValueError):
    pass
