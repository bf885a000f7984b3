class ConfigFieldError(ValueError):
    """
    Missing or malformed field of a configuration document
    """

    def __init__(self, field: str, reason: str) -> None:
        self.field = field
        self.reason = reason
        super().__init__(f"invalid field '{field}': {reason}")


class TableFormatError(ValueError):
    pass
