"""Exception types shared across the toolkit."""


class StegError(Exception):
    """Base class for toolkit errors."""


class FormatError(StegError):
    """A file does not follow its documented byte layout."""


class CapacityError(StegError):
    """The cover cannot hold the requested payload."""

    def __init__(self, required: int, available: int, detail: str = ""):
        self.required = required
        self.available = available
        msg = f"capacity exceeded: required {required} coefficients, available {available}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class CorruptStegoError(StegError):
    """Extraction failed because the stego data is inconsistent."""
