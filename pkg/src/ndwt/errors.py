class DataError(ValueError):
    """Malformed or incompatible input data (bad container, shape mismatch)."""


class ResourceGuardError(MemoryError):
    """A requested matrix would exceed the configured element cap."""

    def __init__(self, required: int, allowed: int, what: str = "NDWT matrix"):
        self.required = int(required)
        self.allowed = int(allowed)
        super().__init__(
            f"{what} needs {self.required:,} elements but the cap allows "
            f"{self.allowed:,} (raise --max-elements or NDWT_MAX_ELEMENTS)"
        )
