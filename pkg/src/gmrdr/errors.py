class ParameterError(ValueError):
    """Raised when model, distortion or experiment inputs are invalid."""
