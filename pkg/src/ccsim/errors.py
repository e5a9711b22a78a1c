class CircuitError(ValueError):
    """Structurally invalid gate or circuit."""


class CircuitParseError(CircuitError):
    def __init__(self, message, position=None):
        self.position = position
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class ResourceError(RuntimeError):
    """A dense representation would exceed the configured size cap."""


class DomainError(ValueError):
    """Operation undefined for this gate (non-Clifford, non-diagonal, ...)."""

    def __init__(self, message, gate_index=None):
        self.gate_index = gate_index
        super().__init__(message)


class UnconditionableError(ValueError):
    def __init__(self, probability):
        self.probability = probability
        super().__init__(f"condition has probability {probability!r}; cannot renormalize")


class ConsistencyError(ArithmeticError):
    """An internal identity that must hold exactly was violated."""
