"""Domain errors. All derive from ValueError."""
from typing import Optional

class InfeasibleInstanceError(ValueError):
    """No schedule meets the deadline; carries the minimum achievable delay."""

    def __init__(self, min_delay: float, deadline: float):
        self.min_delay = min_delay
        self.deadline = deadline
        super().__init__(
            f"Instance is infeasible: minimum delay {min_delay!r} exceeds deadline {deadline!r}"
        )

class FlipPreconditionError(ValueError):
    """A flip was requested where its preconditions do not hold."""

    def __init__(self, precondition: str, vertex: Optional[int] = None):
        self.precondition = precondition
        self.vertex = vertex
        super().__init__(f"Flip precondition violated at vertex {vertex}: {precondition}")

class OracleLimitError(ValueError):
    """An exhaustive search was asked for an instance outside its guard."""
