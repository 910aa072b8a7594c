"""Verdict types shared by the positivity tests."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(str, enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    NUMERICALLY_POSITIVE = "numerically_positive"
    INCONCLUSIVE = "inconclusive"


@dataclass
class PositivityVerdict:
    """Outcome of one positivity test.

    ``witness`` is whatever object refutes the claim (a (k,0)-form, a
    Plücker point, a dual form); ``value`` is the quadratic-form value or
    minimum that decided; ``provenance`` names the criterion that fired.
    """

    cone: str
    strict: bool
    status: Status
    provenance: str
    value: float | None = None
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool | None:
        """True/False when decided, None when only numerical or inconclusive."""
        if self.status is Status.CERTIFIED:
            return True
        if self.status is Status.REFUTED:
            return False
        return None

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED
