from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(str, enum.Enum):
    UNSTABLE = "Unstable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    STABLE = "Stable"

    @property
    def severity(self) -> int:
        return {"Stable": 0, "StrictlySemistable": 1, "Unstable": 2}[self.value]

    @property
    def semistable(self) -> bool:
        return self is not Status.UNSTABLE


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a stability test.

    ``certificate`` is a JSON-ready dict: a destabilizing covector, a witness
    group element, or both.  Unstable verdicts always carry one.
    """

    status: Status
    certificate: dict[str, Any] | None = None
    endpoint_caveat: bool = False
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.status is Status.UNSTABLE and not self.certificate:
            raise ValueError("an Unstable verdict needs a certificate")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status.value,
            "certificate": self.certificate,
            "endpoint_caveat": self.endpoint_caveat,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def worst(verdicts) -> StabilityVerdict:
    best = None
    for v in verdicts:
        if best is None or v.status.severity > best.status.severity:
            best = v
    if best is None:
        raise ValueError("no verdicts")
    return best
