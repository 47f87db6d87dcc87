"""Verdict values returned by every checker."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    NOT_APPLICABLE = "NotApplicable"
    SKIPPED = "Skipped"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: dict[str, Any] | None = None
    note: str = ""
    grid: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.FAILS and not self.witness:
            raise ValueError("a failing verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def label(self) -> str:
        if self.status is Status.HOLDS and self.grid:
            return "Holds (grid)"
        return self.status.value

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.label}
        if self.witness:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        if self.details:
            out["details"] = self.details
        return out

    def __bool__(self):
        return self.holds


def holds(note: str = "", grid: bool = False, **details) -> Verdict:
    return Verdict(Status.HOLDS, note=note, grid=grid, details=details)


def fails(witness: dict[str, Any], note: str = "", grid: bool = False, **details) -> Verdict:
    return Verdict(Status.FAILS, witness=witness, note=note, grid=grid, details=details)


def not_applicable(note: str) -> Verdict:
    return Verdict(Status.NOT_APPLICABLE, note=note)


def skipped(reason: str) -> Verdict:
    return Verdict(Status.SKIPPED, note=reason)
