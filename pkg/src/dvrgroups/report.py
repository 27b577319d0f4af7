from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of an exact identity or bound check."""

    name: str
    holds: bool
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        return {"check": self.name, "holds": self.holds, **self.details}
