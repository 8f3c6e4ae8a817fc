"""Check records shared by the verification routines and the CLI."""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Iterable, Optional

__all__ = ["PASS", "FAIL", "SKIPPED", "UNDECIDED", "Check", "Checks"]

PASS, FAIL, SKIPPED, UNDECIDED = "pass", "fail", "skipped", "undecided"


@dataclass(frozen=True)
class Check:
    id: str
    status: str
    detail: str = ""
    witness: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.status in (PASS, SKIPPED)

    def to_dict(self) -> dict:
        d = {"id": self.id, "status": self.status}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = [int(w) if isinstance(w, numbers.Integral) else str(w) for w in self.witness]
        return d


@dataclass
class Checks:
    """Ordered collection of :class:`Check` under a common id prefix."""

    prefix: str = ""
    items: list[Check] = field(default_factory=list)

    def _id(self, name: str) -> str:
        return f"{self.prefix}.{name}" if self.prefix else name

    def record(self, name: str, ok: Optional[bool], detail: str = "", witness=None) -> bool:
        """Add a pass/fail (or undecided when ``ok is None``) entry; returns ``bool(ok)``."""
        status = UNDECIDED if ok is None else (PASS if ok else FAIL)
        w = tuple(witness) if witness is not None else None
        self.items.append(Check(self._id(name), status, "" if ok else detail, w if not ok else None))
        return bool(ok)

    def skip(self, name: str, reason: str) -> None:
        self.items.append(Check(self._id(name), SKIPPED, reason))

    def extend(self, other: "Checks | Iterable[Check]") -> None:
        self.items.extend(other.items if isinstance(other, Checks) else other)

    def child(self, name: str) -> "Checks":
        return Checks(self._id(name))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.items)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.items if c.status == FAIL]

    def by_id(self) -> dict[str, Check]:
        return {c.id: c for c in self.items}

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)
