from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of an exhaustive check.

    ``failed`` names the first violated condition and ``witness`` holds the
    offending data (labels, not ids) so it can be printed as-is.
    """

    check: str
    ok: bool = True
    failed: str | None = None
    witness: tuple[Any, ...] = ()
    detail: str = ""
    notes: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, condition: str, witness: tuple[Any, ...] = (), detail: str = "") -> "Report":
        self.ok = False
        self.failed = condition
        self.witness = witness
        self.detail = detail
        return self

    def summary(self) -> str:
        if self.ok:
            return f"{self.check}: pass"
        w = ", ".join(str(x) for x in self.witness)
        msg = f"{self.check}: FAIL ({self.failed})"
        if w:
            msg += f" witness: {w}"
        if self.detail:
            msg += f" - {self.detail}"
        return msg
