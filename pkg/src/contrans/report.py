"""Check results shared by the verifiers and the CLI report writer."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    name: str
    instance: str = ""
    checked: int = 0
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, witness) -> None:
        self.violations.append(witness)

    def line(self) -> str:
        """One tab-separated record: name, instance, PASS/FAIL, checked count, first counterexample."""
        status = "PASS" if self.ok else "FAIL"
        first = "" if self.ok else str(self.violations[0])
        extra = " ".join(f"{k}={v}" for k, v in self.info.items())
        return "\t".join((self.name, self.instance or "-", status, f"checked={self.checked}", first or extra))
