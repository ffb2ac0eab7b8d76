"""Pass/fail reports produced by the verification operations."""

from dataclasses import dataclass, field
from typing import Dict, List


@dataclass(frozen=True)
class Failure:
    """One failed identity with the basis element that witnesses it"""

    check: str
    witness: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.check}: witness {self.witness}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass
class Report:
    """Named collection of checks; a check passes when it recorded no failure"""

    title: str
    checks: List[str] = field(default_factory=list)
    failures: List[Failure] = field(default_factory=list)

    def ran(self, check: str) -> None:
        if check not in self.checks:
            self.checks.append(check)

    def fail(self, check: str, witness: str, detail: str = "") -> None:
        self.ran(check)
        self.failures.append(Failure(check, witness, detail))

    def expect(self, check: str, ok: bool, witness: str, detail: str = "") -> bool:
        self.ran(check)
        if not ok:
            self.failures.append(Failure(check, witness, detail))
        return ok

    def extend(self, other: "Report") -> None:
        for check in other.checks:
            self.ran(check)
        self.failures.extend(other.failures)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None

    def summary(self) -> Dict[str, object]:
        failed = {f.check for f in self.failures}
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [{"name": c, "passed": c not in failed} for c in self.checks],
            "failures": [
                {"check": f.check, "witness": f.witness, "detail": f.detail}
                for f in self.failures
            ],
        }
