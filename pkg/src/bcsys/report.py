"""Structured pass/fail reports for axiom checking.

Every validator in this package returns a Report: a map from law names to
results. A law can fail with witnesses, be skipped on instances that fall
outside the represented truncation height, or be unavailable because the
structure it talks about is absent. Failure and absence are kept distinct
on purpose: a group-like example legitimately has no terminal object,
which is not the same defect as a broken equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    law: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        msg = f"{self.law}: witness={self.witness!r}"
        if self.detail:
            msg += f" ({self.detail})"
        return msg


@dataclass
class LawResult:
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0
    skipped: int = 0
    missing: str | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and self.missing is None


class Report:
    """Per-law results keyed by a stable law name."""

    def __init__(self) -> None:
        self.laws: dict[str, LawResult] = {}

    def law(self, name: str) -> LawResult:
        return self.laws.setdefault(name, LawResult())

    def tick(self, name: str, n: int = 1) -> None:
        self.law(name).checked += n

    def skip(self, name: str, n: int = 1) -> None:
        self.law(name).skipped += n

    def fail(self, name: str, witness: tuple, detail: str = "") -> None:
        self.law(name).violations.append(Violation(name, witness, detail))

    def miss(self, name: str, reason: str) -> None:
        self.law(name).missing = reason

    def merge(self, other: "Report", prefix: str = "") -> None:
        for name, res in other.laws.items():
            mine = self.law(prefix + name)
            mine.checked += res.checked
            mine.skipped += res.skipped
            for v in res.violations:
                mine.violations.append(Violation(prefix + name, v.witness, v.detail))
            if res.missing is not None and mine.missing is None:
                mine.missing = res.missing

    @property
    def ok(self) -> bool:
        return all(res.ok for res in self.laws.values())

    def failed_laws(self) -> list[str]:
        return sorted(n for n, r in self.laws.items() if r.violations)

    def missing_laws(self) -> list[str]:
        return sorted(n for n, r in self.laws.items() if r.missing is not None)

    def violations(self) -> list[Violation]:
        out: list[Violation] = []
        for name in sorted(self.laws):
            out.extend(self.laws[name].violations)
        return out

    def total_skipped(self) -> int:
        return sum(r.skipped for r in self.laws.values())

    def format(self) -> str:
        lines = []
        for name in sorted(self.laws):
            res = self.laws[name]
            if res.missing is not None:
                lines.append(f"MISSING {name}: {res.missing}")
            elif res.violations:
                v = res.violations[0]
                extra = f" (+{len(res.violations) - 1} more)" if len(res.violations) > 1 else ""
                lines.append(f"FAIL {name}: witness={v.witness!r} {v.detail}{extra}")
            else:
                skip = f", skipped {res.skipped}" if res.skipped else ""
                lines.append(f"PASS {name} (checked {res.checked}{skip})")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.format()


class Truncated(Exception):
    """A lookup fell off the represented truncation height.

    Raised when a table entry needed by a check refers to data above the
    finite presentation's height; callers catch it and record a skip.
    """

    def __init__(self, what: str):
        super().__init__(what)
        self.what = what
