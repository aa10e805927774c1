from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional


@dataclass
class CheckEntry:
    name: str
    max_error: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "max_error": self.max_error, "tolerance": self.tolerance, "pass": self.passed}

    def line(self) -> str:
        return f"CHECK {self.name} {self.max_error:.6e} {self.tolerance:.3e} {'PASS' if self.passed else 'FAIL'}"


def check(name: str, err: float, tol: float) -> CheckEntry:
    err = float(err)
    return CheckEntry(name, err, float(tol), bool(err <= tol) and not math.isnan(err))


@dataclass
class RunReport:
    command: str
    entries: list[CheckEntry] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    timestamp: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def extend(self, entries: Iterable[CheckEntry], prefix: str = "") -> None:
        for e in entries:
            self.entries.append(CheckEntry(prefix + e.name, e.max_error, e.tolerance, e.passed))

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def as_dict(self) -> dict:
        d = {
            "command": self.command,
            "entries": [e.as_dict() for e in self.entries],
            "pass": self.passed,
            "timings": self.timings,
        }
        if self.extra:
            d["extra"] = self.extra
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        entries = [CheckEntry(e["name"], e["max_error"], e["tolerance"], e["pass"]) for e in d["entries"]]
        return cls(d["command"], entries, dict(d.get("timings", {})), d.get("timestamp"), dict(d.get("extra", {})))

    def to_text(self) -> str:
        lines = [e.line() for e in self.entries]
        lines.append(f"OVERALL {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)
