"""Check reports: an ordered list of ``{check, order, witness, status}`` entries."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"


@dataclass
class CheckResult:
    check: str
    status: str
    order: int | None = None
    witness: Any = None
    note: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = {"check": self.check, "order": self.order, "witness": self.witness,
             "status": self.status}
        if self.note is not None:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        return cls(check=d["check"], status=d["status"], order=d.get("order"),
                   witness=d.get("witness"), note=d.get("note"))


@dataclass
class Report:
    name: str
    results: list[CheckResult] = field(default_factory=list)
    scope: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def add(self, check: str, ok: bool, order=None, witness=None, note=None) -> CheckResult:
        r = CheckResult(check, PASS if ok else FAIL, order, witness, note)
        self.results.append(r)
        return r

    def extend(self, other: "Report", prefix: str = "") -> None:
        for r in other.results:
            self.results.append(CheckResult(prefix + r.check, r.status, r.order, r.witness,
                                            r.note))

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.ok]

    def first_failure(self) -> CheckResult | None:
        f = self.failures()
        return f[0] if f else None

    def get(self, check: str) -> CheckResult:
        for r in self.results:
            if r.check == check:
                return r
        raise KeyError(check)

    def to_dict(self) -> dict:
        return {"report": self.name, "status": PASS if self.ok else FAIL,
                "scope": self.scope, "data": self.data,
                "results": [r.to_dict() for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(name=d["report"], results=[CheckResult.from_dict(r) for r in d["results"]],
                   scope=d.get("scope", {}), data=d.get("data", {}))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.ok else 'FAIL'}"]
        for r in self.results:
            mark = "ok  " if r.ok else "FAIL"
            extra = f" order={r.order}" if r.order is not None else ""
            wit = f" witness={r.witness}" if (r.witness is not None and not r.ok) else ""
            lines.append(f"  [{mark}] {r.check}{extra}{wit}")
        return "\n".join(lines)
