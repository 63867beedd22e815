"""Verification report shared by every check and by the CLI."""

from __future__ import annotations

import json
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

THREADS_ENV = "QTETRA_THREADS"

# cap on how many failures are kept verbatim in a report
MAX_RECORDED_FAILURES = 50


@dataclass
class VerifyReport:
    name: str
    params: dict[str, Any] = field(default_factory=dict)
    checked: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)
    # "exact" or "numeric"; tetrahedron checks use "constant" / "spectral"
    mode: str = "exact"
    residual: float | None = None
    duration: float = 0.0
    notes: list[str] = field(default_factory=list)
    inconclusive: bool = False
    failure_count: int = 0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0 and not self.failures and not self.inconclusive

    def fail(self, **where: Any) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append(where)

    def merge(self, other: "VerifyReport") -> None:
        self.checked += other.checked
        self.failure_count += other.failure_count
        room = MAX_RECORDED_FAILURES - len(self.failures)
        self.failures.extend(other.failures[: max(room, 0)])

    def status(self) -> str:
        if self.inconclusive:
            return "INCONCLUSIVE"
        return "PASS" if self.passed else "FAIL"

    def summary(self) -> str:
        line = f"[{self.status()}] {self.name}: checked={self.checked}"
        if self.failure_count:
            line += f" failures={self.failure_count}"
        if self.residual is not None:
            line += f" residual={self.residual:.3e}"
        line += f" ({self.duration:.2f}s)"
        return line

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "params": self.params,
            "checked": self.checked,
            "failures": self.failures,
            "failure_count": self.failure_count,
            "mode": self.mode,
            "passed": self.passed,
            "duration": round(self.duration, 6),
        }
        if self.mode == "numeric":
            out["residual"] = self.residual
            out["inconclusive"] = self.inconclusive
        if self.notes:
            out["notes"] = self.notes
        # parameters are echoed at top level too, without shadowing results
        for k, v in self.params.items():
            out.setdefault(k, v)
        return out

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, default=str))


@contextmanager
def timed(report: VerifyReport):
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.duration = time.perf_counter() - start


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_map(fn, items, threads: int | None = None):
    """Map a picklable function over items, in worker processes if threads > 1."""
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor

    chunk = max(1, len(items) // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
