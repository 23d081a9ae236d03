"""Per-iteration / per-sample run records shared by solvers and engines."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

TRACE_CSV_HEADER = ["t", "h_l1", "converged", "alpha", "work",
                    "push_ops", "push_ops_dangling", "wall_ms"]


@dataclass
class TraceSample:
    """One trace row.

    For synchronous runs a row is one exact iteration; for concurrent runs
    it is a monitor sample.  ``push_ops`` and ``push_ops_dangling`` are
    cumulative edge-push counts since the start of the run.  ``active_mass``
    and ``carry_mass`` split ``h_l1`` into above-threshold pending mass and
    frozen at-or-below-threshold residue; they are kept for analysis and not
    serialized.
    """

    t: int
    h_l1: float
    converged: int
    alpha: float
    work: int
    push_ops: int
    push_ops_dangling: int
    wall_ms: float
    active_mass: float = 0.0
    carry_mass: float = 0.0

    def as_csv_row(self) -> list:
        return [self.t, repr(self.h_l1), self.converged, repr(self.alpha),
                self.work, self.push_ops, self.push_ops_dangling,
                f"{self.wall_ms:.3f}"]


@dataclass
class RunTrace:
    samples: list[TraceSample] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.samples)

    @property
    def final(self) -> TraceSample:
        if not self.samples:
            raise ValueError("empty trace")
        return self.samples[-1]

    def column(self, name: str) -> list:
        return [getattr(s, name) for s in self.samples]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_CSV_HEADER)
            for s in self.samples:
                writer.writerow(s.as_csv_row())
