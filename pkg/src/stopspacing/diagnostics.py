"""Lightweight report of dropped rows and data-quality warnings.

Parsing and segment extraction never abort on bad rows; they drop or flag
and record what happened here so callers can audit the damage.
"""

from __future__ import annotations

from collections import Counter


class Diagnostics:
    """Accumulates (table, reason) drop counts, warning tallies, and notes."""

    def __init__(self):
        self.dropped: Counter[tuple[str, str]] = Counter()
        self.flags: Counter[str] = Counter()
        self.notes: list[str] = []

    def add_drop(self, table: str, reason: str, n: int = 1) -> None:
        self.dropped[(table, reason)] += n

    def add_flag(self, category: str, n: int = 1) -> None:
        self.flags[category] += n

    def note(self, message: str) -> None:
        self.notes.append(message)

    def total_dropped(self, table: str | None = None) -> int:
        if table is None:
            return sum(self.dropped.values())
        return sum(n for (t, _), n in self.dropped.items() if t == table)

    def is_clean(self) -> bool:
        return not self.dropped and not self.flags and not self.notes

    def report(self) -> str:
        lines = []
        for (table, reason), n in sorted(self.dropped.items()):
            lines.append(f"{table}: dropped {n} row(s): {reason}")
        for category, n in sorted(self.flags.items()):
            lines.append(f"{category}: {n} occurrence(s)")
        lines.extend(self.notes)
        return "\n".join(lines) if lines else "no issues"

    def __repr__(self):
        return (
            f"Diagnostics(dropped={sum(self.dropped.values())}, "
            f"flags={sum(self.flags.values())}, notes={len(self.notes)})"
        )
