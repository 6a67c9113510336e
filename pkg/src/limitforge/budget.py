"""Deterministic step budgets.

Budgets count abstract engine steps, never wall clock, so identical runs
spend identically on every machine.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class BudgetExhausted(Exception):
    pass


@dataclass
class Budget:
    """A mutable step counter with an optional hard limit."""

    limit: int | None = None
    used: int = 0
    counters: dict = field(default_factory=dict)

    def spend(self, n: int = 1, tag: str | None = None) -> bool:
        """Consume n steps; returns False if the limit would be passed."""
        if self.limit is not None and self.used + n > self.limit:
            return False
        self.used += n
        if tag is not None:
            self.counters[tag] = self.counters.get(tag, 0) + n
        return True

    @property
    def exhausted(self) -> bool:
        return self.limit is not None and self.used >= self.limit

    def remaining(self) -> int | None:
        if self.limit is None:
            return None
        return max(0, self.limit - self.used)

    def report(self) -> dict:
        return {"limit": self.limit, "used": self.used, "counters": dict(self.counters)}
