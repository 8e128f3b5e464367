"""Dimension verdicts: an exact value, a lower bound, or certified infinity.

The three kinds are totally ordered (finite < at-least < infinite) so that
battery maxima are well defined; "infinite" is only ever produced together
with a periodicity certificate, never from plain bound exhaustion.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Verdict:
    kind: str                 # "finite" | "at_least" | "infinite"
    n: int = 0                # the value, or the bound+1 for at_least
    period: int = 0           # syzygy period for infinite verdicts
    period_start: int = 0

    @classmethod
    def finite(cls, n):
        return cls(kind="finite", n=int(n))

    @classmethod
    def at_least(cls, n):
        return cls(kind="at_least", n=int(n))

    @classmethod
    def infinite(cls, period, start=0):
        return cls(kind="infinite", period=int(period), period_start=int(start))

    @property
    def is_finite(self):
        return self.kind == "finite"

    @property
    def is_infinite(self):
        return self.kind == "infinite"

    def sort_key(self):
        rank = {"finite": 0, "at_least": 1, "infinite": 2}[self.kind]
        return (rank, self.n)

    def __str__(self):
        if self.kind == "finite":
            return str(self.n)
        if self.kind == "at_least":
            return f">= {self.n}"
        return f"inf (periodic, period {self.period})"

    def render(self):
        """The rendering used in reports and CLI output."""
        if self.kind == "finite":
            return str(self.n)
        if self.kind == "at_least":
            return f"≥ {self.n}"
        return "∞ (periodic)"

    def to_json(self):
        out = {"kind": self.kind, "value": self.render()}
        if self.kind != "infinite":
            out["n"] = self.n
        else:
            out["period"] = self.period
            out["period_start"] = self.period_start
        return out

    def same_verdict(self, other):
        if self.kind != other.kind:
            return False
        if self.kind == "infinite":
            return True
        return self.n == other.n


def verdict_max(verdicts):
    best = Verdict.finite(0)
    for v in verdicts:
        if v.sort_key() > best.sort_key():
            best = v
    return best
