"""Pass/fail records for inequality checks."""

from __future__ import annotations

from dataclasses import dataclass, field

# A report passes when slack = rhs - lhs is above -PASS_TOL * (1 + |rhs|).
PASS_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """One inequality instance: exact left side against a closed-form bound."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    context: dict = field(default_factory=dict)

    @classmethod
    def check(cls, name: str, lhs: float, rhs: float, **context) -> "BoundReport":
        slack = rhs - lhs
        passed = slack >= -PASS_TOL * (1.0 + abs(rhs))
        return cls(name=name, lhs=float(lhs), rhs=float(rhs),
                   slack=float(slack), passed=bool(passed), context=context)

    def __str__(self):
        ctx = " ".join(f"{k}={v}" for k, v in self.context.items())
        flag = "ok" if self.passed else "FAIL"
        return (f"{self.name}: lhs={self.lhs:.9g} rhs={self.rhs:.9g} "
                f"slack={self.slack:.3g} {flag} [{ctx}]")


def failures(reports) -> list:
    return [r for r in reports if not r.passed]
