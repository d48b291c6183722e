"""Sequential-composition privacy budget.

Queries against one dataset add up: k releases at epsilons e1..ek cost
e1 + ... + ek in total. A :class:`BudgetLedger` refuses any charge that
would push the spent total past the budget, and a refused charge leaves
the ledger untouched.

On disk a ledger is a JSON-lines file. The first line records the budget,
``{"total_epsilon": 1.0, "ts": "..."}``; every later line is one charge,
``{"label": "...", "epsilon": 0.3, "ts": "..."}``. The file is only ever
appended to, under an exclusive lock.
"""

from __future__ import annotations

import fcntl
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import BudgetExhausted, CorruptLedger

# Float slack so e.g. 0.1 + 0.2 may exactly spend a 0.3 budget.
TOLERANCE = 1e-12


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class Charge:
    label: str
    epsilon: float
    ts: str = ""


@dataclass
class BudgetLedger:
    total_epsilon: float
    charges: list[Charge] = field(default_factory=list)

    def __post_init__(self):
        if not (math.isfinite(self.total_epsilon) and self.total_epsilon > 0):
            raise ValueError(f"total epsilon must be positive, got {self.total_epsilon}")

    @property
    def spent(self) -> float:
        return math.fsum(c.epsilon for c in self.charges)

    def remaining(self) -> float:
        return max(0.0, self.total_epsilon - self.spent)

    def can_afford(self, epsilon: float) -> bool:
        return self.spent + epsilon <= self.total_epsilon + TOLERANCE

    def charge(self, label: str, epsilon: float, ts: str | None = None) -> Charge:
        """Record a charge, or raise :class:`BudgetExhausted` without changing anything."""
        if not (math.isfinite(epsilon) and epsilon > 0):
            raise ValueError(f"charged epsilon must be positive, got {epsilon}")
        if not self.can_afford(epsilon):
            raise BudgetExhausted(epsilon, self.remaining())
        entry = Charge(str(label), float(epsilon), _now() if ts is None else ts)
        self.charges.append(entry)
        return entry


def new_ledger(total_epsilon: float) -> BudgetLedger:
    return BudgetLedger(float(total_epsilon))


def _parse(lines: list[str], path: Path) -> BudgetLedger:
    records = []
    for no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptLedger(f"{path}:{no}: not JSON ({exc.msg})") from None
    if not records or "total_epsilon" not in records[0]:
        raise CorruptLedger(f"{path}: first record must hold total_epsilon")
    try:
        ledger = BudgetLedger(float(records[0]["total_epsilon"]))
        for rec in records[1:]:
            ledger.charges.append(Charge(str(rec["label"]), float(rec["epsilon"]), str(rec.get("ts", ""))))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptLedger(f"{path}: bad record ({exc})") from None
    if not ledger.can_afford(0.0):
        raise CorruptLedger(f"{path}: recorded charges exceed the budget")
    return ledger


def init_ledger_file(path: str | Path, total_epsilon: float) -> BudgetLedger:
    """Create a new ledger file; refuses to overwrite an existing one."""
    path = Path(path)
    ledger = new_ledger(total_epsilon)
    with path.open("x", encoding="utf-8") as fh:
        fh.write(json.dumps({"total_epsilon": ledger.total_epsilon, "ts": _now()}) + "\n")
    return ledger


def load_ledger_file(path: str | Path) -> BudgetLedger:
    path = Path(path)
    if not path.exists():
        raise CorruptLedger(f"{path}: no such ledger file")
    return _parse(path.read_text(encoding="utf-8").splitlines(), path)


def charge_ledger_file(path: str | Path, label: str, epsilon: float) -> BudgetLedger:
    """Lock the file, re-read it, and append the charge only if it fits."""
    path = Path(path)
    if not path.exists():
        raise CorruptLedger(f"{path}: no such ledger file")
    with path.open("r+", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            content = fh.read()
            ledger = _parse(content.splitlines(), path)
            entry = ledger.charge(label, epsilon)
            if content and not content.endswith("\n"):
                fh.write("\n")
            fh.write(json.dumps({"label": entry.label, "epsilon": entry.epsilon, "ts": entry.ts}) + "\n")
            fh.flush()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
    return ledger
