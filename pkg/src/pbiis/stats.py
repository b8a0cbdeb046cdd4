"""Per-run statistics, one record per (instance, method) cell."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

CSV_COLUMNS = (
    "instance",
    "method",
    "cons",
    "vars",
    "avg_lit",
    "red_cons",
    "conflicts",
    "decisions",
    "backtracks",
    "learned",
    "max_dl",
    "oracle_calls",
    "time_ms",
    "outcome",
    "verified",
)


@dataclass
class RunStats:
    instance: str = ""
    method: str = "csea"
    cons: int = 0
    vars: int = 0
    avg_lit: float = 0.0
    red_cons: int = 0
    conflicts: int = 0
    decisions: int = 0
    backtracks: int = 0
    learned: int = 0
    max_dl: int = 0
    oracle_calls: int = 0
    time_ms: float = 0.0
    outcome: str = ""
    verified: bool | None = None

    @property
    def reduction(self) -> float:
        """Fraction of the original constraints left out of the reported set."""
        if self.cons == 0:
            return 0.0
        return 1.0 - self.red_cons / self.cons

    def as_row(self, timing: bool = True) -> dict[str, str]:
        row = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "avg_lit":
                value = f"{value:.4f}"
            elif f.name == "time_ms":
                value = f"{value:.3f}" if timing else ""
            elif f.name == "verified":
                value = "" if value is None else str(value).lower()
            row[f.name] = str(value)
        return row

    def to_dict(self) -> dict:
        return asdict(self)


assert tuple(f.name for f in fields(RunStats)) == CSV_COLUMNS
