"""Homotopy windows: per-stem groups with the classes that detect them."""

from __future__ import annotations

from dataclasses import dataclass, field

from .modules import InvariantFactors

# Sentinel for an eta-link that the producing computation could not decide.
UNKNOWN = "?"


@dataclass(frozen=True)
class WindowSummand:
    """A cyclic summand of a homotopy group.

    ``name`` is the class detecting a generator and ``twice`` the class
    detecting twice the generator when the order exceeds 2. ``eta_link``
    names the summand of the next stem whose reduction mod 2 is eta times
    this class (None when that product is zero mod 2, UNKNOWN when unknown).
    ``reduction_name`` and ``lift_name`` are the names used after smashing
    with the Moore spectrum for the reduction and for a lift through the
    top cell.
    """

    group: InvariantFactors
    name: str
    filtration: int | None = None
    twice: str | None = None
    eta_link: str | None = UNKNOWN
    reduction_name: str | None = None
    lift_name: str | None = None

    @property
    def order_exponent(self) -> int | None:
        """log2 of the order, None for a free summand."""
        return None if self.group.free else self.group.torsion[0]

    def __str__(self) -> str:
        return f"{self.group}{{{self.name}}}"


@dataclass
class HomotopyWindow:
    stems: dict[int, list[WindowSummand]] = field(default_factory=dict)
    notes: dict[int, str] = field(default_factory=dict)

    def __getitem__(self, n: int) -> list[WindowSummand]:
        return self.stems.get(n, [])

    def group(self, n: int) -> InvariantFactors:
        out = InvariantFactors()
        for s in self[n]:
            out = out + s.group
        return out

    def names(self, n: int) -> list[str]:
        return [s.name for s in self[n]]

    def find(self, n: int, name: str) -> WindowSummand | None:
        return next((s for s in self[n] if s.name == name), None)

    def log_order(self, n: int) -> int:
        g = self.group(n)
        if g.free:
            raise ValueError(f"stem {n} is infinite")
        return g.log_order

    def is_zero(self) -> bool:
        return all(not v for v in self.stems.values())

    def describe(self, n: int) -> str:
        return " + ".join(str(s) for s in self[n]) or "0"

    def to_dict(self) -> dict:
        out = {}
        for n in sorted(self.stems):
            out[str(n)] = {
                "group": str(self.group(n)),
                "summands": [{"group": str(s.group), "detected_by": s.name, "filtration": s.filtration,
                              "twice": s.twice} for s in self[n]],
            }
            if n in self.notes:
                out[str(n)]["note"] = self.notes[n]
        return out

    def __str__(self) -> str:
        lines = []
        for n in sorted(self.stems):
            note = f"  ({self.notes[n]})" if n in self.notes else ""
            lines.append(f"stem {n}: {self.describe(n)}{note}")
        return "\n".join(lines)
