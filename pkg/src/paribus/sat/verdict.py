from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class SatVerdict:
    """Outcome of a decision procedure.

    ``witness``/``world`` are set exactly when ``satisfiable`` is true; for
    CL-PC the witness is a ClpcModel and ``world`` is None.
    """

    satisfiable: bool
    witness: Any = None
    world: str | None = None
    stats: dict = field(default_factory=dict)
    method: str = ""
    artifact: Any = None

    def __bool__(self):
        return self.satisfiable


def empty_stats() -> dict:
    return {
        "worlds_tried": 0,
        "sat_variables": 0,
        "sat_clauses": 0,
        "decisions": 0,
        "wall_time": 0.0,
    }
