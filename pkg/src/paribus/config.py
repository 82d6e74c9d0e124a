"""Resource caps.  Exceeding a cap is an error, never a silent truncation."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


class CapExceeded(RuntimeError):
    """An input is larger than a configured resource cap."""


@dataclass(frozen=True)
class Limits:
    pecp_oracle_atoms: int = 5
    stit_oracle_worlds: int = 4
    stit_oracle_agents: int = 2
    stit_oracle_atoms: int = 2
    clpc_oracle_atoms: int = 6
    clpc_oracle_agents: int = 4
    clpc_embedding_atoms: int = 3
    bridge_atoms: int = 12
    reduce_nodes: int = 200_000
    s5_enumeration_atoms: int = 14


_override: Limits | None = None


def limits() -> Limits:
    """Current caps; PARIBUS_MAX_ATOMS overrides the oracle atom caps."""
    base = _override or Limits()
    env = os.environ.get("PARIBUS_MAX_ATOMS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise CapExceeded(f"PARIBUS_MAX_ATOMS must be an integer, got {env!r}") from None
        base = replace(
            base, pecp_oracle_atoms=n, stit_oracle_atoms=n, clpc_oracle_atoms=n
        )
    return base


def set_limits(new: Limits | None) -> None:
    """Install process-wide caps (None restores the defaults)."""
    global _override
    _override = new
