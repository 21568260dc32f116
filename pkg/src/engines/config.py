from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from .errors import SchemaError

# Defaults compartidos por los módulos y la CLI
DEFAULT_TOLERANCE = 1e-12
DEFAULT_MATCH_TOL = 1e-10
DEFAULT_GRID_N = 4097
DEFAULT_N = 256
DEFAULT_SEED = 0

GRID_ENV_VAR = "COPCALC_GRID"


@dataclass(frozen=True)
class Settings:
    tolerance: float = DEFAULT_TOLERANCE
    match_tol: float = DEFAULT_MATCH_TOL
    grid_n: int = DEFAULT_GRID_N
    N: int = DEFAULT_N
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if environ is None else environ
        raw = (env.get(GRID_ENV_VAR) or "").strip()
        if not raw:
            return cls()
        try:
            grid_n = int(raw)
        except ValueError as e:
            raise SchemaError(f"{GRID_ENV_VAR} must be an integer, got {raw!r}") from e
        if grid_n < 2:
            raise SchemaError(f"{GRID_ENV_VAR} must be >= 2, got {grid_n}")
        return cls(grid_n=grid_n)

    def replace(self, **overrides: Any) -> "Settings":
        """Return a copy with the non-None overrides applied (CLI flags)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes)
