"""Run configuration for the Akhiezer lab.

Numeric defaults live here as module constants read from the environment
(a local ``.env`` file is honoured). ``RunConfig`` is the validated shape of
a JSON run document; the CLI merges file values, flag overrides and these
defaults, in that order of precedence.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.akhiezer.errors import ConfigError

logger = logging.getLogger(__name__)

load_dotenv()

AKHIEZER_ORDER = int(os.getenv("AKHIEZER_ORDER", "200"))
AKHIEZER_N_MAX = int(os.getenv("AKHIEZER_N_MAX", "10"))
AKHIEZER_THETA_TOL = float(os.getenv("AKHIEZER_THETA_TOL", "1e-12"))
AKHIEZER_FD_EPS = float(os.getenv("AKHIEZER_FD_EPS", "1e-5"))
AKHIEZER_GAP_TOL = float(os.getenv("AKHIEZER_GAP_TOL", "1e-6"))
AKHIEZER_OUT_DIR = os.getenv("AKHIEZER_OUT_DIR", "./out")
AKHIEZER_LOG_LEVEL = os.getenv("AKHIEZER_LOG_LEVEL", "INFO")

# E = (-1,-0.3) U (0.1,1) when no config file is given
DEFAULT_ALPHAS: List[float] = [-0.3]
DEFAULT_BETAS: List[float] = [-1.0, 0.1, 1.0]


# ══════════════════════════════════════════════════════════════════════════════
# Run document
# ══════════════════════════════════════════════════════════════════════════════

class RunConfig(BaseModel):
    """
    One run of the lab.
    Tolerance overrides are keyed by check-id prefix, e.g. "freud" or "surface.b_symmetry".
    """
    model_config = ConfigDict(extra="forbid")

    alphas: List[float]                        # gap left endpoints, ascending
    betas: List[float]                         # band left endpoints + right end of E
    n_max: int = Field(default=AKHIEZER_N_MAX, ge=1)
    order: int = Field(default=AKHIEZER_ORDER, ge=4)   # nodes per band
    theta_tol: float = AKHIEZER_THETA_TOL
    fd_eps: float = AKHIEZER_FD_EPS            # relative to diam(E)
    gap_tol: float = AKHIEZER_GAP_TOL          # relative to diam(E)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    out_dir: str = AKHIEZER_OUT_DIR
    command: Literal["compute", "verify", "compare"] = "verify"
    record_timing: bool = False                # True -> per-check runtimes, reports no longer byte-identical
    h_perturbation: Dict[int, float] = Field(default_factory=dict)  # test hook: h[n] += offset

    @field_validator("theta_tol", "fd_eps", "gap_tol")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value

    @field_validator("tolerances")
    @classmethod
    def _positive_overrides(cls, value: Dict[str, float]) -> Dict[str, float]:
        bad = [key for key, tol in value.items() if not tol > 0]
        if bad:
            raise ValueError(f"non-positive tolerance overrides: {', '.join(sorted(bad))}")
        return value

    def tolerance(self, check_id: str, default: float) -> float:
        """Return the override with the longest matching prefix, or ``default``."""
        matches = [key for key in self.tolerances if check_id.startswith(key)]
        if not matches:
            return default
        return self.tolerances[max(matches, key=len)]


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Load and validate a run document, applying non-null overrides."""
    if path is None:
        data: Dict[str, Any] = {"alphas": DEFAULT_ALPHAS, "betas": DEFAULT_BETAS}
    else:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    logger.debug("Loaded config: %s", config.model_dump())
    return config
