"""Mechanism flags and hyperparameters."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

EWC_MODES = ("off", "global", "topo", "topo_pertask")

FLAG_NAMES = (
    "use_fourier",
    "use_ewc",
    "use_replay",
    "use_gating",
    "use_continuous_importance",
    "use_pruning",
    "use_hebbian",
    "use_similarity",
    "use_adaptive_growth",
)


@dataclass(frozen=True)
class MechanismConfig:
    """One ablation configuration: nine switches plus hyperparameters.

    Replay and mixed consolidation share ``use_replay``; gating covers the
    hybrid-gating half of the gating column (re-alpha is not modelled).
    """

    name: str = "full_mpcs"
    use_fourier: bool = True
    use_ewc: str = "global"
    use_replay: bool = True
    use_gating: bool = True
    use_continuous_importance: bool = True
    use_pruning: bool = True
    use_hebbian: bool = True
    use_similarity: bool = True
    use_adaptive_growth: bool = True

    # importance / freeze
    alpha: float = 0.01
    tau: float = 1e-4
    # pruning
    tau_p: float = 0.05
    p_r: float = 0.02
    regen_std: float = 0.01
    # consolidation
    lambda_ewc: float = 100.0
    rho: float = 0.3
    replay_weight: float = 0.5
    replay_capacity: int = 32
    # hebbian / gating / routing
    eta_h: float = 1e-4
    suppression: float = 0.1
    s_thresh: float = 0.9
    # growth
    beta_ema: float = 0.99
    delta_band: float = 0.02
    stagnation_window: int = 50
    block_size: int = 8
    cooldown: int = 100
    warmup: int = 100
    growth_interval: int = 250
    start_block: int = 16
    init_scale: float = 0.5

    def __post_init__(self):
        if self.use_ewc not in EWC_MODES:
            raise ValueError(f"use_ewc must be one of {EWC_MODES}, got {self.use_ewc!r}")
        if not self.tau_p > 0:
            raise ValueError("tau_p must be positive")
        for field in ("p_r", "rho"):
            v = getattr(self, field)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{field} must lie in [0, 1], got {v}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def flags(self) -> dict:
        return {f: getattr(self, f) for f in FLAG_NAMES}

    def replace(self, **changes) -> "MechanismConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MechanismConfig":
        return cls(**d)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]
