from .config import EWC_MODES, FLAG_NAMES, MechanismConfig
from .ewc import FisherStore, compute_fisher, ewc_penalty_grad, task_support
from .gating import apply_gating, gate_factors
from .growth import GrowthController, maybe_grow
from .hebbian import hebbian_update
from .importance import apply_freeze_scaling, freeze_task, update_importance
from .pruning import PruneReport, prune_and_regenerate
from .replay import ReplayBuffer, replay_step
from .routing import RoutingDecision, route_by_similarity

__all__ = [
    "EWC_MODES", "FLAG_NAMES", "MechanismConfig",
    "FisherStore", "compute_fisher", "ewc_penalty_grad", "task_support",
    "apply_gating", "gate_factors",
    "GrowthController", "maybe_grow",
    "hebbian_update",
    "apply_freeze_scaling", "freeze_task", "update_importance",
    "PruneReport", "prune_and_regenerate",
    "ReplayBuffer", "replay_step",
    "RoutingDecision", "route_by_similarity",
]
