"""Named ablation configurations (one row per configuration of the flag matrix)."""

from ..plasticity.config import FLAG_NAMES, MechanismConfig

_FULL = MechanismConfig()

_OVERRIDES = {
    "full_mpcs": {},
    "no_ewc": {"use_ewc": "off"},
    "no_replay": {"use_replay": False},
    "no_gating": {"use_gating": False},
    "no_fourier": {"use_fourier": False},
    "no_importance": {"use_continuous_importance": False},
    "no_hebbian": {"use_hebbian": False},
    "no_pruning": {"use_pruning": False},
    "no_similarity": {"use_similarity": False},
    "no_adaptive_growth": {"use_adaptive_growth": False},
    "baseline_minimal": {f: (False if f != "use_ewc" else "off") for f in FLAG_NAMES},
    "ewc_topologie": {"use_ewc": "topo"},
    "ewc_topology_pertask": {"use_ewc": "topo_pertask"},
    "mpcs_efficient": {"use_ewc": "off", "use_hebbian": False},
}

REGISTRY = {name: _FULL.replace(name=name, **kw) for name, kw in _OVERRIDES.items()}
CONFIG_NAMES = tuple(REGISTRY)

# Column order of the printed flag matrix.
FLAG_COLUMNS = (
    ("F", "use_fourier"), ("EWC", "use_ewc"), ("RP", "use_replay"), ("GT", "use_gating"),
    ("IM", "use_continuous_importance"), ("PR", "use_pruning"), ("HB", "use_hebbian"),
    ("SI", "use_similarity"), ("AG", "use_adaptive_growth"),
)


def get_config(name: str, **overrides) -> MechanismConfig:
    if name not in REGISTRY:
        raise KeyError(f"unknown configuration {name!r}; known: {', '.join(CONFIG_NAMES)}")
    cfg = REGISTRY[name]
    return cfg.replace(**overrides) if overrides else cfg


def flag_matrix() -> dict:
    """``{config: {column: value}}`` with EWC shown as on/off/topo/topo+pt."""
    ewc_label = {"off": False, "global": True, "topo": "topo", "topo_pertask": "topo+pt"}
    out = {}
    for name, cfg in REGISTRY.items():
        row = {}
        for col, flag in FLAG_COLUMNS:
            v = getattr(cfg, flag)
            row[col] = ewc_label[v] if flag == "use_ewc" else v
        out[name] = row
    return out
