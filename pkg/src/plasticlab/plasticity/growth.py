"""Neurogenesis control: loss-EMA stagnation trigger or a fixed schedule."""

from __future__ import annotations

from dataclasses import dataclass

from ..network import grow


@dataclass
class GrowthController:
    """Per-task growth state. ``epoch`` counts from 1 within a task."""

    ema: float | None = None
    best_ema: float | None = None
    band_ref: float | None = None
    stagnation: int = 0
    since_growth: int = 0
    lo: float = float("inf")
    hi: float = float("-inf")

    def observe(self, loss: float, beta: float) -> float:
        loss = float(loss)
        self.lo = min(self.lo, loss)
        self.hi = max(self.hi, loss)
        if self.ema is None:
            self.ema = loss
        else:
            self.ema = beta * self.ema + (1.0 - beta) * loss
        self.best_ema = self.ema if self.best_ema is None else min(self.best_ema, self.ema)
        self.since_growth += 1
        return self.ema


def adaptive_trigger(ctl: GrowthController, epoch: int, cfg) -> bool:
    """True when the EMA has stayed above the lower band for a full window.

    The band is ``(1 - delta_band)`` times the EMA level recorded at the start
    of the current window; clearing it restarts the window.
    """
    if ctl.band_ref is None:
        ctl.band_ref = ctl.ema
        return False
    if ctl.ema < ctl.band_ref * (1.0 - cfg.delta_band):
        ctl.band_ref = ctl.ema
        ctl.stagnation = 0
        return False
    ctl.stagnation += 1
    return (
        ctl.stagnation >= cfg.stagnation_window
        and epoch > cfg.warmup
        and ctl.since_growth > cfg.cooldown
    )


def scheduled_trigger(epoch: int, cfg) -> bool:
    return epoch % cfg.growth_interval == 0


def maybe_grow(ctl: GrowthController, loss: float, epoch: int, net, task: int, cfg):
    """Feed one epoch's mean loss to the controller; grow if triggered.

    Returns the indices of new neurons (owned by ``task`` in adaptive mode,
    unowned otherwise), or None.
    """
    ctl.observe(loss, cfg.beta_ema)
    if cfg.use_adaptive_growth:
        if not adaptive_trigger(ctl, epoch, cfg):
            return None
        new = grow(net, cfg.block_size, owner=task)
    else:
        if not scheduled_trigger(epoch, cfg):
            return None
        new = grow(net, cfg.block_size, owner=None)
    ctl.stagnation = 0
    ctl.since_growth = 0
    ctl.band_ref = ctl.ema
    return new
