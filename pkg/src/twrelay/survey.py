"""Relay-placement sweeps: regime maps and throughput-gain maps."""

from __future__ import annotations

import math
from dataclasses import dataclass

from twrelay.channel import DomainError, NodeLayout, PowerBudget, gains_from_layout
from twrelay.regimes import RegimeLabel, TimeshareCertificate, analyze, optimal_gammas

NEAR_USER = 1e-3


@dataclass(frozen=True)
class SweepGrid:
    x_min: float = -2.0
    x_max: float = 2.0
    y_min: float = -2.0
    y_max: float = 2.0
    nx: int = 81
    ny: int = 81
    pathloss_exponent: float = 2.4
    power: PowerBudget = PowerBudget(1.0, 1.0, 1.0)
    u1_pos: tuple[float, float] = (-1.0, 0.0)
    u2_pos: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("sweep needs at least 2 points per axis")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("sweep bounds must be strictly ordered")
        if not self.pathloss_exponent > 0:
            raise DomainError("pathloss_exponent must be > 0")

    def xs(self) -> list[float]:
        return _axis(self.x_min, self.x_max, self.nx)

    def ys(self) -> list[float]:
        return _axis(self.y_min, self.y_max, self.ny)


def _axis(lo: float, hi: float, n: int) -> list[float]:
    # written so that symmetric windows give exactly mirrored coordinates
    return [(lo * (n - 1 - i) + hi * i) / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class MapCell:
    x: float
    y: float
    label: RegimeLabel | None
    gain_percent: float
    gamma_star: tuple[float, float]
    certificate: TimeshareCertificate | None = None
    near_user: bool = False


def throughput_gain(cert: TimeshareCertificate) -> float:
    """Percent gain of the pDF weighted rate over DF/DT time sharing."""
    if not cert.r_ts > 0.0:
        raise DomainError("time-share support value must be positive")
    return max(0.0, (cert.r_s - cert.r_ts) / cert.r_ts) * 100.0


def evaluate_cell(grid: SweepGrid, x: float, y: float) -> MapCell:
    if min(math.dist((x, y), grid.u1_pos), math.dist((x, y), grid.u2_pos)) < NEAR_USER:
        return MapCell(x, y, None, math.nan, (math.nan, math.nan), None, True)
    layout = NodeLayout((x, y), grid.u1_pos, grid.u2_pos, grid.pathloss_exponent)
    label, cert = analyze(gains_from_layout(layout), grid.power)
    gain = 0.0
    if cert is not None and not label.timeshare_equivalent:
        gain = throughput_gain(cert)
    return MapCell(x, y, label, gain, optimal_gammas(label, cert, grid.power), cert)


def sweep_regime_map(grid: SweepGrid = SweepGrid()) -> list[MapCell]:
    """Row-major (``y`` outer, ``x`` inner) list of classified cells."""
    xs = grid.xs()
    return [evaluate_cell(grid, x, y) for y in grid.ys() for x in xs]
