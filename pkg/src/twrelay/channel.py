"""Channel parameters, power budgets and the distance-based gain model.

Noise variance is fixed at one, so powers are SNRs and a link with amplitude
``g`` contributes ``g**2 * P`` to a received SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

_LN2 = math.log(2.0)


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def _check_nonneg(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def capacity(x):
    """Gaussian capacity ``log2(1 + x)`` in bits per channel use.

    Accepts a scalar or an array; every entry must be finite and nonnegative.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError(f"capacity is defined for finite x >= 0, got {x!r}")
    out = np.log1p(arr) / _LN2
    return float(out) if out.ndim == 0 else out


def cap(x):
    # unchecked variant for the vectorised rate kernels
    return np.log1p(x) / _LN2


@dataclass(frozen=True)
class ChannelGains:
    """Link amplitudes ``|h|``; ``gij`` is the link from node j to node i."""

    g12: float
    g1r: float
    g21: float
    g2r: float
    gr1: float
    gr2: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _check_nonneg(f.name, getattr(self, f.name)))

    @classmethod
    def from_sequence(cls, values) -> "ChannelGains":
        """Build from ``(g12, g1r, g21, g2r, gr1, gr2)``."""
        values = list(values)
        if len(values) != 6:
            raise DomainError(f"expected 6 gains, got {len(values)}")
        return cls(*values)

    @classmethod
    def from_squared(cls, g12, g1r, g21, g2r, gr1, gr2) -> "ChannelGains":
        """Build from squared amplitudes (power gains)."""
        sq = [_check_nonneg("squared gain", v) for v in (g12, g1r, g21, g2r, gr1, gr2)]
        return cls(*(math.sqrt(v) for v in sq))

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.g12, self.g1r, self.g21, self.g2r, self.gr1, self.gr2)

    def squared(self) -> tuple[float, float, float, float, float, float]:
        return tuple(v * v for v in self.as_tuple())

    def mirrored(self) -> "ChannelGains":
        """Swap the roles of user 1 and user 2."""
        return ChannelGains(self.g21, self.g2r, self.g12, self.g1r, self.gr2, self.gr1)


@dataclass(frozen=True)
class PowerBudget:
    """Average power limits of user 1, user 2 and the relay."""

    p1: float
    p2: float
    pr: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _check_nonneg(f.name, getattr(self, f.name)))

    @classmethod
    def uniform(cls, p: float) -> "PowerBudget":
        return cls(p, p, p)

    def mirrored(self) -> "PowerBudget":
        return PowerBudget(self.p2, self.p1, self.pr)


@dataclass(frozen=True)
class NodeLayout:
    """Planar node positions and the path-loss exponent."""

    relay_pos: tuple[float, float]
    u1_pos: tuple[float, float] = (-1.0, 0.0)
    u2_pos: tuple[float, float] = (1.0, 0.0)
    pathloss_exponent: float = 2.4

    def __post_init__(self):
        for name in ("relay_pos", "u1_pos", "u2_pos"):
            pos = tuple(float(v) for v in getattr(self, name))
            if len(pos) != 2 or not all(math.isfinite(v) for v in pos):
                raise DomainError(f"{name} must be a finite 2D point, got {pos!r}")
            object.__setattr__(self, name, pos)
        exp = float(self.pathloss_exponent)
        if not math.isfinite(exp) or exp <= 0.0:
            raise DomainError(f"pathloss_exponent must be > 0, got {exp!r}")
        object.__setattr__(self, "pathloss_exponent", exp)

    def distances(self) -> tuple[float, float, float]:
        """Return ``(d12, d1r, d2r)``."""
        (x1, y1), (x2, y2), (xr, yr) = self.u1_pos, self.u2_pos, self.relay_pos
        return (
            math.hypot(x1 - x2, y1 - y2),
            math.hypot(x1 - xr, y1 - yr),
            math.hypot(x2 - xr, y2 - yr),
        )


def gains_from_layout(layout: NodeLayout) -> ChannelGains:
    """Reciprocal path-loss gains ``g = d ** (-exponent / 2)``."""
    d12, d1r, d2r = layout.distances()
    if min(d12, d1r, d2r) <= 0.0:
        raise DomainError("coincident nodes have no defined path loss")
    half = -layout.pathloss_exponent / 2.0
    a12, a1r, a2r = d12**half, d1r**half, d2r**half
    return ChannelGains(g12=a12, g1r=a1r, g21=a12, g2r=a2r, gr1=a1r, gr2=a2r)
