"""Decode-forward transmission for two-way relay channels.

Rate regions for the full- and half-duplex composite partial decode-forward
schemes, closed-form link-regime classification for independent partial
relaying, and relay-placement sweeps.
"""

from twrelay.channel import (
    ChannelGains,
    DomainError,
    NodeLayout,
    PowerBudget,
    capacity,
    gains_from_layout,
)
from twrelay.geometry import (
    RatePentagon,
    RateRegion,
    contains,
    convex_union,
    pentagon_vertices,
    support_value,
)

__all__ = [
    "ChannelGains",
    "DomainError",
    "NodeLayout",
    "PowerBudget",
    "RatePentagon",
    "RateRegion",
    "capacity",
    "contains",
    "convex_union",
    "gains_from_layout",
    "pentagon_vertices",
    "support_value",
]

__version__ = "0.1.0"
