"""Full-duplex composite partial decode-forward region and its special cases.

Each user splits its power into a coherent common part ``alpha``, an
independent common part ``beta`` and a private part ``gamma``.  The relay
splits its power into coherent parts ``pr1``, ``pr2`` (aligned with each
user's coherent signal) and an independent binning part ``beta3``.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, fields

import numpy as np

from twrelay.channel import ChannelGains, DomainError, PowerBudget, cap
from twrelay.geometry import RatePentagon, RateRegion, hull_of_points, pentagon_points

BUDGET_SLACK = 1e-12

# column order of the internal allocation matrix
FIELDS = ("alpha1", "beta1", "gamma1", "alpha2", "beta2", "gamma2", "pr1", "pr2", "beta3")
GROUPS = ((0, 1, 2), (3, 4, 5), (6, 7, 8))


@dataclass(frozen=True)
class FdAllocation:
    alpha1: float = 0.0
    alpha2: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    beta3: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    pr1: float = 0.0
    pr2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{f.name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, f.name, v)
        if self.pr1 > 0.0 and self.alpha1 == 0.0:
            raise DomainError("pr1 > 0 requires alpha1 > 0")
        if self.pr2 > 0.0 and self.alpha2 == 0.0:
            raise DomainError("pr2 > 0 requires alpha2 > 0")

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FIELDS])

    @classmethod
    def from_vector(cls, v) -> "FdAllocation":
        return cls(**{name: float(x) for name, x in zip(FIELDS, v)})

    def k_factors(self) -> tuple[float, float]:
        """Equivalent relay scaling factors ``k_i = pr_i / alpha_i``."""
        k1 = self.pr1 / self.alpha1 if self.alpha1 > 0 else 0.0
        k2 = self.pr2 / self.alpha2 if self.alpha2 > 0 else 0.0
        return k1, k2

    def check_budget(self, p: PowerBudget) -> None:
        used = (
            self.alpha1 + self.beta1 + self.gamma1,
            self.alpha2 + self.beta2 + self.gamma2,
            self.pr1 + self.pr2 + self.beta3,
        )
        for name, u, lim in zip(("user 1", "user 2", "relay"), used, (p.p1, p.p2, p.pr)):
            if u > lim + BUDGET_SLACK:
                raise DomainError(f"{name} uses {u!r} > budget {lim!r}")


class SchemeKind(enum.Enum):
    COMPOSITE = "composite"
    MARKOV_DF = "markov-df"
    INDEPENDENT_DF = "independent-df"
    DIRECT_TRANSMISSION = "dt"
    INDEPENDENT_PARTIAL_DF = "independent-pdf"
    HYBRID_USER1_RELAYS = "hybrid-1"
    HYBRID_USER2_RELAYS = "hybrid-2"

    @property
    def mask(self) -> np.ndarray:
        return np.array(_MASKS[self], dtype=bool)


# which FIELDS each scheme may use
_MASKS = {
    SchemeKind.COMPOSITE: (1, 1, 1, 1, 1, 1, 1, 1, 1),
    SchemeKind.MARKOV_DF: (1, 1, 0, 1, 1, 0, 1, 1, 0),
    SchemeKind.INDEPENDENT_DF: (0, 1, 0, 0, 1, 0, 0, 0, 1),
    SchemeKind.DIRECT_TRANSMISSION: (0, 0, 1, 0, 0, 1, 0, 0, 0),
    SchemeKind.INDEPENDENT_PARTIAL_DF: (0, 1, 1, 0, 1, 1, 0, 0, 1),
    SchemeKind.HYBRID_USER1_RELAYS: (1, 1, 0, 0, 0, 1, 1, 0, 1),
    SchemeKind.HYBRID_USER2_RELAYS: (0, 0, 1, 1, 1, 0, 0, 1, 1),
}


def restrict(kind: SchemeKind, a: FdAllocation) -> FdAllocation:
    """Zero every field the scheme does not use."""
    return FdAllocation.from_vector(np.where(kind.mask, a.to_vector(), 0.0))


def sub_kinds(kind: SchemeKind) -> list[SchemeKind]:
    """Schemes whose allocations form a subset of ``kind``'s."""
    m = kind.mask
    return [k for k in SchemeKind if k is not kind and not np.any(k.mask & ~m)]


def fd_rates(g: ChannelGains, A: np.ndarray):
    """Vectorised ``(a, b, c)`` pentagon constraints for allocation rows ``A``."""
    g12, g1r, g21, g2r, gr1, gr2 = g.as_tuple()
    a1, b1, c1, a2, b2, c2, p1, p2, b3 = np.asarray(A, dtype=float).T
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    den = qr1 * c1 + qr2 * c2 + 1.0
    i1 = cap(qr1 * b1 / den)
    i2 = cap(qr2 * b2 / den)
    i3 = cap((qr1 * b1 + qr2 * b2) / den)
    i4 = cap(q21 * c1)
    i6 = cap(q12 * c2)
    i5 = cap((g21 * np.sqrt(a1) + g2r * np.sqrt(p1)) ** 2 + q21 * (b1 + c1) + q2r * b3)
    i7 = cap((g12 * np.sqrt(a2) + g1r * np.sqrt(p2)) ** 2 + q12 * (b2 + c2) + q1r * b3)
    return np.minimum(i1 + i4, i5), np.minimum(i2 + i6, i7), i3 + i4 + i6


def fd_pentagon(g: ChannelGains, a: FdAllocation, p: PowerBudget | None = None) -> RatePentagon:
    """Rate pentagon of one allocation; checks the budget when ``p`` is given."""
    if p is not None:
        a.check_budget(p)
    r1, r2, s = fd_rates(g, a.to_vector()[None, :])
    return RatePentagon(float(r1[0]), float(r2[0]), float(s[0]))


@dataclass(frozen=True)
class SearchConfig:
    """Grid and refinement budget for allocation searches."""

    points_low_dim: int = 21
    points_high_dim: int = 9
    refine: bool = True
    halvings: int = 6
    directions: int = 33
    max_moves: int = 40

    def __post_init__(self):
        if self.points_low_dim < 2 or self.points_high_dim < 2:
            raise DomainError("search grid needs >= 2 points per free dimension")
        if self.halvings < 0 or self.directions < 2 or self.max_moves < 1:
            raise DomainError("invalid refinement settings")

    def points_for(self, free_dims: int) -> int:
        return self.points_low_dim if free_dims <= 3 else self.points_high_dim


@functools.lru_cache(maxsize=None)
def _simplex_lattice(n: int, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((1, 0))
    pts = [c for c in itertools.product(range(n + 1), repeat=d) if sum(c) == n]
    return np.array(pts, dtype=float) / n


def _free_dims(mask: np.ndarray) -> int:
    return sum(max(int(mask[list(grp)].sum()) - 1, 0) for grp in GROUPS)


def _repair(A: np.ndarray, mask: np.ndarray) -> np.ndarray:
    # coherent relay power needs a coherent user signal; otherwise hand it
    # to the binning part (or drop it when binning is not part of the scheme)
    A = A.copy()
    for ai, pi in ((0, 6), (3, 7)):
        bad = (A[:, pi] > 0.0) & (A[:, ai] == 0.0)
        if mask[8]:
            A[bad, 8] += A[bad, pi]
        A[bad, pi] = 0.0
    return A


def allocation_grid(p: PowerBudget, kind: SchemeKind, search: SearchConfig) -> np.ndarray:
    """Lattice of budget-saturating allocations for the scheme's free fields."""
    mask = kind.mask
    n = search.points_for(_free_dims(mask)) - 1
    budgets = (p.p1, p.p2, p.pr)
    blocks = []
    for grp, budget in zip(GROUPS, budgets):
        idx = [k for k in grp if mask[k]]
        lat = _simplex_lattice(n, len(idx)) if idx and budget > 0 else np.zeros((1, 0))
        block = np.zeros((len(lat), 3))
        for j, k in enumerate(idx if budget > 0 else []):
            block[:, k - grp[0]] = lat[:, j] * budget
        blocks.append(block)
    i, j, k = np.meshgrid(*(np.arange(len(b)) for b in blocks), indexing="ij")
    A = np.hstack([blocks[0][i.ravel()], blocks[1][j.ravel()], blocks[2][k.ravel()]])
    return _repair(A, mask)


def pentagon_support(a, b, c, w: np.ndarray) -> np.ndarray:
    """Support value of pentagons ``(a, b, c)`` along each direction in ``w``.

    Returns an array of shape ``(len(a), len(w))``.
    """
    a = np.minimum(a, c)
    b = np.minimum(b, c)
    w1, w2 = w[:, 0][None, :], w[:, 1][None, :]
    a, b, c = a[:, None], b[:, None], c[:, None]
    lower = w1 * a + w2 * np.minimum(b, np.maximum(c - a, 0.0))
    upper = w1 * np.minimum(a, np.maximum(c - b, 0.0)) + w2 * b
    return np.maximum(np.maximum(w1 * a, w2 * b), np.maximum(lower, upper))


def _moves(mask: np.ndarray) -> list[tuple[int, int]]:
    out = []
    for grp in GROUPS:
        idx = [k for k in grp if mask[k]]
        out.extend(itertools.permutations(idx, 2))
    return out


def _descend(g, x0, w, moves, budgets, mask, search, sink):
    """Pairwise-transfer coordinate ascent of one support value."""
    x = x0.copy()
    best = pentagon_support(*fd_rates(g, x[None, :]), w[None, :])[0, 0]
    step_scale = 1.0 / max(search.points_for(_free_dims(mask)) - 1, 1)
    for level in range(search.halvings + 1):
        steps = np.array([budgets[k // 3] for k in range(9)]) * step_scale / 2**level
        for _ in range(search.max_moves):
            cand = []
            for src, dst in moves:
                amount = min(steps[src], x[src])
                if amount <= 0.0:
                    continue
                y = x.copy()
                y[src] -= amount
                y[dst] += amount
                cand.append(y)
            if not cand:
                break
            C = _repair(np.array(cand), mask)
            r = fd_rates(g, C)
            sink.append(pentagon_points(*r))
            vals = pentagon_support(*r, w[None, :])[:, 0]
            i = int(np.argmax(vals))
            if vals[i] <= best + 1e-15:
                break
            best, x = vals[i], C[i]
    return x


def _search_points(g: ChannelGains, p: PowerBudget, kind: SchemeKind, search: SearchConfig):
    A = allocation_grid(p, kind, search)
    r = fd_rates(g, A)
    pts = [pentagon_points(*r)]
    if search.refine and len(A) > 1:
        mask = kind.mask
        moves = _moves(mask)
        if moves:
            theta = np.linspace(0.0, math.pi / 2, search.directions)
            W = np.column_stack([np.cos(theta), np.sin(theta)])
            sup = pentagon_support(*r, W)
            budgets = (p.p1, p.p2, p.pr)
            for d in range(len(W)):
                x0 = A[int(np.argmax(sup[:, d]))]
                _descend(g, x0, W[d], moves, budgets, mask, search, pts)
    return np.vstack(pts)


@functools.lru_cache(maxsize=256)
def optimize_fd_region(
    g: ChannelGains,
    p: PowerBudget,
    kind: SchemeKind = SchemeKind.COMPOSITE,
    search: SearchConfig = SearchConfig(),
) -> RateRegion:
    """Convex closure of the scheme's pentagons over a searched allocation set.

    The search set of a scheme includes the search sets of every scheme it
    generalizes, so nested schemes give nested regions.
    """
    pts = [_search_points(g, p, kind, search)]
    for sub in sub_kinds(kind):
        pts.append(optimize_fd_region(g, p, sub, search).vertices)
    return hull_of_points(np.vstack(pts))
