"""Six-phase half-duplex partial decode-forward region.

Phases: (1) user 1 transmits, (2) user 2 transmits, (3) both users transmit
to the relay, (4) user 1 and relay transmit coherently to user 2, (5) user 2
and relay transmit coherently to user 1, (6) relay broadcasts the bin index.
Per-phase powers are instantaneous; a node's average power is the
duration-weighted sum over the phases in which it transmits.
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
from twrelay.fullduplex import pentagon_support

TAU_FIELDS = ("tau1", "tau2", "tau3", "tau4", "tau5", "tau6")
POWER_FIELDS = (
    "alpha11", "beta11", "alpha22", "beta22", "alpha13", "alpha23",
    "alpha14", "beta14", "gamma34", "alpha25", "beta25", "gamma35", "gamma36",
)
HD_FIELDS = TAU_FIELDS + POWER_FIELDS
_COL = {name: i for i, name in enumerate(HD_FIELDS)}

# phase of each power field, and which node spends it
_PHASE = {
    "alpha11": 1, "beta11": 1, "alpha22": 2, "beta22": 2, "alpha13": 3, "alpha23": 3,
    "alpha14": 4, "beta14": 4, "gamma34": 4, "alpha25": 5, "beta25": 5, "gamma35": 5,
    "gamma36": 6,
}
_NODE_FIELDS = (
    ("alpha11", "beta11", "alpha13", "alpha14", "beta14"),
    ("alpha22", "beta22", "alpha23", "alpha25", "beta25"),
    ("gamma34", "gamma35", "gamma36"),
)
TAU_TOL = 1e-12
BUDGET_SLACK = 1e-12


@dataclass(frozen=True)
class HdAllocation:
    tau1: float = 0.0
    tau2: float = 0.0
    tau3: float = 0.0
    tau4: float = 0.0
    tau5: float = 0.0
    tau6: float = 0.0
    alpha11: float = 0.0
    beta11: float = 0.0
    alpha22: float = 0.0
    beta22: float = 0.0
    alpha13: float = 0.0
    alpha23: float = 0.0
    alpha14: float = 0.0
    beta14: float = 0.0
    gamma34: float = 0.0
    alpha25: float = 0.0
    beta25: float = 0.0
    gamma35: float = 0.0
    gamma36: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{f.name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, f.name, v)
        total = sum(getattr(self, t) for t in TAU_FIELDS)
        if abs(total - 1.0) > TAU_TOL:
            raise DomainError(f"phase durations must sum to 1, got {total!r}")
        # power in an unused phase is meaningless
        for name, ph in _PHASE.items():
            if getattr(self, f"tau{ph}") == 0.0:
                object.__setattr__(self, name, 0.0)

    @property
    def taus(self) -> np.ndarray:
        return np.array([getattr(self, t) for t in TAU_FIELDS])

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in HD_FIELDS])

    @classmethod
    def from_vector(cls, v) -> "HdAllocation":
        return cls(**{name: float(x) for name, x in zip(HD_FIELDS, v)})

    def average_powers(self) -> tuple[float, float, float]:
        out = []
        for names in _NODE_FIELDS:
            out.append(sum(getattr(self, f"tau{_PHASE[n]}") * getattr(self, n) for n in names))
        return tuple(out)

    def check_budget(self, p: PowerBudget) -> None:
        for name, used, lim in zip(("user 1", "user 2", "relay"), self.average_powers(), (p.p1, p.p2, p.pr)):
            if used > lim + BUDGET_SLACK:
                raise DomainError(f"{name} uses {used!r} > budget {lim!r}")


def hd_rates(g: ChannelGains, M: np.ndarray):
    """Vectorised pentagon constraints for rows of ``HD_FIELDS`` values."""
    M = np.asarray(M, dtype=float)
    col = {name: M[:, i] for name, i in _COL.items()}
    t1, t2, t3, t4, t5, t6 = (col[t] for t in TAU_FIELDS)
    g12, g1r, g21, g2r, gr1, gr2 = g.as_tuple()
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    a11, b11, a22, b22 = col["alpha11"], col["beta11"], col["alpha22"], col["beta22"]
    s1 = t1 * cap(qr1 * a11 / (qr1 * b11 + 1.0))
    s2 = t2 * cap(qr2 * a22 / (qr2 * b22 + 1.0))
    j1 = s1 + t3 * cap(qr1 * col["alpha13"])
    j2 = s2 + t3 * cap(qr2 * col["alpha23"])
    j3 = s1 + s2 + t3 * cap(qr1 * col["alpha13"] + qr2 * col["alpha23"])
    j4 = t1 * cap(q21 * b11) + t4 * cap(q21 * col["beta14"])
    j5 = (
        t1 * cap(q21 * (a11 + b11))
        + t6 * cap(q2r * col["gamma36"])
        + t4 * cap((g21 * np.sqrt(col["alpha14"]) + g2r * np.sqrt(col["gamma34"])) ** 2 + q21 * col["beta14"])
    )
    j6 = t2 * cap(q12 * b22) + t5 * cap(q12 * col["beta25"])
    j7 = (
        t2 * cap(q12 * (a22 + b22))
        + t6 * cap(q1r * col["gamma36"])
        + t5 * cap((g12 * np.sqrt(col["alpha25"]) + g1r * np.sqrt(col["gamma35"])) ** 2 + q12 * col["beta25"])
    )
    return np.minimum(j1 + j4, j5), np.minimum(j2 + j6, j7), j3 + j4 + j6


def hd_terms(g: ChannelGains, a: HdAllocation) -> dict[str, float]:
    """The seven rate terms of one allocation, keyed ``J1`` .. ``J7``."""
    t = a.taus
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    C = lambda x: float(cap(x))
    s1 = t[0] * C(qr1 * a.alpha11 / (qr1 * a.beta11 + 1.0))
    s2 = t[1] * C(qr2 * a.alpha22 / (qr2 * a.beta22 + 1.0))
    coh4 = (g.g21 * math.sqrt(a.alpha14) + g.g2r * math.sqrt(a.gamma34)) ** 2
    coh5 = (g.g12 * math.sqrt(a.alpha25) + g.g1r * math.sqrt(a.gamma35)) ** 2
    return {
        "J1": s1 + t[2] * C(qr1 * a.alpha13),
        "J2": s2 + t[2] * C(qr2 * a.alpha23),
        "J3": s1 + s2 + t[2] * C(qr1 * a.alpha13 + qr2 * a.alpha23),
        "J4": t[0] * C(q21 * a.beta11) + t[3] * C(q21 * a.beta14),
        "J5": t[0] * C(q21 * (a.alpha11 + a.beta11)) + t[5] * C(q2r * a.gamma36) + t[3] * C(coh4 + q21 * a.beta14),
        "J6": t[1] * C(q12 * a.beta22) + t[4] * C(q12 * a.beta25),
        "J7": t[1] * C(q12 * (a.alpha22 + a.beta22)) + t[5] * C(q1r * a.gamma36) + t[4] * C(coh5 + q12 * a.beta25),
    }


def hd_pentagon(g: ChannelGains, a: HdAllocation, p: PowerBudget | None = None) -> RatePentagon:
    """Rate pentagon of one half-duplex allocation."""
    if p is not None:
        a.check_budget(p)
    r1, r2, s = hd_rates(g, a.to_vector()[None, :])
    return RatePentagon(float(r1[0]), float(r2[0]), float(s[0]))


class HdSchemeKind(enum.Enum):
    FULL = "full"
    FOUR_PHASE = "four-phase"
    GERDES_SIX_PHASE = "gerdes-six-phase"
    INDEPENDENT_SIX_PHASE = "independent-six-phase"

    @property
    def zeroed(self) -> frozenset[str]:
        return _ZEROED[self]


_ZEROED = {
    HdSchemeKind.FULL: frozenset(),
    HdSchemeKind.FOUR_PHASE: frozenset({"tau4", "tau5"}),
    HdSchemeKind.GERDES_SIX_PHASE: frozenset({"beta11", "beta22"}),
    HdSchemeKind.INDEPENDENT_SIX_PHASE: frozenset({"beta11", "beta22", "alpha14", "alpha25"}),
}


def hd_sub_kinds(scheme: HdSchemeKind) -> list[HdSchemeKind]:
    """Schemes whose allocation sets lie inside ``scheme``'s."""
    return [k for k in HdSchemeKind if k is not scheme and scheme.zeroed <= k.zeroed]


def hd_restrict(scheme: HdSchemeKind, a: HdAllocation, p: PowerBudget | None = None) -> HdAllocation:
    """Zero the scheme's excluded fields.

    Freed phase duration is spread over the remaining phases in proportion to
    their durations (evenly when none remain).  With a budget ``p``, any node
    that ends up over budget has all its phase powers scaled down uniformly.
    """
    v = a.to_vector()
    for name in scheme.zeroed:
        v[_COL[name]] = 0.0
    tau = v[:6]
    total = tau.sum()
    if total <= 0.0:
        keep = np.array([f"tau{i}" not in scheme.zeroed for i in range(1, 7)], dtype=float)
        tau = keep / keep.sum()
    else:
        tau = tau / total
    v[:6] = tau
    for name, ph in _PHASE.items():
        if tau[ph - 1] == 0.0:
            v[_COL[name]] = 0.0
    if p is not None:
        for names, lim in zip(_NODE_FIELDS, (p.p1, p.p2, p.pr)):
            used = sum(tau[_PHASE[n] - 1] * v[_COL[n]] for n in names)
            if used > lim:
                scale = lim / used
                for n in names:
                    v[_COL[n]] *= scale
    return HdAllocation.from_vector(v)


@dataclass(frozen=True)
class HdSearchConfig:
    """Search budget for half-duplex regions.

    ``tau`` pins the phase durations; otherwise they range over a lattice of
    step ``tau_step`` on the simplex.  ``power_points`` is the lattice size per
    inner dimension (energy shares and common/private fractions).
    """

    tau_step: float = 0.1
    tau: tuple[float, ...] | None = None
    power_points: int = 3
    refine: bool = True
    halvings: int = 6
    directions: int = 17
    max_moves: int = 40

    def __post_init__(self):
        if self.tau is not None:
            t = tuple(float(x) for x in self.tau)
            if len(t) != 6 or min(t) < 0.0 or abs(sum(t) - 1.0) > 1e-9:
                raise DomainError("tau must be six nonnegative fractions summing to 1")
            object.__setattr__(self, "tau", t)
        n = 1.0 / self.tau_step if self.tau_step > 0 else 0.0
        if not (0.0 < self.tau_step <= 1.0) or abs(n - round(n)) > 1e-9:
            raise DomainError("tau_step must divide 1")
        if self.power_points < 2:
            raise DomainError("power_points must be >= 2")
        if self.halvings < 0 or self.directions < 2 or self.max_moves < 1:
            raise DomainError("invalid refinement settings")


@functools.lru_cache(maxsize=None)
def _simplex(n: int, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((1, 0))
    pts = [c for c in itertools.product(range(n + 1), repeat=d) if sum(c) == n]
    return np.array(pts, dtype=float) / n


def tau_lattice(scheme: HdSchemeKind, search: HdSearchConfig) -> np.ndarray:
    if search.tau is not None:
        taus = np.array([search.tau])
    else:
        taus = _simplex(int(round(1.0 / search.tau_step)), 6)
    keep = np.ones(len(taus), dtype=bool)
    for i in range(6):
        if f"tau{i + 1}" in scheme.zeroed:
            keep &= taus[:, i] == 0.0
    return taus[keep]


# inner parameters of each node: energy shares over its phases, then the
# common (coherent) fraction of each split phase
_USER_PHASES = ((1, 3, 4), (2, 3, 5))
_RELAY_PHASES = (4, 5, 6)


def _fraction_values(fixed: float | None, n: int, active: bool) -> np.ndarray:
    if fixed is not None:
        return np.array([fixed])
    if not active:
        return np.array([1.0])
    return np.linspace(0.0, 1.0, n)


def _fixed_fractions(scheme: HdSchemeKind, user: int):
    # returns fixed values for (split in own phase, split in coherent phase)
    z = scheme.zeroed
    first = 1.0 if f"beta{user}{user}" in z else None
    coh = f"alpha{user}{3 + user}"
    second = 0.0 if coh in z else None
    return first, second


@functools.lru_cache(maxsize=4096)
def _user_options(active: tuple[bool, bool, bool], fixed: tuple, n: int) -> np.ndarray:
    """Rows of (e_own, e_mac, e_coh, c_own, c_coh) for one user."""
    idx = [i for i in range(3) if active[i]]
    shares = _simplex(n - 1, len(idx)) if idx else np.zeros((1, 0))
    E = np.zeros((len(shares), 3))
    E[:, idx] = shares
    c_own = _fraction_values(fixed[0], n, active[0])
    c_coh = _fraction_values(fixed[1], n, active[2])
    rows = [np.r_[e, a, b] for e in E for a in c_own for b in c_coh]
    return np.unique(np.array(rows), axis=0)


@functools.lru_cache(maxsize=4096)
def _relay_options(active: tuple[bool, bool, bool], n: int) -> np.ndarray:
    idx = [i for i in range(3) if active[i]]
    shares = _simplex(n - 1, len(idx)) if idx else np.zeros((1, 0))
    E = np.zeros((len(shares), 3))
    E[:, idx] = shares
    return E


def _user_powers(X: np.ndarray, taus: np.ndarray, budget: float, phases) -> np.ndarray:
    # X rows (e_own, e_mac, e_coh, c_own, c_coh) -> (own_a, own_b, mac, coh_a, coh_b)
    t = np.array([taus[ph - 1] for ph in phases])
    inv = np.divide(budget, t, out=np.zeros(3), where=t > 0)
    pw = X[:, :3] * inv
    return np.column_stack(
        [pw[:, 0] * X[:, 3], pw[:, 0] * (1.0 - X[:, 3]), pw[:, 1], pw[:, 2] * X[:, 4], pw[:, 2] * (1.0 - X[:, 4])]
    )


def _relay_powers(X: np.ndarray, taus: np.ndarray, budget: float) -> np.ndarray:
    t = np.array([taus[ph - 1] for ph in _RELAY_PHASES])
    inv = np.divide(budget, t, out=np.zeros(3), where=t > 0)
    return X * inv


def _assemble(taus, u1, u2, rl) -> np.ndarray:
    """Full allocation rows from per-node power rows of equal length."""
    M = np.zeros((len(u1), len(HD_FIELDS)))
    M[:, :6] = taus
    for names, block in zip(_NODE_FIELDS, (u1, u2, rl)):
        for j, name in enumerate(names):
            M[:, _COL[name]] = block[:, j]
    return M


def _tensor_rates(g: ChannelGains, taus, u1, u2, rl):
    """Pentagon constraints for every (user 1, user 2, relay) combination."""
    t1, t2, t3, t4, t5, t6 = taus
    g12, g1r, g21, g2r, gr1, gr2 = g.as_tuple()
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    a11, b11, a13, a14, b14 = u1.T
    a22, b22, a23, a25, b25 = u2.T
    c34, c35, c36 = rl.T
    s1 = t1 * cap(qr1 * a11 / (qr1 * b11 + 1.0))
    s2 = t2 * cap(qr2 * a22 / (qr2 * b22 + 1.0))
    j1 = s1 + t3 * cap(qr1 * a13)
    j2 = s2 + t3 * cap(qr2 * a23)
    j3 = s1[:, None] + s2[None, :] + t3 * cap(qr1 * a13[:, None] + qr2 * a23[None, :])
    j4 = t1 * cap(q21 * b11) + t4 * cap(q21 * b14)
    j6 = t2 * cap(q12 * b22) + t5 * cap(q12 * b25)
    j5 = (
        (t1 * cap(q21 * (a11 + b11)))[:, None]
        + (t6 * cap(q2r * c36))[None, :]
        + t4 * cap((g21 * np.sqrt(a14)[:, None] + g2r * np.sqrt(c34)[None, :]) ** 2 + (q21 * b14)[:, None])
    )
    j7 = (
        (t2 * cap(q12 * (a22 + b22)))[:, None]
        + (t6 * cap(q1r * c36))[None, :]
        + t5 * cap((g12 * np.sqrt(a25)[:, None] + g1r * np.sqrt(c35)[None, :]) ** 2 + (q12 * b25)[:, None])
    )
    r1 = np.minimum((j1 + j4)[:, None], j5)[:, None, :]
    r2 = np.minimum((j2 + j6)[:, None], j7)[None, :, :]
    s = (j3 + j4[:, None] + j6[None, :])[:, :, None]
    return np.broadcast_arrays(r1, r2, s)


class _Parts:
    """Inner-search bookkeeping for one phase-duration vector."""

    def __init__(self, scheme: HdSchemeKind, taus: np.ndarray, p: PowerBudget, n: int):
        self.taus = taus
        self.p = p
        self.fixed = [_fixed_fractions(scheme, u) for u in (1, 2)]
        self.active_u = [tuple(bool(taus[ph - 1] > 0) for ph in phs) for phs in _USER_PHASES]
        self.active_r = tuple(bool(taus[ph - 1] > 0) for ph in _RELAY_PHASES)
        self.X1 = _user_options(self.active_u[0], self.fixed[0], n) if p.p1 > 0 else np.zeros((1, 5))
        self.X2 = _user_options(self.active_u[1], self.fixed[1], n) if p.p2 > 0 else np.zeros((1, 5))
        self.XR = _relay_options(self.active_r, n) if p.pr > 0 else np.zeros((1, 3))

    def powers(self, X1, X2, XR):
        return (
            _user_powers(X1, self.taus, self.p.p1, _USER_PHASES[0]),
            _user_powers(X2, self.taus, self.p.p2, _USER_PHASES[1]),
            _relay_powers(XR, self.taus, self.p.pr),
        )


def _refine(g, parts: _Parts, start, w, search, n, sink):
    """Coordinate ascent of one support value over the inner parameters."""
    x1, x2, xr = (np.array(v, dtype=float) for v in start)
    moves = []
    for node, act, fixed in ((0, parts.active_u[0], parts.fixed[0]), (1, parts.active_u[1], parts.fixed[1])):
        idx = [i for i in range(3) if act[i]]
        moves += [("share", node, s, d) for s, d in itertools.permutations(idx, 2)]
        if act[0] and fixed[0] is None:
            moves += [("frac", node, 3, +1), ("frac", node, 3, -1)]
        if act[2] and fixed[1] is None:
            moves += [("frac", node, 4, +1), ("frac", node, 4, -1)]
    idx = [i for i in range(3) if parts.active_r[i]]
    moves += [("share", 2, s, d) for s, d in itertools.permutations(idx, 2)]
    if not moves:
        return

    def rates(cands):
        u1, u2, rl = parts.powers(*(np.array([c[k] for c in cands]) for k in range(3)))
        M = _assemble(parts.taus, u1, u2, rl)
        return hd_rates(g, M)

    best = pentagon_support(*rates([(x1, x2, xr)]), w[None, :])[0, 0]
    for level in range(search.halvings + 1):
        step = 1.0 / (n - 1) / 2**level
        for _ in range(search.max_moves):
            cands = []
            for kind, node, s, d in moves:
                cur = [x1.copy(), x2.copy(), xr.copy()]
                v = cur[node]
                if kind == "share":
                    amt = min(step, v[s])
                    if amt <= 0.0:
                        continue
                    v[s] -= amt
                    v[d] += amt
                else:
                    new = min(max(v[s] + d * step, 0.0), 1.0)
                    if new == v[s]:
                        continue
                    v[s] = new
                cands.append(cur)
            if not cands:
                break
            r = rates(cands)
            sink.append(pentagon_points(*r))
            vals = pentagon_support(*r, w[None, :])[:, 0]
            i = int(np.argmax(vals))
            if vals[i] <= best + 1e-15:
                break
            best = vals[i]
            x1, x2, xr = cands[i]


def _search_points(g: ChannelGains, p: PowerBudget, scheme: HdSchemeKind, search: HdSearchConfig) -> np.ndarray:
    n = search.power_points
    theta = np.linspace(0.0, math.pi / 2, search.directions)
    W = np.column_stack([np.cos(theta), np.sin(theta)])
    pts = [np.zeros((1, 2))]
    best_val = np.full(len(W), -np.inf)
    best_at = [None] * len(W)
    for taus in tau_lattice(scheme, search):
        parts = _Parts(scheme, taus, p, n)
        u1, u2, rl = parts.powers(parts.X1, parts.X2, parts.XR)
        r1, r2, s = (x.ravel() for x in _tensor_rates(g, taus, u1, u2, rl))
        P = pentagon_points(r1, r2, s)
        pts.append(hull_of_points(P).vertices)
        if search.refine:
            sup = pentagon_support(r1, r2, s, W)
            arg = np.argmax(sup, axis=0)
            for d in range(len(W)):
                if sup[arg[d], d] > best_val[d]:
                    best_val[d] = sup[arg[d], d]
                    i1, i2, ir = np.unravel_index(arg[d], (len(u1), len(u2), len(rl)))
                    best_at[d] = (taus, (parts.X1[i1], parts.X2[i2], parts.XR[ir]))
    if search.refine:
        for d in range(len(W)):
            if best_at[d] is None:
                continue
            taus, start = best_at[d]
            _refine(g, _Parts(scheme, taus, p, n), start, W[d], search, n, pts)
    return np.vstack(pts)


@functools.lru_cache(maxsize=256)
def optimize_hd_region(
    g: ChannelGains,
    p: PowerBudget,
    scheme: HdSchemeKind = HdSchemeKind.FULL,
    search: HdSearchConfig = HdSearchConfig(),
) -> RateRegion:
    """Convex closure over searched phase durations and per-phase powers.

    Regions of schemes nested inside ``scheme`` are merged in, so the result
    always contains them.
    """
    pts = [_search_points(g, p, scheme, search)]
    for sub in hd_sub_kinds(scheme):
        pts.append(optimize_hd_region(g, p, sub, search).vertices)
    return hull_of_points(np.vstack(pts))
