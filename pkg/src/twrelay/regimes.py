"""Link-regime analysis for independent partial decode-forward relaying.

Regimes:

* ``E``: both relay links are no better than the direct links; direct
  transmission is optimal.
* ``D``: both relay links are better and full decode-forward wins on sum rate.
* ``C``: both relay links are better but time sharing between full DF and
  direct transmission is optimal.
* ``B``: one user relays with full DF while the other transmits directly.
* ``A``: one user relays with DF, the other splits its message (partial DF);
  in a sub-regime this is no better than DF/DT time sharing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twrelay.channel import ChannelGains, DomainError, PowerBudget, cap, capacity
from twrelay.geometry import (
    RatePentagon,
    RateRegion,
    convex_union,
    exceedance,
    hull_of_points,
    pentagon_points,
    pentagon_vertices,
)

STRICT_MARGIN = 1e-6
TIMESHARE_MARGIN = 1e-6

SUB_LABELS = {
    ("A", 1): "user1_dfdt_user2_pdf",
    ("A", 2): "user1_pdf_user2_dfdt",
    ("B", 1): "user1_df_user2_dt",
    ("B", 2): "user1_dt_user2_df",
}

# prediction each label makes about the pDF region versus DF/DT time sharing
EXPECTED_OUTCOME = {
    "A": "exceeds",
    "A-ts": "timeshare",
    "B": "exceeds",
    "C": "timeshare",
    "D": "collapse_df",
    "E": "collapse_dt",
}


@dataclass(frozen=True)
class RegimeLabel:
    major: str
    sub: str | None = None
    timeshare_equivalent: bool | None = None

    def __post_init__(self):
        if self.major not in ("A", "B", "C", "D", "E"):
            raise DomainError(f"unknown regime {self.major!r}")
        if (self.sub is not None) != (self.major in ("A", "B")):
            raise DomainError("sub label is required exactly for regimes A and B")
        if (self.timeshare_equivalent is not None) != (self.major == "A"):
            raise DomainError("timeshare flag is required exactly for regime A")

    @property
    def relay_user(self) -> int | None:
        """User whose message the relay fully decodes in regimes A and B."""
        if self.sub is None:
            return None
        return 1 if self.sub.startswith("user1_df") else 2

    @property
    def key(self) -> str:
        return "A-ts" if self.timeshare_equivalent else self.major

    def mirrored(self) -> "RegimeLabel":
        if self.sub is None:
            return self
        side = 2 if self.relay_user == 1 else 1
        return RegimeLabel(self.major, SUB_LABELS[(self.major, side)], self.timeshare_equivalent)


@dataclass(frozen=True)
class TimeshareCertificate:
    """Weighted-sum-rate comparison of partial DF against DF/DT time sharing.

    ``pdf_user`` is the user that keeps private power ``gamma_star``; the other
    user sends everything through the relay.
    """

    pdf_user: int
    mu: float
    gamma_star: float
    r_s: float
    r_ts: float

    @property
    def gammas(self) -> tuple[float, float]:
        return (0.0, self.gamma_star) if self.pdf_user == 2 else (self.gamma_star, 0.0)


def _check_gamma(name, value, limit):
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or value > limit:
        raise DomainError(f"{name}={value!r} outside [0, {limit!r}]")
    return value


def pdf_rates(g: ChannelGains, p: PowerBudget, gamma1, gamma2):
    """Vectorised ``(J1, J2, J3, J4, J5)`` of the independent pDF region."""
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    gamma1 = np.asarray(gamma1, dtype=float)
    gamma2 = np.asarray(gamma2, dtype=float)
    b1 = p.p1 - gamma1
    b2 = p.p2 - gamma2
    den = qr1 * gamma1 + qr2 * gamma2 + 1.0
    d1 = cap(q21 * gamma1)
    d2 = cap(q12 * gamma2)
    j1 = cap(qr1 * b1 / den) + d1
    j2 = cap(qr2 * b2 / den) + d2
    j3 = cap((qr1 * b1 + qr2 * b2) / den) + d1 + d2
    j4 = cap(q21 * p.p1 + q2r * p.pr)
    j5 = cap(q12 * p.p2 + q1r * p.pr)
    return j1, j2, j3, j4, j5


def independent_pdf_pentagon(g: ChannelGains, p: PowerBudget, gamma1: float, gamma2: float) -> RatePentagon:
    """Pentagon of independent partial DF with private powers ``gamma1``, ``gamma2``."""
    gamma1 = _check_gamma("gamma1", gamma1, p.p1)
    gamma2 = _check_gamma("gamma2", gamma2, p.p2)
    j1, j2, j3, j4, j5 = (float(v) for v in pdf_rates(g, p, gamma1, gamma2))
    return RatePentagon(min(j1, j4), min(j2, j5), j3)


def weighted_objective_f(g: ChannelGains, p: PowerBudget, gamma1, gamma2, mu: float):
    """``J3 - J1 + mu * J1``: weighted rate of the lower pentagon corner."""
    j1, _, j3, _, _ = pdf_rates(g, p, gamma1, gamma2)
    out = j3 - j1 + mu * j1
    return float(out) if np.ndim(out) == 0 else out


def _certificate_user2(g: ChannelGains, p: PowerBudget) -> TimeshareCertificate:
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    P1, P2 = p.p1, p.p2
    k = qr1 * P1
    c_r1 = capacity(k)
    c_21 = capacity(q21 * P1)
    c_12 = capacity(q12 * P2)
    c_r2 = capacity(qr2 * P2 / (1.0 + k))
    den_mu = c_r1 - c_21
    if not den_mu > 0.0:
        raise DomainError("relay link of the DF user is not stronger than its direct link")
    mu = (c_12 - c_r2) / den_mu
    if mu < 0.0:
        raise DomainError("negative slope weight: the direct link of the pDF user is too weak")

    def f0(gam):
        return (
            capacity(q12 * gam)
            + capacity(qr2 * (P2 - gam) / (1.0 + k + qr2 * gam))
            + mu * capacity(k / (1.0 + qr2 * gam))
        )

    num = qr2 * k * mu - (q12 - qr2 + q12 * k)
    den = qr2 * (q12 - qr2 + q12 * k * (1.0 - mu))
    if den < 0.0:
        gamma = min(max(num / den, 0.0), P2)
    else:
        # objective has no interior maximum; take the better endpoint
        gamma = P2 if f0(P2) > f0(0.0) else 0.0
    r_s = f0(gamma)
    r_ts = (c_r1 * c_12 - c_r2 * c_21) / den_mu
    return TimeshareCertificate(pdf_user=2, mu=mu, gamma_star=gamma, r_s=r_s, r_ts=r_ts)


def timeshare_certificate(g: ChannelGains, p: PowerBudget, pdf_user: int = 2) -> TimeshareCertificate:
    """Closed-form slope weight, optimal private power and both support values."""
    if pdf_user == 2:
        return _certificate_user2(g, p)
    if pdf_user == 1:
        c = _certificate_user2(g.mirrored(), p.mirrored())
        return TimeshareCertificate(1, c.mu, c.gamma_star, c.r_s, c.r_ts)
    raise DomainError(f"pdf_user must be 1 or 2, got {pdf_user!r}")


def gamma2_max(g: ChannelGains, p: PowerBudget) -> float:
    """Largest private power of user 2 that keeps user 1 at its relay bound."""
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    if p.p1 <= 0.0:
        raise DomainError("p1 must be positive")
    eff = q21 + q2r * p.pr / p.p1
    if qr1 >= eff * (1.0 + qr2 * p.p2):
        return p.p2
    if qr1 < eff:
        raise DomainError("relay link of user 1 is below the coherent threshold")
    return (qr1 / eff - 1.0) / qr2


def _classify_side1(g: ChannelGains, p: PowerBudget) -> RegimeLabel:
    # user 1 relays (gr1 > g21), user 2 has the stronger direct link
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    eff = q21 + q2r * p.pr / p.p1
    if qr1 >= eff * (1.0 + qr2 * p.p2):
        return RegimeLabel("B", SUB_LABELS[("B", 1)])
    if qr1 < min(eff, q21 * (1.0 + qr2 * p.p2)):
        c = _certificate_user2(g, p)
        ts = c.r_s <= c.r_ts + TIMESHARE_MARGIN * math.hypot(1.0, c.mu)
        return RegimeLabel("A", SUB_LABELS[("A", 1)], ts)
    return RegimeLabel("A", SUB_LABELS[("A", 1)], False)


def classify_regime(g: ChannelGains, p: PowerBudget) -> RegimeLabel:
    """Closed-form regime of a channel; ties go to the simpler scheme."""
    if min(p.p1, p.p2, p.pr) <= 0.0:
        raise DomainError("classification needs positive power budgets")
    q12, q1r, q21, q2r, qr1, qr2 = g.squared()
    if qr1 <= q21 and qr2 <= q12:
        return RegimeLabel("E")
    if qr1 >= q21 and qr2 >= q12:
        df = capacity(qr1 * p.p1 + qr2 * p.p2)
        dt = capacity(q21 * p.p1) + capacity(q12 * p.p2)
        return RegimeLabel("D") if df >= dt else RegimeLabel("C")
    if qr1 > q21:
        return _classify_side1(g, p)
    return _classify_side1(g.mirrored(), p.mirrored()).mirrored()


def analyze(g: ChannelGains, p: PowerBudget) -> tuple[RegimeLabel, TimeshareCertificate | None]:
    """Regime label together with the certificate used for regimes A and B."""
    label = classify_regime(g, p)
    if label.major not in ("A", "B"):
        return label, None
    pdf_user = 2 if label.relay_user == 1 else 1
    return label, timeshare_certificate(g, p, pdf_user)


def optimal_gammas(label: RegimeLabel, cert: TimeshareCertificate | None, p: PowerBudget) -> tuple[float, float]:
    """Private powers predicted by the regime (NaN when time sharing is optimal)."""
    if label.major == "D":
        return (0.0, 0.0)
    if label.major == "E":
        return (p.p1, p.p2)
    if cert is None:
        return (math.nan, math.nan)
    return cert.gammas


@dataclass(frozen=True, eq=False)
class OracleVerdict:
    """Outcome of comparing the gridded pDF region with DF/DT time sharing."""

    outcome: str
    exceedance: float
    hausdorff: float
    gamma_star: tuple[float, float] | None
    pdf_region: RateRegion
    timeshare_region: RateRegion

    @property
    def exceeds(self) -> bool:
        return self.outcome == "exceeds"

    @property
    def coincide(self) -> bool:
        return self.hausdorff < STRICT_MARGIN


def pdf_grid(g: ChannelGains, p: PowerBudget, grid_n: int):
    """Pentagon constraints over a ``grid_n`` x ``grid_n`` grid of private powers."""
    G1, G2 = np.meshgrid(
        np.linspace(0.0, p.p1, grid_n), np.linspace(0.0, p.p2, grid_n), indexing="ij"
    )
    j1, j2, j3, j4, j5 = pdf_rates(g, p, G1, G2)
    return G1, G2, np.minimum(j1, j4), np.minimum(j2, j5), j3


def dfdt_region(g: ChannelGains, p: PowerBudget) -> RateRegion:
    """Time sharing between full DF and direct transmission."""
    df = pentagon_vertices(independent_pdf_pentagon(g, p, 0.0, 0.0))
    dt = pentagon_vertices(independent_pdf_pentagon(g, p, p.p1, p.p2))
    return convex_union([df, dt])


def brute_force_regime_oracle(g: ChannelGains, p: PowerBudget, grid_n: int = 201) -> OracleVerdict:
    """Grid-based verdict that does not rely on any closed-form regime test."""
    if grid_n < 2:
        raise DomainError("grid_n must be >= 2")
    G1, G2, a, b, c = pdf_grid(g, p, grid_n)
    pdf = hull_of_points(pentagon_points(a, b, c))
    ts = dfdt_region(g, p)
    ex = exceedance(ts, pdf)
    hd = max(ex, exceedance(pdf, ts))

    # allocations whose single pentagon already covers the whole pDF region
    v = pdf.vertices
    av, bv, cv = (x.ravel()[:, None] for x in (np.minimum(a, c), np.minimum(b, c), c))
    viol = np.maximum(
        np.maximum(v[None, :, 0] - av, v[None, :, 1] - bv),
        (v[None, :, 0] + v[None, :, 1] - cv) / math.sqrt(2.0),
    ).max(axis=1)
    ok = viol <= STRICT_MARGIN
    n = grid_n - 1
    witness = None
    for i, j in ((0, 0), (n, n), (0, n), (n, 0)):
        if ok[i * grid_n + j]:
            witness = (i, j)
            break
    if witness is None and ok.any():
        witness = divmod(int(np.argmax(ok)), grid_n)
    gamma_star = None if witness is None else (float(G1[witness]), float(G2[witness]))

    if ex > STRICT_MARGIN:
        outcome = "exceeds"
    elif witness == (0, 0):
        outcome = "collapse_df"
    elif witness == (n, n):
        outcome = "collapse_dt"
    elif hd < STRICT_MARGIN:
        outcome = "timeshare"
    else:
        outcome = "indeterminate"
    return OracleVerdict(outcome, ex, hd, gamma_star, pdf, ts)


def outcomes_agree(label: RegimeLabel, outcome: str) -> bool:
    return EXPECTED_OUTCOME[label.key] == outcome
