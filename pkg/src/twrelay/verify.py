"""Seeded cross-checks of the closed-form regime analysis against grid oracles."""

from __future__ import annotations

from typing import Callable

import numpy as np

from twrelay.channel import ChannelGains, PowerBudget
from twrelay.geometry import support_value
from twrelay.regimes import (
    EXPECTED_OUTCOME,
    RegimeLabel,
    brute_force_regime_oracle,
    classify_regime,
    dfdt_region,
    timeshare_certificate,
    weighted_objective_f,
)

R_TS_TOL = 1e-9
ARGMAX_POINTS = 100_001


def random_gains(rng: np.random.Generator) -> ChannelGains:
    """Amplitudes log-uniform on [0.1, 10]."""
    return ChannelGains(*(10.0 ** rng.uniform(-1.0, 1.0, 6)))


def draw_channels(seed: int, draws: int) -> list[ChannelGains]:
    rng = np.random.default_rng(seed)
    return [random_gains(rng) for _ in range(draws)]


def faulty_classifier(g: ChannelGains, p: PowerBudget) -> RegimeLabel:
    """Classifier with the DF/DT collapse regimes swapped, for harness self-tests."""
    label = classify_regime(g, p)
    swap = {"D": "E", "E": "D"}
    return RegimeLabel(swap[label.major]) if label.major in swap else label


def _num(x: float) -> float:
    return float(f"{x:.9g}")


def _record(i: int, g: ChannelGains, label: RegimeLabel, **extra) -> dict:
    rec = {"draw": i, "gains": [_num(v) for v in g.as_tuple()], "regime": label.key}
    rec.update({k: (_num(v) if isinstance(v, float) else v) for k, v in extra.items()})
    return rec


def argmax_private_power(g: ChannelGains, p: PowerBudget, pdf_user: int, mu: float, points: int = ARGMAX_POINTS) -> float:
    """Grid maximizer of the weighted objective over the pDF user's private power."""
    if pdf_user == 2:
        grid = np.linspace(0.0, p.p2, points)
        vals = weighted_objective_f(g, p, 0.0, grid, mu)
    else:
        grid = np.linspace(0.0, p.p1, points)
        vals = weighted_objective_f(g.mirrored(), p.mirrored(), 0.0, grid, mu)
    return float(grid[int(np.argmax(vals))])


def run_verification(
    seed: int = 42,
    draws: int = 200,
    grid: int = 201,
    power: PowerBudget = PowerBudget(1.0, 1.0, 1.0),
    classifier: Callable[[ChannelGains, PowerBudget], RegimeLabel] = classify_regime,
    argmax_points: int = ARGMAX_POINTS,
) -> dict:
    """Run every property on ``draws`` seeded channels and return a report."""
    props = {
        name: {"name": name, "checked": 0, "failures": 0, "counterexamples": []}
        for name in ("classifier_oracle_agreement", "gamma_star_closed_form", "r_ts_closed_form", "endpoint_cases")
    }

    def tally(name, ok, rec):
        props[name]["checked"] += 1
        if not ok:
            props[name]["failures"] += 1
            props[name]["counterexamples"].append(rec)

    for i, g in enumerate(draw_channels(seed, draws)):
        label = classifier(g, power)
        verdict = brute_force_regime_oracle(g, power, grid)
        expected = EXPECTED_OUTCOME[label.key]
        tally(
            "classifier_oracle_agreement",
            expected == verdict.outcome,
            _record(i, g, label, expected=expected, oracle=verdict.outcome,
                    exceedance=verdict.exceedance, hausdorff=verdict.hausdorff),
        )
        if label.major in ("D", "E"):
            want = (0.0, 0.0) if label.major == "D" else (power.p1, power.p2)
            got = verdict.gamma_star
            tally(
                "endpoint_cases",
                got == want,
                _record(i, g, label, expected_gamma=list(want), oracle_gamma=None if got is None else list(got)),
            )
        if label.major == "A":
            pdf_user = 2 if label.relay_user == 1 else 1
            cert = timeshare_certificate(g, power, pdf_user)
            limit = power.p2 if pdf_user == 2 else power.p1
            step = limit / (argmax_points - 1)
            numeric = argmax_private_power(g, power, pdf_user, cert.mu, argmax_points)
            tally(
                "gamma_star_closed_form",
                abs(numeric - cert.gamma_star) <= step * (1 + 1e-9),
                _record(i, g, label, mu=cert.mu, gamma_star=cert.gamma_star, numeric_argmax=numeric),
            )
            # the slope weight multiplies the rate of the user that relays
            if pdf_user == 2:
                geo = support_value(dfdt_region(g, power), cert.mu)
            else:
                geo = support_value(dfdt_region(g.mirrored(), power.mirrored()), cert.mu)
            tally(
                "r_ts_closed_form",
                abs(cert.r_ts - geo) <= R_TS_TOL,
                _record(i, g, label, mu=cert.mu, r_ts=cert.r_ts, hull_support=geo),
            )

    out = []
    for rec in props.values():
        rec["passed"] = rec["failures"] == 0
        out.append({k: rec[k] for k in ("name", "passed", "checked", "failures", "counterexamples")})
    return {
        "seed": seed,
        "draws": draws,
        "grid": grid,
        "power": [power.p1, power.p2, power.pr],
        "passed": all(r["passed"] for r in out),
        "properties": out,
    }
