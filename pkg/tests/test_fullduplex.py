import math

import numpy as np
import pytest

from conftest import LOG2_3, LOG2_7, sq
from twrelay.channel import ChannelGains, DomainError, PowerBudget
from twrelay.fullduplex import (
    FdAllocation,
    SchemeKind,
    SearchConfig,
    allocation_grid,
    fd_pentagon,
    fd_rates,
    optimize_fd_region,
    restrict,
    sub_kinds,
)
from twrelay.geometry import contains, convex_union, exceedance, pentagon_vertices

FAST = SearchConfig(points_low_dim=9, points_high_dim=5, halvings=3, directions=9)


def test_silent_network():
    p = fd_pentagon(ChannelGains(1, 1, 1, 1, 1, 1), FdAllocation())
    assert p.as_tuple() == (0.0, 0.0, 0.0)


def test_independent_df_example():
    g = sq(1, 1, 1, 1, 3, 3)
    p = fd_pentagon(g, FdAllocation(beta1=1, beta2=1, beta3=1))
    # I1 = I2 = C(3) = 2, I3 = C(6), I5 = I7 = C(1 + 1) = log2 3
    assert p.r1_max == pytest.approx(LOG2_3)
    assert p.r2_max == pytest.approx(LOG2_3)
    assert p.sum_max == pytest.approx(LOG2_7)


def test_dt_example():
    g = sq(1, 1, 1, 1, 3, 3)
    p = fd_pentagon(g, FdAllocation(gamma1=1, gamma2=1))
    assert p.as_tuple() == pytest.approx((1.0, 1.0, 2.0))


def test_coherent_term_uses_amplitude_sum():
    g = ChannelGains(1, 1, 1, 2, 10, 10)
    a = FdAllocation(alpha1=1, beta1=5, pr1=1)
    # I5 = C((1 + 2)^2 + 5) beats the independent C(1 + 4 + 5); I1 = C(500)
    assert fd_pentagon(g, a).r1_max == pytest.approx(math.log2(15))
    assert fd_pentagon(g, FdAllocation(alpha1=1, pr1=0.0, beta1=5)).r1_max == pytest.approx(math.log2(7))


def test_allocation_invariants():
    with pytest.raises(DomainError):
        FdAllocation(pr1=0.5)
    with pytest.raises(DomainError):
        FdAllocation(alpha2=0, pr2=0.1)
    with pytest.raises(DomainError):
        FdAllocation(beta1=-1)
    over = FdAllocation(alpha1=0.5, beta1=0.6)
    with pytest.raises(DomainError):
        fd_pentagon(ChannelGains(1, 1, 1, 1, 1, 1), over, PowerBudget(1, 1, 1))
    fd_pentagon(ChannelGains(1, 1, 1, 1, 1, 1), FdAllocation(alpha1=0.5, beta1=0.5 + 1e-13), PowerBudget(1, 1, 1))


def test_k_factors():
    assert FdAllocation(alpha1=0.5, pr1=1.0, alpha2=0.25, pr2=0.5).k_factors() == (2.0, 2.0)


ALLOC = FdAllocation(alpha1=0.3, beta1=0.3, gamma1=0.4, alpha2=0.2, beta2=0.5, gamma2=0.3, pr1=0.2, pr2=0.3, beta3=0.5)


def test_restrict_markov():
    r = restrict(SchemeKind.MARKOV_DF, ALLOC)
    assert (r.gamma1, r.gamma2, r.beta3) == (0, 0, 0)
    assert (r.alpha1, r.beta1, r.alpha2, r.beta2, r.pr1, r.pr2) == (0.3, 0.3, 0.2, 0.5, 0.2, 0.3)


def test_restrict_dt_and_identity():
    r = restrict(SchemeKind.DIRECT_TRANSMISSION, ALLOC)
    assert r == FdAllocation(gamma1=0.4, gamma2=0.3)
    assert restrict(SchemeKind.COMPOSITE, ALLOC) == ALLOC


def test_restrict_independent_df():
    r = restrict(SchemeKind.INDEPENDENT_DF, ALLOC)
    assert r == FdAllocation(beta1=0.3, beta2=0.5, beta3=0.5)


def test_sub_kinds_nesting():
    assert set(sub_kinds(SchemeKind.COMPOSITE)) == set(SchemeKind) - {SchemeKind.COMPOSITE}
    assert set(sub_kinds(SchemeKind.INDEPENDENT_PARTIAL_DF)) == {
        SchemeKind.INDEPENDENT_DF,
        SchemeKind.DIRECT_TRANSMISSION,
    }
    assert sub_kinds(SchemeKind.DIRECT_TRANSMISSION) == []


def test_grid_is_feasible():
    p = PowerBudget(1.0, 2.0, 0.5)
    for kind in SchemeKind:
        A = allocation_grid(p, kind, SearchConfig())
        assert np.all(A >= 0)
        assert np.all(A[:, 0:3].sum(1) <= p.p1 + 1e-12)
        assert np.all(A[:, 3:6].sum(1) <= p.p2 + 1e-12)
        assert np.all(A[:, 6:9].sum(1) <= p.pr + 1e-12)
        assert not np.any((A[:, 6] > 0) & (A[:, 0] == 0))
        assert not np.any(A[:, ~kind.mask] != 0)


def test_dt_region_rectangle():
    g = sq(1, 1, 1, 1, 3, 3)
    for cfg in (SearchConfig(), FAST, SearchConfig(2, 2, refine=False)):
        r = optimize_fd_region(g, PowerBudget(1, 1, 1), SchemeKind.DIRECT_TRANSMISSION, cfg)
        assert sorted(map(tuple, np.round(r.vertices, 12))) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_independent_df_region_is_full_power_pentagon():
    g = sq(1, 1, 1, 1, 3, 3)
    r = optimize_fd_region(g, PowerBudget(1, 1, 1), SchemeKind.INDEPENDENT_DF)
    want = pentagon_vertices(fd_pentagon(g, FdAllocation(beta1=1, beta2=1, beta3=1)))
    assert exceedance(r, want) < 1e-12 and exceedance(want, r) < 1e-12


def test_zero_budget_gives_origin():
    r = optimize_fd_region(ChannelGains(1, 1, 1, 1, 1, 1), PowerBudget(0, 0, 0))
    assert r.vertices.tolist() == [[0.0, 0.0]]


def test_search_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(points_low_dim=1)


def test_deterministic():
    g = ChannelGains(0.5, 2, 0.7, 1.5, 3, 0.4)
    a = optimize_fd_region.__wrapped__(g, PowerBudget(1, 1, 1), SchemeKind.COMPOSITE, FAST)
    b = optimize_fd_region.__wrapped__(g, PowerBudget(1, 1, 1), SchemeKind.COMPOSITE, FAST)
    assert a == b


def test_composite_contains_restricted_kinds():
    rng = np.random.default_rng(11)
    p = PowerBudget(1, 1, 1)
    for _ in range(5):
        g = ChannelGains(*(10 ** rng.uniform(-1, 1, 6)))
        comp = optimize_fd_region(g, p, SchemeKind.COMPOSITE, FAST)
        subs = [optimize_fd_region(g, p, k, FAST) for k in sub_kinds(SchemeKind.COMPOSITE)]
        for r in subs:
            assert contains(comp, r, 1e-9)
        assert contains(comp, convex_union(subs), 1e-9)


@pytest.mark.parametrize("kind", [SchemeKind.DIRECT_TRANSMISSION, SchemeKind.INDEPENDENT_DF])
def test_power_monotone_exact_kinds(kind):
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = ChannelGains(*(10 ** rng.uniform(-1, 1, 6)))
        base = optimize_fd_region(g, PowerBudget(1, 1, 1), kind)
        for p in (PowerBudget(2, 1, 1), PowerBudget(1, 2, 1), PowerBudget(1, 1, 2)):
            assert contains(optimize_fd_region(g, p, kind), base, 1e-9)


def test_power_monotone_composite_up_to_grid():
    # the composite optimum is searched on a grid, so allow grid-scale slack
    rng = np.random.default_rng(5)
    for _ in range(3):
        g = ChannelGains(*(10 ** rng.uniform(-1, 1, 6)))
        base = optimize_fd_region(g, PowerBudget(1, 1, 1))
        for p in (PowerBudget(2, 1, 1), PowerBudget(1, 1, 2)):
            assert contains(optimize_fd_region(g, p), base, 1e-3)


def test_pentagon_lipschitz_in_allocation():
    rng = np.random.default_rng(7)
    g = ChannelGains(0.8, 1.3, 0.6, 1.1, 2.0, 1.7)
    eps = 1e-7
    for _ in range(200):
        x = rng.uniform(0.05, 1.0, 9)
        base = np.array(fd_rates(g, x[None, :])).ravel()
        for k in range(9):
            y = x.copy()
            y[k] += eps
            moved = np.array(fd_rates(g, y[None, :])).ravel()
            assert np.max(np.abs(moved - base)) < 50 * eps


def test_i5_uses_total_power_without_coherent_relay():
    g = ChannelGains(0.8, 1.3, 0.6, 1.1, 2.0, 1.7)
    # with pr1 = 0 and no private or independent user-1 power to reach the
    # relay, R1 is capped only through I5, which sees alpha1 + beta1 + gamma1
    a = np.array([[0.6, 0.3, 0.1, 0, 0, 0, 0, 0, 0.4]])
    b = np.array([[0.1, 0.5, 0.4, 0, 0, 0, 0, 0, 0.4]])

    def i5(A):
        a1, b1, c1 = A[0, :3]
        return math.log2(1 + g.g21**2 * (a1 + b1 + c1) + g.g2r**2 * A[0, 8])

    assert i5(a) == pytest.approx(i5(b))
    big = g.g21**2 * 1.0 + g.g2r**2 * 0.4
    for A in (a, b):
        r1, _, _ = fd_rates(ChannelGains(0.8, 1.3, 0.6, 1.1, 100, 1.7), A)
        assert r1[0] <= math.log2(1 + big) + 1e-12
