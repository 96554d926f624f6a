import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussbounds.bounds import epi_f_lambda_inverse, f_lambda
from gaussbounds.fock import g
from gaussbounds.regions import (
    CurveKind,
    RatePair,
    RateTriple,
    RegionCurve,
    RegionParameterError,
    boundary_value,
    broadcast_achievable,
    broadcast_boundary,
    broadcast_outer,
    broadcast_time_sharing,
    containment_gap,
    in_broadcast_region,
    in_tradeoff_region,
    project_cq_plane,
    projected_rate,
    tradeoff_achievable_cpk,
    tradeoff_achievable_cqg,
    tradeoff_bounds,
    tradeoff_outer_cpk,
    tradeoff_outer_cqg,
    tradeoff_time_sharing,
)
from oracles import f_lambda_mp, g_inverse_mp, g_mp

ETA, E = 0.9, 4.0
# mpmath evaluations, frozen
G_3_6 = 2.4084971524137955
G_0_4 = 0.8375774240193602
G_4 = 2.5020121176909393

OUTER = (CurveKind.OUTER_EPI, CurveKind.OUTER_NEW)
KINDS = (CurveKind.ACHIEVABLE,) + OUTER


def lost_entropy_mp(kind, lam, y):
    """Bound on the entropy leaked to the weaker receiver, from scratch in mpmath."""
    y = mp.mpf(y)
    if y <= 0:
        return mp.mpf(0)
    if kind is CurveKind.ACHIEVABLE:
        return g_mp(lam * g_inverse_mp(y))
    if kind is CurveKind.OUTER_EPI:
        return mp.log(lam * mp.exp(y) + 1 - lam)
    return f_lambda_mp(y, lam)


def projected_rate_oracle(kind, eta, E, C):
    """Second rate on the G = 0 slice without any beta sweep.

    At the optimum the C + Q + G and Q + G constraints are both tight, so
    with y = g(eta E) - C the rate is y minus the leaked entropy at y.
    """
    y = max(g_mp(eta * E) - mp.mpf(C), mp.mpf(0))
    return float(y - lost_entropy_mp(kind, (1 - mp.mpf(eta)) / eta, y))


def test_frozen_values():
    assert float(g_mp(3.6)) == pytest.approx(G_3_6, abs=1e-15)
    assert float(g_mp(0.4)) == pytest.approx(G_0_4, abs=1e-15)


class TestTypes:
    def test_rate_pair(self):
        with pytest.raises(ValueError):
            RatePair(-0.1, 0.0)

    def test_rate_triple_allows_negative_third(self):
        assert RateTriple(0.1, 0.2, -0.5).g_or_k == -0.5
        with pytest.raises(ValueError):
            RateTriple(0.1, -0.2, 0.0)

    def test_curve_needs_increasing_x(self):
        with pytest.raises(ValueError):
            RegionCurve(np.array([[0.0, 1.0], [0.0, 0.5]]), CurveKind.ACHIEVABLE, {}, "x")

    def test_points_read_only(self):
        c = broadcast_achievable(ETA, E, 8)
        with pytest.raises(ValueError):
            c.points[0, 0] = 1.0


class TestBroadcast:
    def test_achievable_endpoints(self):
        c = broadcast_achievable(ETA, E)
        assert c.points[0, 0] == 0.0
        assert c.points[0, 1] == pytest.approx(G_0_4, abs=1e-10)
        assert c.points[-1, 0] == pytest.approx(G_3_6, abs=1e-10)
        assert c.points[-1, 1] == 0.0
        assert len(c.points) == 512

    def test_achievable_parametric_oracle(self):
        # superposition coding at power split beta: (g(eta beta E), g((1-eta)E) - g((1-eta) beta E))
        for beta in np.linspace(0.0, 1.0, 21):
            x = float(g_mp(ETA * beta * E))
            y = float(g_mp((1 - ETA) * E) - g_mp((1 - ETA) * beta * E))
            assert broadcast_boundary(CurveKind.ACHIEVABLE, ETA, E, x) == pytest.approx(y, abs=1e-10)

    def test_achievable_betas(self):
        c = broadcast_achievable(ETA, E, 32)
        assert c.betas[0] == 0.0 and c.betas[-1] == pytest.approx(1.0, abs=1e-9)
        assert np.all(np.diff(c.betas) > 0)

    @pytest.mark.parametrize("kind", OUTER)
    def test_outer_start(self, kind):
        c = broadcast_outer(ETA, E, kind)
        assert c.points[0, 1] == pytest.approx(G_0_4, abs=1e-10)
        assert c.points[-1, 1] == 0.0

    def test_outer_extents(self):
        epi = broadcast_outer(ETA, E, CurveKind.OUTER_EPI, 16)
        assert epi.x[-1] == pytest.approx(float(epi_f_lambda_inverse(G_0_4, 1 / 9)), abs=1e-10)
        new = broadcast_outer(ETA, E, CurveKind.OUTER_NEW, 16)
        assert f_lambda(new.x[-1], 1 / 9) == pytest.approx(G_0_4, abs=1e-10)
        assert G_3_6 <= new.x[-1] <= epi.x[-1]

    @pytest.mark.parametrize("kind", OUTER)
    def test_outer_against_mpmath(self, kind):
        for x in (0.0, 0.5, 1.5, 2.4):
            expected = float(g_mp(0.4) - lost_entropy_mp(kind, mp.mpf(1) / 9, x))
            assert broadcast_boundary(kind, ETA, E, x) == pytest.approx(max(expected, 0.0), abs=1e-10)

    def test_pointwise_ordering(self):
        x = np.linspace(0.01, G_3_6, 200)
        ach = broadcast_boundary(CurveKind.ACHIEVABLE, ETA, E, x)
        new = broadcast_boundary(CurveKind.OUTER_NEW, ETA, E, x)
        epi = broadcast_boundary(CurveKind.OUTER_EPI, ETA, E, x)
        assert np.all(new <= epi + 1e-12)
        assert np.all(ach <= new + 1e-12)

    def test_time_sharing(self):
        c = broadcast_time_sharing(ETA, E, 513)
        assert c.points[256] == pytest.approx([G_3_6 / 2, G_0_4 / 2], abs=1e-12)
        ach = broadcast_achievable(ETA, E)
        assert c.points[0] == pytest.approx(ach.points[0], abs=1e-12)
        assert c.points[-1] == pytest.approx(ach.points[-1], abs=1e-12)
        assert containment_gap(c, ach) >= -1e-12

    def test_containment_chain(self):
        ts = broadcast_time_sharing(ETA, E)
        ach = broadcast_achievable(ETA, E)
        new = broadcast_outer(ETA, E, CurveKind.OUTER_NEW)
        epi = broadcast_outer(ETA, E, CurveKind.OUTER_EPI)
        for inner, outer in ((ts, ach), (ach, new), (new, epi)):
            assert containment_gap(inner, outer) >= -1e-12

    @pytest.mark.parametrize("kind", KINDS)
    def test_monotone_and_clipped(self, kind):
        c = broadcast_achievable(ETA, E) if kind is CurveKind.ACHIEVABLE else broadcast_outer(ETA, E, kind)
        assert c.is_monotone()
        assert np.all(c.y >= 0)
        assert c.metadata["min_formal_value"] >= -1e-9

    def test_achievable_concave(self):
        c = broadcast_achievable(ETA, E)
        assert np.all(np.diff(c.y, 2) <= 1e-12)

    def test_half_transmissivity(self):
        # lam = 1: every map is the identity, so all regions are the same triangle
        for kind in KINDS:
            assert broadcast_boundary(kind, 0.5, 2.0, 0.3) == pytest.approx(g(1.0) - 0.3, abs=1e-12)

    def test_full_transmissivity(self):
        c = broadcast_outer(1.0, 2.0, CurveKind.OUTER_NEW, 8)
        assert np.all(c.y == 0.0)
        assert c.x[-1] == pytest.approx(g(2.0))

    @given(st.floats(0.5, 1.0), st.floats(0.05, 10.0))
    def test_endpoints_property(self, eta, energy):
        c = broadcast_achievable(eta, energy, 16)
        assert c.points[0, 1] == pytest.approx(g((1 - eta) * energy), abs=1e-10)
        assert c.points[-1, 0] == pytest.approx(g(eta * energy), abs=1e-10)
        assert c.is_monotone(1e-12)

    @pytest.mark.parametrize("eta, energy", [(0.4, 1.0), (1.1, 1.0), (0.9, 0.0), (0.9, -1.0)])
    def test_bad_parameters(self, eta, energy):
        with pytest.raises(RegionParameterError):
            broadcast_achievable(eta, energy)

    def test_bad_tag(self):
        with pytest.raises(ValueError):
            broadcast_outer(ETA, E, CurveKind.ACHIEVABLE)

    def test_membership(self):
        assert in_broadcast_region(RatePair(1.0, 0.3), CurveKind.ACHIEVABLE, ETA, E)
        assert not in_broadcast_region(RatePair(2.4, 0.3), CurveKind.ACHIEVABLE, ETA, E)
        assert not in_broadcast_region(RatePair(2.5, 0.0), CurveKind.ACHIEVABLE, ETA, E)
        assert in_broadcast_region(RatePair(2.5, 0.0), CurveKind.OUTER_EPI, ETA, E)


class TestTradeoffBounds:
    @pytest.mark.parametrize("fn", [tradeoff_achievable_cqg, tradeoff_achievable_cpk])
    def test_achievable_at_zero(self, fn):
        assert tuple(fn(ETA, E, 0.0)) == pytest.approx((G_3_6, 0.0, G_3_6), abs=1e-14)

    @pytest.mark.parametrize("fn", [tradeoff_outer_cqg, tradeoff_outer_cpk])
    @pytest.mark.parametrize("kind", OUTER)
    def test_outer_at_zero(self, fn, kind):
        assert tuple(fn(ETA, E, 0.0, kind)) == pytest.approx((G_3_6, 0.0, G_3_6), abs=1e-14)

    def test_cqg_at_one(self):
        b = tradeoff_achievable_cqg(ETA, E, 1.0)
        assert tuple(b) == pytest.approx((G_4 + G_3_6 - G_0_4, G_3_6 - G_0_4, G_3_6 - G_0_4), abs=1e-12)

    def test_cpk(self):
        firsts = {tradeoff_achievable_cpk(ETA, E, b).first for b in np.linspace(0, 1, 11)}
        assert firsts == {g(ETA * E)}
        cqg, cpk = tradeoff_achievable_cqg(ETA, E, 1.0), tradeoff_achievable_cpk(ETA, E, 1.0)
        assert (cpk.second, cpk.third) == (cqg.second, cqg.third)

    def test_second_below_third(self):
        for beta in np.linspace(0, 1, 101):
            b = tradeoff_achievable_cqg(ETA, E, beta)
            assert b.second <= b.third + 1e-15

    def test_outer_contains_achievable(self):
        for beta in np.linspace(0, 1, 101):
            for family in ("cqg", "cpk"):
                ach = tradeoff_bounds(family, CurveKind.ACHIEVABLE, ETA, E, beta)
                new = tradeoff_bounds(family, CurveKind.OUTER_NEW, ETA, E, beta)
                epi = tradeoff_bounds(family, CurveKind.OUTER_EPI, ETA, E, beta)
                assert all(a <= n + 1e-10 for a, n in zip(ach, new))
                assert all(n <= e + 1e-10 for n, e in zip(new, epi))

    def test_outer_cpk_matches_cqg(self):
        for beta in (0.2, 0.7):
            cqg, cpk = tradeoff_outer_cqg(ETA, E, beta), tradeoff_outer_cpk(ETA, E, beta)
            assert cpk.first == tradeoff_achievable_cpk(ETA, E, beta).first
            assert (cpk.second, cpk.third) == (cqg.second, cqg.third)

    def test_outer_cqg_against_mpmath(self):
        beta = 0.6
        y = g_mp(beta * ETA * E)
        lost = f_lambda_mp(y, mp.mpf(1) / 9)
        back = mp.findroot(lambda x: f_lambda_mp(x, 0.9) - y, y)
        expected = (g_mp(ETA * E) + back - lost, y - lost, g_mp(ETA * E) - lost)
        got = tradeoff_outer_cqg(ETA, E, beta, CurveKind.OUTER_NEW)
        assert tuple(got) == pytest.approx([float(v) for v in expected], abs=1e-9)

    def test_bad_beta(self):
        with pytest.raises(RegionParameterError):
            tradeoff_achievable_cqg(ETA, E, 1.2)

    def test_bad_family(self):
        with pytest.raises(ValueError):
            tradeoff_bounds("cpq", CurveKind.ACHIEVABLE, ETA, E, 0.5)


class TestProjection:
    @pytest.mark.parametrize("kind", KINDS)
    def test_against_closed_form(self, kind):
        cs = np.linspace(0.0, G_3_6, 9)
        got = projected_rate("cqg", kind, ETA, E, cs)
        expected = [projected_rate_oracle(kind, ETA, E, c) for c in cs]
        assert np.allclose(got, expected, atol=1e-10)

    @pytest.mark.parametrize("kind", KINDS)
    def test_families_coincide(self, kind):
        a = project_cq_plane("cqg", kind, ETA, E, 64)
        b = project_cq_plane("cpk", kind, ETA, E, 64)
        assert np.max(np.abs(a.y - b.y)) <= 1e-10

    @pytest.mark.parametrize("kind", KINDS)
    def test_endpoint_and_monotone(self, kind):
        c = project_cq_plane("cqg", kind, ETA, E, 64)
        assert c.x[-1] == pytest.approx(G_3_6, abs=1e-12)
        assert c.y[-1] == 0.0
        assert c.is_monotone()

    def test_pure_quantum_corner(self):
        c = project_cq_plane("cqg", CurveKind.ACHIEVABLE, ETA, E, 16)
        assert c.y[0] == pytest.approx(G_3_6 - G_0_4, abs=1e-10)
        assert c.betas[0] == pytest.approx(1.0)

    def test_achievable_concave(self):
        c = project_cq_plane("cpk", CurveKind.ACHIEVABLE, ETA, E, 128)
        assert np.all(np.diff(c.y, 2) <= 1e-10)

    def test_containment_chain(self):
        for family in ("cqg", "cpk"):
            ts = tradeoff_time_sharing(family, ETA, E, 64)
            order = (CurveKind.ACHIEVABLE, CurveKind.OUTER_NEW, CurveKind.OUTER_EPI)
            curves = [project_cq_plane(family, k, ETA, E, 64) for k in order]
            chain = [ts] + curves
            for inner, outer in zip(chain, chain[1:]):
                assert containment_gap(inner, outer) >= -1e-10

    def test_full_transmissivity(self):
        # eta = 1: C + 2Q <= g(E) + g(beta E), Q <= g(beta E), C + Q <= g(E)
        c = project_cq_plane("cqg", CurveKind.ACHIEVABLE, 1.0, 2.0, 64)
        assert c.is_monotone()
        assert c.y[0] == pytest.approx(g(2.0), abs=1e-10)
        assert np.allclose(c.y, g(2.0) - c.x, atol=1e-10)

    def test_boundary_value_time_sharing(self):
        ts = tradeoff_time_sharing("cqg", ETA, E, 5)
        assert boundary_value(ts, ts.x) == pytest.approx(ts.y, abs=1e-12)

    def test_mixed_scenarios_rejected(self):
        with pytest.raises(ValueError):
            containment_gap(broadcast_achievable(ETA, E, 8), project_cq_plane("cqg", CurveKind.ACHIEVABLE, ETA, E, 8))

    def test_tradeoff_membership(self):
        q = projected_rate("cqg", CurveKind.ACHIEVABLE, ETA, E, 1.0)
        assert in_tradeoff_region(RateTriple(1.0, q * 0.99, 0.0), "cqg", CurveKind.ACHIEVABLE, ETA, E)
        assert not in_tradeoff_region(RateTriple(1.0, q * 1.05, 0.0), "cqg", CurveKind.ACHIEVABLE, ETA, E)
        # entanglement consumed instead of generated
        assert in_tradeoff_region(RateTriple(1.0, q * 1.05, -0.2), "cqg", CurveKind.ACHIEVABLE, ETA, E)

    def test_closed_form_uses_consistent_beta(self):
        c = project_cq_plane("cqg", CurveKind.ACHIEVABLE, ETA, E, 9)
        for x, y, beta in zip(c.x[:-1], c.y[:-1], c.betas[:-1]):
            b = tradeoff_achievable_cqg(ETA, E, beta)
            assert x + y <= b.third + 1e-10 and y <= b.second + 1e-10
            assert math.isclose(g(ETA * beta * E), G_3_6 - x, abs_tol=1e-8)
