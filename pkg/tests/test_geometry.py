import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activerbi.geometry import (
    BoundarySpec,
    barycentric_xy,
    boundary_points,
    collinearity_residual,
    entropy_gap,
    feasible,
    find_tilde_tau,
    midpoint,
    tau_double_prime,
    vertex,
)
from activerbi.inference import EvidenceModel, History, one_hot_likelihood, posterior_update
from activerbi.probability import renyi_entropy
from conftest import random_simplex

E = EvidenceModel()

TAU_N_GRID = [(tau, n) for tau in (0.5, 0.7, 0.9) for n in (3, 10, 30)]


class TestThresholdIntersection:
    def test_known_value(self):
        # hand evaluation of -t log t - (1-t) log((1-t)/(n-1)) at t=0.9, n=3
        spec = BoundarySpec(tau=0.9, n=3)
        expected = -0.9 * math.log(0.9) - 0.1 * math.log(0.05)
        assert tau_double_prime(spec) == pytest.approx(expected, abs=1e-14)
        assert tau_double_prime(spec) == pytest.approx(0.3943977, abs=1e-7)

    @pytest.mark.parametrize("tau,n", TAU_N_GRID)
    def test_equals_midpoint_shannon_entropy(self, tau, n):
        # independent path through the generic entropy routine
        spec = BoundarySpec(tau=tau, n=n)
        assert tau_double_prime(spec) == pytest.approx(
            renyi_entropy(midpoint(spec), 1.0), abs=1e-12
        )

    @pytest.mark.parametrize("tau,n", TAU_N_GRID)
    def test_midpoint_maximizes_entropy_on_the_line(self, tau, n, rng):
        # any other point with p[0]=tau has strictly lower Shannon entropy
        spec = BoundarySpec(tau=tau, n=n)
        best = renyi_entropy(midpoint(spec), 1.0)
        for _ in range(200):
            rest = random_simplex(rng, n - 1) * (1 - tau) if n > 2 else np.array([1 - tau])
            p = np.concatenate([[tau], rest])
            assert renyi_entropy(p, 1.0) <= best + 1e-12

    def test_degenerate_tau_one(self):
        assert tau_double_prime(BoundarySpec(tau=1.0, n=5)) == 0.0

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            BoundarySpec(tau=0.2, n=3)  # below 1/n
        with pytest.raises(ValueError):
            BoundarySpec(tau=0.5, n=1)


class TestCollinearity:
    def test_single_query_updates_are_collinear(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 12))
            h = History(prior=random_simplex(rng, n))
            phi = int(rng.integers(n))
            eps = float(rng.normal(1.5, 2.0))
            posterior_update(h, (phi,), [eps], one_hot_likelihood(n), E)
            assert collinearity_residual(h.prior, h.current(), phi) <= 1e-9

    def test_detects_off_line_motion(self):
        p = np.array([0.2, 0.3, 0.5])
        q = np.array([0.3, 0.5, 0.2])  # not on the line through vertex 0
        assert collinearity_residual(p, q, 0) > 1e-3

    def test_zero_step(self):
        p = np.array([0.2, 0.3, 0.5])
        assert collinearity_residual(p, p, 1) == 0.0


class TestEntropyGap:
    @pytest.mark.parametrize("tau,n", TAU_N_GRID)
    def test_shannon_gap_closed_form(self, tau, n):
        spec = BoundarySpec(tau=tau, n=n, alpha=1.0)
        assert entropy_gap(spec) == pytest.approx((1 - tau) * math.log(n - 1), abs=1e-9)

    @pytest.mark.parametrize("tau,n", TAU_N_GRID)
    def test_gap_vanishes_in_min_entropy_limit(self, tau, n):
        # both boundary points share max coordinate tau, so H_inf agrees
        if tau < 0.5:
            pytest.skip("w point needs tau >= 1/2")
        assert entropy_gap(BoundarySpec(tau=tau, n=n, alpha=math.inf)) == pytest.approx(0.0, abs=1e-12)
        assert entropy_gap(BoundarySpec(tau=tau, n=n, alpha=1e6)) <= 1e-4

    def test_gap_nonnegative_across_orders(self):
        for alpha in (0.5, 1.0, 2.0, 10.0):
            for tau, n in TAU_N_GRID:
                assert entropy_gap(BoundarySpec(tau=tau, n=n, alpha=alpha)) >= -1e-12

    def test_boundary_points_live_on_the_confidence_line(self):
        spec = BoundarySpec(tau=0.7, n=5)
        v, w = boundary_points(spec)
        assert v[0] == w[0] == 0.7
        assert v.sum() == pytest.approx(1.0) and w.sum() == pytest.approx(1.0)


class TestTildeTau:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_round_trip(self, alpha):
        for tau, n in TAU_N_GRID:
            spec = BoundarySpec(tau=tau, n=n, alpha=alpha)
            root = find_tilde_tau(spec)
            if root is None:
                continue
            w = np.zeros(n)
            w[0], w[1] = root, 1 - root
            assert renyi_entropy(w, alpha) == pytest.approx(
                renyi_entropy(midpoint(spec), alpha), abs=1e-9
            )

    def test_min_entropy_limit_is_identity(self):
        for tau in (0.5, 0.7, 0.9):
            root = find_tilde_tau(BoundarySpec(tau=tau, n=10, alpha=math.inf))
            assert root == pytest.approx(tau, abs=1e-9)

    def test_none_when_contour_misses_the_edge(self):
        # near-uniform midpoint entropy exceeds log 2, unreachable on the w edge
        assert find_tilde_tau(BoundarySpec(tau=0.15, n=10, alpha=1.0)) is None

    def test_tilde_tau_below_tau_for_shannon(self):
        # the entropy contour reaches the edge at lower confidence
        root = find_tilde_tau(BoundarySpec(tau=0.9, n=10, alpha=1.0))
        assert root is not None and root < 0.9


class TestFeasibleSets:
    def test_posterior_threshold(self):
        assert feasible([0.91, 0.05, 0.04], "posterior-threshold", tau=0.9)
        assert not feasible([0.89, 0.06, 0.05], "posterior-threshold", tau=0.9)

    def test_entropy_threshold(self):
        p = [0.95, 0.03, 0.02]
        h = renyi_entropy(np.array(p), 1.0)
        assert feasible(p, "entropy-threshold", alpha=1.0, tau_prime=h + 1e-6)
        assert not feasible(p, "entropy-threshold", alpha=1.0, tau_prime=h - 1e-6)

    def test_rules_coincide_at_the_intersection_level(self):
        # at tau' = tau'' the entropy set touches the confidence line's midpoint
        spec = BoundarySpec(tau=0.8, n=4)
        m = midpoint(spec)
        level = tau_double_prime(spec)
        assert feasible(m, "entropy-threshold", alpha=1.0, tau_prime=level + 1e-12)
        assert feasible(m, "posterior-threshold", tau=0.8)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            feasible([0.5, 0.5], "posterior-threshold")
        with pytest.raises(ValueError):
            feasible([0.5, 0.5], "no-such-rule", tau=0.5)


class TestBarycentric:
    def test_vertices_map_to_triangle_corners(self):
        assert barycentric_xy(vertex(0, 3)) == (0.0, 0.0)
        assert barycentric_xy(vertex(1, 3)) == (1.0, 0.0)
        x, y = barycentric_xy(vertex(2, 3))
        assert (x, y) == pytest.approx((0.5, math.sqrt(3) / 2))

    def test_centroid(self):
        x, y = barycentric_xy(np.full(3, 1 / 3))
        assert (x, y) == pytest.approx((0.5, math.sqrt(3) / 6))

    def test_needs_three_states(self):
        with pytest.raises(ValueError):
            barycentric_xy([0.5, 0.5])


@settings(max_examples=100, deadline=None)
@given(tau=st.floats(0.34, 0.999), alpha=st.floats(0.1, 30.0))
def test_gap_property_nonnegative(tau, alpha):
    assert entropy_gap(BoundarySpec(tau=tau, n=3, alpha=alpha)) >= -1e-10
