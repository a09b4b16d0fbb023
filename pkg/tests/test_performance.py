"""Outage composition, floor, and the adaptive rate controller."""

import math
from dataclasses import replace

import numpy as np
import pytest

from aerolink.a2g import DelayedPsc, characterize_a2g
from aerolink.g2a import G2ALink, g2a_cdf, g2a_cdf_asymptotic
from aerolink.performance import (
    AdaptivePolicy,
    OutageQuery,
    adaptive_gamma_th,
    eop,
    eop_floor,
    eop_sweep_to_csv,
    eop_trajectory,
    eop_trajectory_to_csv,
)
from aerolink.scenario import ArrayShape, build_a2g_link, build_g2a_link, default_scenario

from test_a2g import link256_decorrelated


def _pair():
    g = G2ALink(9, 10.0, 0.0177642559, 58.7363087)
    a = link256_decorrelated()
    return g, a


class TestQueryAndPolicy:
    def test_threshold_budget_split(self):
        # two slots halve the usable exponent
        assert OutageQuery(1.0).threshold == pytest.approx(3.0)
        assert OutageQuery(0.5).threshold == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            OutageQuery(0.0)
        with pytest.raises(ValueError):
            AdaptivePolicy(0.0)
        with pytest.raises(ValueError):
            AdaptivePolicy(1.0)


class TestEop:
    def test_series_composition(self):
        g, a = _pair()
        chr_ = characterize_a2g(a, DelayedPsc())
        q = OutageQuery(1.0)
        from aerolink.a2g import a2g_cdf

        f1 = float(g2a_cdf(g, q.threshold))
        f2 = float(a2g_cdf(chr_, q.threshold))
        assert eop(g, chr_, q) == pytest.approx(1 - (1 - f1) * (1 - f2), rel=1e-12)

    def test_floor_is_beamformed_hop_asymptote(self):
        g, _ = _pair()
        q = OutageQuery(1.0)
        assert eop_floor(g, q) == pytest.approx(
            min(1.0, float(g2a_cdf_asymptotic(g, q.threshold))), rel=1e-12
        )


class TestAdaptive:
    def test_budget_respected_after_refinement(self):
        g, a = _pair()
        pol = AdaptivePolicy(1e-3)
        res = adaptive_gamma_th(g, a, DelayedPsc(), pol)
        chr_ = characterize_a2g(a, DelayedPsc())
        assert eop(g, chr_, OutageQuery(res.target_se)) <= 1.05e-3

    def test_rate_threshold_consistency(self):
        g, a = _pair()
        res = adaptive_gamma_th(g, a, DelayedPsc(), AdaptivePolicy(1e-4))
        assert res.gamma_th == pytest.approx(2 ** (2 * res.target_se) - 1, rel=1e-9)
        assert res.target_se > 0

    def test_randomized_scenarios(self):
        rng = np.random.default_rng(31)
        pol = AdaptivePolicy(1e-3)
        for _ in range(4):
            m = int(rng.integers(2, 10))
            g = G2ALink(m, 10.0, float(rng.uniform(0.0, 0.6)), float(rng.uniform(5, 200)))
            a = link256_decorrelated()
            res = adaptive_gamma_th(g, a, DelayedPsc(), pol)
            chr_ = characterize_a2g(a, DelayedPsc())
            assert eop(g, chr_, OutageQuery(res.target_se)) <= 1.05e-3


def _traj_scenario():
    return replace(
        default_scenario(),
        bs_array=ArrayShape(8, 1),
        aging_samples=100,
        p_s_dbm=30.0,
        p_u_dbm=30.0,
    )


class TestTrajectory:
    def test_fixed_rate_series(self):
        sc = _traj_scenario()
        pts = eop_trajectory(sc, steps=6, query=OutageQuery(1.0))
        assert len(pts) == 6
        assert [p.index for p in pts] == list(range(1, 7))
        assert all(p.t_k == 100 for p in pts)
        assert all(0.0 <= p.eop <= 1.0 for p in pts)
        # running average is the prefix mean of the eop column
        run = np.cumsum([p.eop for p in pts]) / np.arange(1, 7)
        assert np.allclose([p.avg_eop for p in pts], run, rtol=1e-12)
        assert all(p.se == pytest.approx(1.0) for p in pts)

    def test_adaptive_series_meets_budget(self):
        sc = _traj_scenario()
        pts = eop_trajectory(sc, steps=6, policy=AdaptivePolicy(1e-4))
        assert all(p.eop <= 1.05e-4 for p in pts)
        assert all(p.avg_eop <= 1.05e-4 for p in pts)
        assert all(p.se > 0 for p in pts)

    def test_deterministic_replay(self):
        sc = _traj_scenario()
        a = eop_trajectory(sc, steps=4, query=OutageQuery(1.0))
        b = eop_trajectory(sc, steps=4, query=OutageQuery(1.0))
        assert [p.eop for p in a] == [p.eop for p in b]

    def test_requires_policy_or_query(self):
        with pytest.raises(ValueError):
            eop_trajectory(_traj_scenario(), steps=2)


class TestCsvEmitters:
    def test_sweep_blanks_missing_mc(self, tmp_path):
        path = tmp_path / "sweep.csv"
        eop_sweep_to_csv(path, [(0.0, 0.5, 0.48, 0.1), (5.0, 0.2, None, 0.1)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "p_dbm,eop_analytic,eop_mc,eop_floor"
        assert lines[2] == "5.0,0.2,,0.1"

    def test_trajectory_columns(self, tmp_path):
        sc = _traj_scenario()
        pts = eop_trajectory(sc, steps=3, query=OutageQuery(1.0))
        path = tmp_path / "traj.csv"
        eop_trajectory_to_csv(path, pts)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "k,t_k,eop,avg_eop,se,refined"
        assert len(lines) == 4
        assert lines[1].startswith("1,100,")
