import numpy as np
import pytest
from hypothesis import given, settings

from planar_ar.acf import AcfGrid, acf_grid
from planar_ar.errors import IllConditionedError, InconsistentAcfError, LagRangeError
from planar_ar.estimate import AcfSource, recover_from_grid, recover_params
from planar_ar.params import FlipKind, ParamSet, canonical_causal, transform
from planar_ar.sim import empirical_acf, simulate_stationary

from conftest import TABLE, causal_params, draw_params


def four(p):
    g = acf_grid(p, 0, 1, 0, 1)
    return g.at(0, 0), g.at(1, 0), g.at(0, 1), g.at(1, 1)


def close(p, q, tol):
    return max(abs(x - y) for x, y in zip(p.as_tuple()[:3], q.as_tuple()[:3])) < tol and abs(
        p.sigma2 - q.sigma2
    ) < tol * p.sigma2


class TestRecoverParams:
    def test_table_example(self):
        est = recover_params(1, 0, 0.5, 0.15)
        assert est.params.as_tuple() == pytest.approx((-0.1, 0.5, 0.2, 0.72), abs=1e-15)
        assert est.source is AcfSource.EXACT
        assert est.condition_report.causal
        assert est.equivalence.class_size == 2

    def test_white_noise(self):
        est = recover_params(2.5, 0, 0, 0)
        assert est.params.as_tuple() == (0.0, 0.0, 0.0, 2.5)

    @pytest.mark.parametrize("g", [(0, 0, 0, 0), (-1, 0, 0, 0), (float("nan"), 0, 0, 0)])
    def test_nonpositive_variance(self, g):
        with pytest.raises(InconsistentAcfError):
            recover_params(*g)

    @pytest.mark.parametrize("g", [(1, 0, 1, 0.5), (1, -1, 0, 0), (1, 0.5, 1 - 1e-14, 0.5)])
    def test_ill_conditioned(self, g):
        with pytest.raises(IllConditionedError):
            recover_params(*g)

    def test_zero_discriminant(self):
        with pytest.raises(InconsistentAcfError, match="D="):
            recover_params(1, 0.5, 0.5, 1)

    def test_noncausal_recovery_rejected(self):
        # inverts to (9, 9, -17.1), which is stationary but not causal
        with pytest.raises(InconsistentAcfError, match="not causal"):
            recover_params(1, 0.9, 0.9, -0.9)

    def test_causal_recovery_reproduces_input(self, rng):
        hits = 0
        for g in rng.uniform(-1, 1, (500, 3)):
            try:
                q = recover_params(1.0, *g).params
            except InconsistentAcfError:
                continue
            hits += 1
            assert np.allclose(four(q), (1.0, *g), atol=1e-10)
        assert hits > 100

    def test_round_trip(self, rng):
        for p in draw_params(rng, 300, causal=True):
            assert close(recover_params(*four(p)).params, p, 1e-9)

    @settings(max_examples=100, deadline=None)
    @given(causal_params())
    def test_round_trip_property(self, p):
        q = recover_params(*four(p)).params
        assert close(q, p, 1e-8)

    def test_identifiability(self):
        # T2 partner shares the autocovariance, so the output is identical
        q = transform(TABLE, 2)
        e1, e2 = recover_params(*four(TABLE)), recover_params(*four(q))
        assert close(e1.params, e2.params, 1e-12)
        assert any(close(m, q, 1e-12) for _, m in e1.equivalence.members)


class TestRecoverFromGrid:
    def test_table_grid(self):
        est = recover_from_grid(acf_grid(TABLE, -2, 3, -3, 3))
        assert close(est.params, TABLE, 1e-12)
        assert est.flip is FlipKind.NONE

    def test_class_consistency(self, rng):
        for p in draw_params(rng, 200):
            est = recover_from_grid(acf_grid(p, -2, 2, -2, 2))
            q, _, flip = canonical_causal(p)
            assert close(est.params, q, 1e-9)
            # a one-axis flip of an even grid is the same whichever axis is named
            assert np.prod(est.flip.signs) == np.prod(flip.signs)
            assert est.condition_report.causal
            assert any(close(m, p, 1e-9) for _, m in est.equivalence.members)

    def test_missing_lag(self):
        g = acf_grid(TABLE, 0, 0, 0, 3)
        with pytest.raises(LagRangeError):
            recover_from_grid(g)

    def test_orientation_assumed_without_mixed_lag(self):
        est = recover_from_grid(acf_grid(TABLE, 0, 1, 0, 1))
        assert "assumed" in est.diagnostics["orientation"]
        assert close(est.params, TABLE, 1e-12)

    def test_empirical_recovery(self):
        g = simulate_stationary(TABLE, 512, 512, seed=1)
        est = recover_from_grid(empirical_acf(g, 2, 2))
        assert est.source is AcfSource.EMPIRICAL
        assert np.allclose(est.params.as_tuple()[:3], TABLE.as_tuple()[:3], atol=0.05)
        assert est.diagnostics["yw_residual_max"] < 0.05
        assert len(est.diagnostics["yw_residuals"]) == 9

    def test_empirical_white_noise(self):
        g = simulate_stationary(ParamSet(0, 0, 0, 1.7), 512, 512, seed=9)
        est = recover_from_grid(empirical_acf(g, 2, 2))
        assert np.all(np.abs(est.params.as_tuple()[:3]) < 0.02)
        assert est.params.sigma2 == pytest.approx(1.7, rel=0.02)

    def test_candidates_listed_when_they_differ(self):
        est = recover_from_grid(acf_grid(TABLE, -1, 1, -1, 1))
        flips = [f for f, _ in est.candidates]
        assert flips[0] is FlipKind.NONE
        assert len(set(flips)) == len(flips)

    def test_to_dict(self):
        d = recover_from_grid(acf_grid(TABLE, -1, 1, -1, 1)).to_dict()
        assert set(d) == {"estimate", "equivalence_class", "condition_report", "diagnostics"}
        assert d["estimate"]["source"] == "ExactAcf" and d["estimate"]["flip"] == "None"
        assert "candidates" in d["diagnostics"]

    def test_file_grid_is_exact_source(self):
        g = acf_grid(TABLE, -1, 1, -1, 1)
        est = recover_from_grid(AcfGrid(-1, 1, -1, 1, np.array(g.values), source="file"))
        assert est.source is AcfSource.EXACT
