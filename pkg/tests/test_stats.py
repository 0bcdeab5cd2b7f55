import numpy as np
import pytest

from channelspectra.densities import DensitySpec, semicircle_cdf
from channelspectra.stats import (
    ESD,
    MomentReport,
    aggregate_trials,
    compare_report,
    empirical_moments,
    esd_from_spectrum,
    histogram_rows,
    ks_distance,
    pool_esds,
)


def semicircle_quantile(u, tol=1e-12):
    lo, hi = -2.0, 2.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if semicircle_cdf(mid) < u:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


class TestESD:
    def test_identity_spectrum(self):
        esd = esd_from_spectrum(np.ones(4))
        assert esd.count == 4
        assert np.allclose(esd.eigenvalues, 1.0)

    def test_pooled_count(self):
        esds = [esd_from_spectrum(np.arange(3, dtype=float)) for _ in range(5)]
        assert pool_esds(esds).count == 15

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            ESD(eigenvalues=np.array([1.0, 0.0]), source_dim=2)

    def test_rademacher_tensor_support(self):
        # W (x) conj(W) for an involution W has eigenvalues exactly +-1;
        # twirl centering shifts them by at most its bounded norm.
        from channelspectra.channel import (
            AnalyticTwirlExpectation,
            ZeroExpectation,
            build_delta,
            twirl_parameters,
        )
        from channelspectra.ensembles import EnsembleSpec, sample_family
        from channelspectra.linalg import hermitian_eigenvalues
        from channelspectra.seeding import Seed

        spec = EnsembleSpec("rotated-rademacher", 12)
        fam = sample_family(spec, 1, Seed(50))
        uncentered = build_delta(fam, ZeroExpectation())
        vals = hermitian_eigenvalues(uncentered.dense)
        assert np.max(np.abs(np.abs(vals) - 1.0)) <= 1e-9

        s, q = twirl_parameters(spec)
        centered = build_delta(fam, AnalyticTwirlExpectation(s, q), spec=spec)
        esd = esd_from_spectrum(hermitian_eigenvalues(centered.dense))
        assert esd.eigenvalues.min() >= -1.0 - 1.1
        assert esd.eigenvalues.max() <= 1.0 + 1.1


class TestEmpiricalMoments:
    def test_all_zero(self):
        esd = esd_from_spectrum(np.zeros(6))
        assert empirical_moments(esd, 4) == [0.0] * 4

    def test_symmetric_signs(self):
        esd = esd_from_spectrum(np.array([-1.0, 1.0]))
        assert empirical_moments(esd, 4) == [0.0, 1.0, 0.0, 1.0]

    def test_pooled_equals_mean_of_trials(self):
        rng = np.random.default_rng(42)
        esds = [esd_from_spectrum(rng.normal(size=16)) for _ in range(7)]
        pooled = pool_esds(esds)
        per_trial = np.array([empirical_moments(e, 5) for e in esds])
        want = per_trial.mean(axis=0)
        got = np.array(empirical_moments(pooled, 5))
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


class TestKSDistance:
    def test_quantile_sample_is_close(self):
        m = 512
        sample = np.array([semicircle_quantile((i + 0.5) / m) for i in range(m)])
        report = ks_distance(esd_from_spectrum(sample), DensitySpec("semicircle"))
        assert report.statistic <= 1.0 / m
        assert report.sample_size == m

    def test_point_mass_is_far(self):
        esd = esd_from_spectrum(np.zeros(64))
        report = ks_distance(esd, DensitySpec("semicircle"))
        assert report.statistic >= 0.5

    def test_duplicating_the_sample_is_invariant(self):
        rng = np.random.default_rng(43)
        esd = esd_from_spectrum(rng.uniform(-2, 2, size=50))
        doubled = pool_esds([esd, esd])
        a = ks_distance(esd, DensitySpec("semicircle")).statistic
        b = ks_distance(doubled, DensitySpec("semicircle")).statistic
        assert a == pytest.approx(b, abs=1e-12)


class TestAggregateTrials:
    def test_identical_trials_zero_variance(self):
        esd = esd_from_spectrum(np.array([-1.0, 0.0, 1.0]))
        pooled, variances = aggregate_trials([esd, esd, esd], 4)
        assert pooled.count == 9
        assert all(v == 0.0 for v in variances)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            aggregate_trials([esd_from_spectrum(np.zeros(2))], 2)

    def test_variance_positive_for_distinct(self):
        rng = np.random.default_rng(44)
        esds = [esd_from_spectrum(rng.normal(size=8)) for _ in range(5)]
        _, variances = aggregate_trials(esds, 2)
        assert variances[1] > 0.0


class TestCompareReport:
    def _report(self, empirical, predicted, stderr):
        k = len(empirical)
        return MomentReport(
            orders=tuple(range(1, k + 1)),
            empirical=tuple(empirical),
            empirical_stderr=tuple(stderr),
            predicted=tuple(predicted),
            regime="fixed-d(2)",
        )

    def test_exact_match_passes(self):
        rows = compare_report(self._report([0.0, 1.0], [0.0, 1.0], [0.0, 0.0]), [0.1, 0.1])
        assert all(r.passed for r in rows)

    def test_wrong_prediction_fails(self):
        rows = compare_report(self._report([0.0, 1.0], [1.0, 2.0], [0.0, 0.0]), [0.1, 0.1])
        assert not any(r.passed for r in rows)

    def test_stderr_slack(self):
        rows = compare_report(self._report([1.3], [1.0], [0.1]), [0.05])
        assert rows[0].passed  # 0.3 <= 0.05 + 3 * 0.1
        rows = compare_report(self._report([1.4], [1.0], [0.1]), [0.05])
        assert not rows[0].passed

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            compare_report(self._report([0.0], [0.0], [0.0]), [0.1, 0.2])

    def test_report_validation(self):
        with pytest.raises(ValueError):
            MomentReport(
                orders=(1, 2),
                empirical=(0.0,),
                empirical_stderr=(0.0,),
                predicted=(0.0,),
                regime="x",
            )
        with pytest.raises(ValueError):
            MomentReport(
                orders=(1,),
                empirical=(0.0,),
                empirical_stderr=(-1.0,),
                predicted=(0.0,),
                regime="x",
            )


class TestHistogram:
    def test_counts_and_density(self):
        rng = np.random.default_rng(45)
        esd = esd_from_spectrum(rng.normal(size=1000))
        rows = histogram_rows(esd, 20)
        assert sum(r[2] for r in rows) == 1000
        total = sum(r[3] * (r[1] - r[0]) for r in rows)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_bins_guard(self):
        with pytest.raises(ValueError):
            histogram_rows(esd_from_spectrum(np.zeros(3)), 0)
