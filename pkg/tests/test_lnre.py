"""Tests for LNRE models, chi-square fitting and model-based growth."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from src.core.types import CurveKind, ModelFamily
from src.core.validators import ArgumentError, FittingError
from src.services.diversity import frequency_spectrum
from src.services.lnre import (
    ChiSquareObjective,
    ExpectedSpectrum,
    FiniteZipfMandelbrot,
    FitRecord,
    GeneralizedInverseGaussPoisson,
    LnreModel,
    ZipfMandelbrot,
    compare_growth_z,
    compare_vocabulary_z,
    extrapolate_growth,
    fit,
    fit_with_fallback,
    growth_checkpoints,
    integrate_density,
    merge_classes,
)

MODELS = [
    ZipfMandelbrot(alpha=0.5, B=0.05),
    FiniteZipfMandelbrot(alpha=0.6, A=1e-7, B=0.02),
    GeneralizedInverseGaussPoisson(gamma=-0.4, B=0.01, C=0.001),
]
MODEL_IDS = ["zm", "fzm", "gigp"]


@pytest.fixture
def zm_model():
    return ZipfMandelbrot(alpha=0.5, B=0.05)


class TestModelIdentities:
    @pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
    def test_probability_mass_is_one(self, model):
        assert model.probability_mass() == pytest.approx(1.0, rel=1e-5)

    @pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
    def test_vocabulary_matches_quadrature(self, model):
        N = 5000.0
        numeric = integrate_density(model, lambda pi: -math.expm1(-N * pi))
        assert model.expected_vocabulary(N) == pytest.approx(numeric, rel=1e-5)

    @pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_spectrum_matches_quadrature(self, model, m):
        N = 5000.0
        numeric = integrate_density(model, lambda pi: math.exp(m * math.log(N * pi) - N * pi - math.lgamma(m + 1)))
        assert model.expected_spectrum(m, N) == pytest.approx(numeric, rel=1e-5)

    @pytest.mark.parametrize(
        "model", [m for m in MODELS if not isinstance(m, ZipfMandelbrot)], ids=["fzm", "gigp"]
    )
    def test_population_size_matches_quadrature(self, model):
        assert model.population_size() == pytest.approx(integrate_density(model, lambda pi: 1.0), rel=1e-5)

    def test_zm_population_is_infinite(self, zm_model):
        assert zm_model.population_size() == math.inf

    @pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
    def test_vocabulary_grows(self, model):
        values = [model.expected_vocabulary(n) for n in (0, 10, 100, 1000, 10000)]
        assert values[0] == 0.0
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
    def test_covariance_matrix(self, model):
        cov = model.covariance_matrix(2000.0, 6)
        assert cov.shape == (7, 7)
        assert np.allclose(cov, cov.T)
        assert cov[0, 0] == pytest.approx(model.variance_vocabulary(2000.0))
        for m in range(1, 7):
            assert cov[m, m] == pytest.approx(model.variance_spectrum(m, 2000.0))
            assert cov[m, m] >= 0

    def test_negative_N_rejected(self, zm_model):
        with pytest.raises(ArgumentError):
            zm_model.expected_vocabulary(-1)

    @pytest.mark.parametrize(
        "factory",
        [
            lambda: ZipfMandelbrot(alpha=1.2, B=0.1),
            lambda: ZipfMandelbrot(alpha=0.5, B=0.0),
            lambda: FiniteZipfMandelbrot(alpha=0.5, A=0.1, B=0.01),
            lambda: GeneralizedInverseGaussPoisson(gamma=0.2, B=0.1, C=0.1),
            lambda: GeneralizedInverseGaussPoisson(gamma=-0.5, B=math.nan, C=0.1),
        ],
    )
    def test_invalid_parameters(self, factory):
        with pytest.raises(ArgumentError):
            factory()


class TestSimulation:
    def test_spectrum_is_consistent(self, zm_model):
        spectrum = zm_model.simulate_spectrum(2000, seed=5)
        assert sum(spectrum.spectrum.values()) == spectrum.V
        assert sum(m * v for m, v in spectrum.spectrum.items()) == spectrum.N

    def test_seeded(self, zm_model):
        first = zm_model.simulate_spectrum(2000, seed=5)
        second = zm_model.simulate_spectrum(2000, seed=5)
        assert first.spectrum == second.spectrum

    def test_vocabulary_close_to_expectation(self, zm_model):
        spectrum = zm_model.simulate_spectrum(20000, seed=1)
        assert spectrum.V == pytest.approx(zm_model.expected_vocabulary(20000), rel=0.1)

    @pytest.mark.slow
    def test_vocabulary_moments_match_sampling(self, zm_model):
        N = 10000
        a, B, C = zm_model.alpha, zm_model.B, zm_model.C
        # fixed population: type k sits where the count of types above pi reaches k - 1/2
        k = np.arange(1, 150001) - 0.5
        pi = (a * k / C + B**-a) ** (-1 / a)
        seen = -np.expm1(-N * pi)
        rng = np.random.default_rng(2)
        vocabulary = np.concatenate([(rng.random((50, pi.size)) < seen).sum(axis=1) for _ in range(40)])
        assert zm_model.expected_vocabulary(N) == pytest.approx(vocabulary.mean(), rel=0.01)
        assert zm_model.variance_vocabulary(N) == pytest.approx(vocabulary.var(ddof=1), rel=0.1)


class TestSerialization:
    def test_dict_form(self):
        fitted = ZipfMandelbrot(alpha=0.5, B=0.05, N=100.0, fit=FitRecord(chisq=3.0, df=4, p=0.56))
        data = fitted.to_dict()
        assert data["family"] == "zm"
        assert data["params"] == {"alpha": 0.5, "B": 0.05}
        assert data["S"] is None
        assert LnreModel.from_dict(data) == fitted

    def test_unknown_family(self):
        with pytest.raises(ArgumentError):
            LnreModel.from_dict({"family": "zipf", "params": {}})


class TestMergeClasses:
    def test_sparse_tail_folded(self):
        assert merge_classes(np.array([10.0, 8.0, 3.0, 1.0])) == [[1], [2, 3, 4]]

    def test_dense_classes_kept(self):
        assert merge_classes(np.array([10.0, 8.0, 6.0])) == [[1], [2], [3]]


class TestFitting:
    def test_exact_spectrum_has_zero_chisq(self, zm_model):
        spectrum = zm_model.expected_frequency_spectrum(10000)
        assert ChiSquareObjective(spectrum)(zm_model) == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.slow
    def test_recovers_zm_parameters(self, zm_model):
        spectrum = zm_model.expected_frequency_spectrum(100000)
        model = fit(spectrum, ModelFamily.ZM)
        assert model.alpha == pytest.approx(0.5, abs=0.01)
        assert model.B == pytest.approx(0.05, rel=0.1)
        assert model.N == spectrum.N
        assert model.fit.chisq < 1e-3
        assert model.fit.df == ChiSquareObjective(spectrum).n_classes - 2

    @pytest.mark.slow
    @pytest.mark.parametrize("source", MODELS[1:], ids=MODEL_IDS[1:])
    def test_refits_own_expected_spectrum(self, source):
        spectrum = source.expected_frequency_spectrum(100000)
        model = fit(spectrum, source.family)
        assert model.family is source.family
        assert model.fit.chisq < 1e-3
        assert model.fit.df == ChiSquareObjective(spectrum).n_classes - 3
        assert model.expected_vocabulary(100000) == pytest.approx(spectrum.V, rel=1e-3)
        assert model.expected_spectrum(1, 100000) == pytest.approx(spectrum.vm(1), rel=1e-3)

    @pytest.mark.slow
    def test_gigp_fits_skewed_corpus_at_least_as_well_as_zm(self, narrow_stream):
        spectrum = frequency_spectrum(narrow_stream)
        gigp = fit(spectrum, ModelFamily.GIGP)
        zm = fit(spectrum, ModelFamily.ZM)
        assert gigp.fit.chisq <= zm.fit.chisq
        assert gigp.fit.df == zm.fit.df - 1

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.4, 0.6, 0.8])
    def test_recovers_alpha_from_sampled_corpora(self, alpha):
        source = ZipfMandelbrot(alpha=alpha, B=0.05)
        estimates = [fit(source.simulate_spectrum(100000, seed=seed), ModelFamily.ZM).alpha for seed in range(10)]
        assert sum(abs(a - alpha) <= 0.05 for a in estimates) >= 9

    def test_too_few_types(self):
        spectrum = ExpectedSpectrum(N=10.0, V=1.0, values=(0.0,) * 9 + (1.0,))
        with pytest.raises(ArgumentError):
            fit(spectrum, ModelFamily.ZM)

    def test_too_few_classes(self):
        spectrum = ExpectedSpectrum(N=6.0, V=4.0, values=(2.0, 2.0))
        with pytest.raises(ArgumentError):
            fit(spectrum, ModelFamily.ZM)

    def test_non_convergence_reports_best_point(self, zm_model):
        spectrum = zm_model.expected_frequency_spectrum(10000)
        with patch("src.services.lnre.fitting.FIT_MAX_EVALUATIONS", 3):
            with pytest.raises(FittingError) as exc:
                fit(spectrum, ModelFamily.ZM)
        assert set(exc.value.best_params) == {"alpha", "B"}
        assert exc.value.simplex_diameter > 0
        assert "chisq" in exc.value.diagnostics

    def test_fallback_to_next_family(self, zm_model):
        fitted = ZipfMandelbrot(alpha=0.5, B=0.05, N=10000.0, fit=FitRecord(1.0, 5, 0.96))

        def fake_fit(spectrum, family):
            if family is ModelFamily.GIGP:
                raise FittingError("no", best_params={}, simplex_diameter=1.0)
            return fitted

        with patch("src.services.lnre.fitting.fit", side_effect=fake_fit) as mock_fit:
            assert fit_with_fallback(zm_model.expected_frequency_spectrum(10000)) is fitted
        assert [c.args[1] for c in mock_fit.call_args_list] == [ModelFamily.GIGP, ModelFamily.ZM]

    def test_fallback_exhausted(self, zm_model):
        error = FittingError("no", best_params={}, simplex_diameter=1.0)
        with patch("src.services.lnre.fitting.fit", side_effect=error):
            with pytest.raises(FittingError):
                fit_with_fallback(zm_model.expected_frequency_spectrum(10000), ["zm", "fzm"])

    def test_fallback_needs_a_family(self, zm_model):
        with pytest.raises(ArgumentError):
            fit_with_fallback(zm_model.expected_frequency_spectrum(10000), [])


class TestGrowth:
    def test_checkpoints(self):
        points = growth_checkpoints(1000)
        assert 1000 in points
        assert points == sorted(set(points))
        assert points[0] == 25
        assert points[-1] == 2000

    def test_checkpoints_include_odd_N(self):
        points = growth_checkpoints(101)
        assert 101 in points
        assert max(points) <= 202

    def test_extrapolation_kinds(self):
        model = ZipfMandelbrot(alpha=0.5, B=0.05, N=1000.0)
        curve = extrapolate_growth(model, [500, 1000, 1500])
        assert curve.kind is CurveKind.EXPECTED
        assert [p.kind for p in curve.checkpoints] == [
            CurveKind.INTERPOLATED,
            CurveKind.INTERPOLATED,
            CurveKind.EXTRAPOLATED,
        ]
        assert curve.checkpoints[1].V == pytest.approx(model.expected_vocabulary(1000))
        assert curve.checkpoints[1].V1 == pytest.approx(model.expected_spectrum(1, 1000))

    def test_non_positive_checkpoints_dropped(self):
        model = ZipfMandelbrot(alpha=0.5, B=0.05, N=1000.0)
        curve = extrapolate_growth(model, [-10, 0, 500, 1500])
        assert [p.N for p in curve.checkpoints] == [500, 1500]
        assert curve.kind is CurveKind.EXPECTED

    def test_unfitted_model_rejected(self, zm_model):
        with pytest.raises(ArgumentError):
            extrapolate_growth(zm_model, [10])


class TestZTests:
    def test_same_corpus_gives_zero(self):
        model = ZipfMandelbrot(alpha=0.5, B=0.05, N=1000.0)
        spectrum = model.expected_frequency_spectrum(1000)
        assert compare_vocabulary_z(model, spectrum, model, spectrum).z == pytest.approx(0.0, abs=1e-9)
        result = compare_growth_z(model, spectrum, model, spectrum)
        assert result.z == pytest.approx(0.0, abs=1e-9)
        assert result.p == pytest.approx(1.0)

    def test_richer_corpus_has_positive_z(self):
        rich = ZipfMandelbrot(alpha=0.7, B=0.05, N=5000.0)
        poor = ZipfMandelbrot(alpha=0.3, B=0.05, N=5000.0)
        result = compare_vocabulary_z(
            rich, rich.expected_frequency_spectrum(5000), poor, poor.expected_frequency_spectrum(5000)
        )
        assert result.z > 3
        assert result.p < 0.01

    def test_spectrum_size_must_match_model(self):
        model = ZipfMandelbrot(alpha=0.5, B=0.05, N=1000.0)
        other = model.expected_frequency_spectrum(2000)
        with pytest.raises(ArgumentError):
            compare_vocabulary_z(model, other, model, other)

    @pytest.mark.slow
    def test_fitted_corpora_differ_in_growth_rate(self, narrow_stream, broad_stream):
        narrow, broad = frequency_spectrum(narrow_stream), frequency_spectrum(broad_stream)
        growth = compare_growth_z(fit_with_fallback(narrow), narrow, fit_with_fallback(broad), broad)
        assert growth.z < -3
        assert growth.p < 0.01
