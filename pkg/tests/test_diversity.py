"""Tests for TTR, MSTTR, corrected indices, frequency spectra and growth curves."""

import math

import numpy as np
import pytest

from src.core.types import CurveKind, TypeDefinition
from src.core.validators import ArgumentError, UndefinedMeasureError
from src.services.corpus import TokenStream, tokenize_plain, type_keys
from src.services.diversity import (
    FrequencySpectrum,
    GrowthCurve,
    GrowthPoint,
    SampleSeries,
    binomial_interpolation,
    binomial_spectrum_interpolation,
    corrected_indices,
    frequency_spectrum,
    growth_rate,
    interpolated_growth,
    msttr,
    observed_growth,
    ttr,
)


class TestTtr:
    def test_plain_text(self, plain_stream):
        assert ttr(plain_stream) == pytest.approx(11 / 14)

    def test_punctuation_ignored(self):
        assert ttr(tokenize_plain("a , b ; c .")) == 1.0

    def test_empty_stream_undefined(self):
        with pytest.raises(UndefinedMeasureError):
            ttr(TokenStream.empty())

    def test_lemma_types_merge_inflections(self, vertical_stream):
        surface = ttr(vertical_stream, TypeDefinition.SURFACE)
        lemma = ttr(vertical_stream, TypeDefinition.LEMMA)
        assert surface == lemma == 1.0

    def test_broad_corpus_is_more_diverse(self, narrow_stream, broad_stream):
        assert ttr(broad_stream) > ttr(narrow_stream)


class TestMsttr:
    def test_segment_means(self):
        mean, series = msttr(tokenize_plain("a a b b a b."), 2)
        assert series.values == (0.5, 0.5, 1.0)
        assert mean == pytest.approx(2 / 3)
        assert series.segment_size == 2

    def test_no_full_segment(self, plain_stream):
        with pytest.raises(UndefinedMeasureError):
            msttr(plain_stream, 100)

    def test_broad_corpus_is_more_diverse(self, narrow_stream, broad_stream):
        narrow, _ = msttr(narrow_stream, 100)
        broad, _ = msttr(broad_stream, 100)
        assert broad > narrow

    def test_series_length(self, narrow_stream):
        _, series = msttr(narrow_stream, 50)
        assert len(series) == 120

    def test_series_rejects_non_finite(self):
        with pytest.raises(ArgumentError):
            SampleSeries("ttr", 10, (0.5, math.nan))


class TestFrequencySpectrum:
    def test_plain_text(self, plain_stream):
        spectrum = frequency_spectrum(plain_stream)
        assert (spectrum.N, spectrum.V) == (14, 11)
        assert dict(spectrum.spectrum) == {1: 9, 2: 1, 3: 1}

    def test_identities(self, narrow_stream, broad_stream):
        for stream in (narrow_stream, broad_stream):
            spectrum = frequency_spectrum(stream)
            assert sum(spectrum.spectrum.values()) == spectrum.V
            assert sum(m * vm for m, vm in spectrum.spectrum.items()) == spectrum.N
            assert spectrum.N == stream.word_count

    def test_inconsistent_spectrum_rejected(self):
        with pytest.raises(ArgumentError):
            FrequencySpectrum(N=10, V=3, spectrum={1: 2, 2: 1})

    def test_from_counts(self):
        spectrum = FrequencySpectrum.from_counts({"a": 3, "b": 1, "c": 1})
        assert (spectrum.N, spectrum.V, spectrum.vm(1), spectrum.vm(3), spectrum.vm(2)) == (5, 3, 2, 1, 0)
        assert spectrum.max_m == 3

    def test_empty_classes_dropped(self):
        spectrum = FrequencySpectrum(N=2, V=2, spectrum={1: 2, 5: 0})
        assert dict(spectrum.spectrum) == {1: 2}


class TestCorrectedIndices:
    def test_values(self, plain_stream):
        c = corrected_indices(frequency_spectrum(plain_stream))
        assert c.herdan_c == pytest.approx(math.log(11) / math.log(14))
        assert c.guiraud_r == pytest.approx(11 / math.sqrt(14))
        assert c.yule_k == pytest.approx(1e4 * (22 - 14) / 14**2)

    def test_single_token_undefined(self):
        with pytest.raises(UndefinedMeasureError):
            corrected_indices(FrequencySpectrum(N=1, V=1, spectrum={1: 1}))

    def test_growth_rate(self, plain_stream):
        assert growth_rate(frequency_spectrum(plain_stream)) == pytest.approx(9 / 14)


class TestObservedGrowth:
    def test_checkpoints(self, plain_stream):
        curve = observed_growth(plain_stream, step=5)
        assert curve.column("N") == [5, 10, 14]
        assert curve.column("V") == [4, 8, 11]
        assert curve.column("V1") == [3, 6, 9]
        assert curve.column("V2") == [1, 2, 1]
        assert curve.kind is CurveKind.OBSERVED

    def test_final_point_matches_spectrum(self, narrow_stream):
        curve = observed_growth(narrow_stream)
        spectrum = frequency_spectrum(narrow_stream)
        last = curve.checkpoints[-1]
        assert (last.N, last.V, last.V1, last.V2) == (spectrum.N, spectrum.V, spectrum.vm(1), spectrum.vm(2))

    def test_curve_must_increase(self):
        with pytest.raises(ArgumentError):
            GrowthCurve((GrowthPoint(10, 5, 3, 1), GrowthPoint(10, 6, 3, 1)))


class TestBinomialInterpolation:
    def test_endpoints(self, plain_stream):
        spectrum = frequency_spectrum(plain_stream)
        assert binomial_interpolation(spectrum, spectrum.N) == spectrum.V
        assert binomial_interpolation(spectrum, 0) == 0.0

    def test_half_sample_of_hapaxes(self):
        spectrum = FrequencySpectrum(N=2, V=2, spectrum={1: 2})
        assert binomial_interpolation(spectrum, 1) == pytest.approx(1.0)

    def test_beyond_sample_rejected(self, plain_stream):
        with pytest.raises(ArgumentError):
            binomial_interpolation(frequency_spectrum(plain_stream), 15)

    def test_spectrum_thinning(self):
        spectrum = FrequencySpectrum(N=2, V=1, spectrum={2: 1})
        assert binomial_spectrum_interpolation(spectrum, 1, 1) == pytest.approx(0.5)

    def test_monotone(self, narrow_stream):
        spectrum = frequency_spectrum(narrow_stream)
        values = [binomial_interpolation(spectrum, n) for n in range(0, spectrum.N + 1, 500)]
        assert values == sorted(values)

    @pytest.mark.parametrize("fraction", [0.25, 0.5])
    def test_matches_random_subsamples(self, broad_stream, fraction):
        spectrum = frequency_spectrum(broad_stream)
        _, codes = np.unique(type_keys(broad_stream), return_inverse=True)
        size = int(fraction * spectrum.N)
        rng = np.random.default_rng(11)
        drawn = [np.unique(codes[rng.choice(codes.size, size, replace=False)]).size for _ in range(300)]
        assert binomial_interpolation(spectrum, size) == pytest.approx(np.mean(drawn), rel=0.02)

    def test_interpolated_growth_skips_out_of_range(self):
        spectrum = FrequencySpectrum(N=2, V=2, spectrum={1: 2})
        curve = interpolated_growth(spectrum, [0, 1, 2, 3])
        assert curve.column("N") == [1, 2]
        assert curve.kind is CurveKind.INTERPOLATED
