"""Tests for the corplex command line."""

import json
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from src.cli import app
from src.core.constants import APP_VERSION
from src.core.validators import FittingError
from src.repositories.spectrum_repository import SpectrumRepository
from src.services.corpus import write_vertical
from src.services.lnre import FitRecord, ZipfMandelbrot
from tests.conftest import zipf_stream

runner = CliRunner()


@pytest.fixture(autouse=True)
def no_file_log():
    with patch("src.cli.Settings.setup_logging", return_value=None):
        yield


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture
def narrow_file(tmp_path, narrow_stream):
    path = tmp_path / "narrow.vrt"
    path.write_text(write_vertical(narrow_stream), encoding="utf-8")
    return path


@pytest.fixture
def broad_file(tmp_path, broad_stream):
    path = tmp_path / "broad.vrt"
    path.write_text(write_vertical(broad_stream), encoding="utf-8")
    return path


@pytest.fixture
def spectrum_file(tmp_path):
    path = tmp_path / "spectrum.csv"
    SpectrumRepository().save(str(path), ZipfMandelbrot(alpha=0.5, B=0.05).simulate_spectrum(20000, seed=4))
    return path


def _fitted(spectrum, family):
    return ZipfMandelbrot(alpha=0.5, B=0.05, N=float(spectrum.N), fit=FitRecord(chisq=8.0, df=13, p=0.84))


class TestVersion:
    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert f"corplex v{APP_VERSION}" in result.output


class TestAnalyze:
    def test_untagged_corpus_is_partial(self, fitted_lnre, corpus_file, out_dir):
        result = runner.invoke(app, ["analyze", str(corpus_file), "--out", str(out_dir)])
        assert result.exit_code == 2
        assert "A.density" in result.output
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert report["corpora"][0]["measures"]["density"]["status"] == "unavailable"
        assert (out_dir / "tables.csv").exists()

    def test_complete_report(self, fitted_lnre, narrow_file, trees_file, out_dir):
        args = ["analyze", str(narrow_file), "--trees", str(trees_file), "--readability-sample", "200"]
        result = runner.invoke(app, args + ["--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert "Report complete" in result.output
        assert (out_dir / "dlevel.svg").exists()
        assert (out_dir / "growth_A.svg").exists()

    def test_emit_and_segment_size(self, fitted_lnre, narrow_file, out_dir):
        args = ["analyze", str(narrow_file), "--segment-size", "50", "--readability-sample", "200", "--emit", "json"]
        result = runner.invoke(app, args + ["--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert report["corpora"][0]["measures"]["msttr"]["value"]["segments"] == 120
        assert sorted(p.name for p in out_dir.iterdir()) == ["report.json"]

    def test_config_file_and_flag_precedence(self, fitted_lnre, narrow_file, tmp_path, out_dir):
        config = tmp_path / "run.cfg"
        config.write_text("segment_size = 50\nreadability_sample = 200\noutput_formats = json\n", encoding="utf-8")
        args = ["analyze", str(narrow_file), "--config", str(config), "--segment-size", "200", "--out", str(out_dir)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert report["corpora"][0]["measures"]["msttr"]["value"]["segment_size"] == 200
        assert report["corpora"][0]["measures"]["flesch"]["value"]["sample_size"] == 200

    def test_missing_input_is_fatal(self, tmp_path, out_dir):
        result = runner.invoke(app, ["analyze", str(tmp_path / "absent.txt"), "--out", str(out_dir)])
        assert result.exit_code == 1
        assert "Input file not found" in result.output

    def test_unknown_config_key_is_fatal(self, corpus_file, tmp_path, out_dir):
        config = tmp_path / "run.cfg"
        config.write_text("window = 10\n", encoding="utf-8")
        result = runner.invoke(app, ["analyze", str(corpus_file), "-c", str(config), "--out", str(out_dir)])
        assert result.exit_code == 1
        assert "Unknown config key: window" in result.output

    def test_bad_family_is_fatal(self, corpus_file, out_dir):
        result = runner.invoke(app, ["analyze", str(corpus_file), "--family", "zipf", "--out", str(out_dir)])
        assert result.exit_code == 1
        assert "Unknown LNRE family" in result.output


class TestCompare:
    def test_two_corpora(self, fitted_lnre, narrow_file, broad_file, out_dir):
        args = ["compare", str(narrow_file), str(broad_file), "--readability-sample", "200", "--out", str(out_dir)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert [c["label"] for c in report["corpora"]] == ["A", "B"]
        assert report["comparison"]["ks_ttr"]["status"] == "ok"
        assert (out_dir / "ttr_kde.svg").exists()
        assert (out_dir / "growth_B.svg").exists()

    def test_repeated_runs_are_byte_identical(self, fitted_lnre, narrow_file, broad_file, tmp_path):
        outputs = []
        for run in range(3):
            out = tmp_path / f"run{run}"
            args = ["compare", str(narrow_file), str(broad_file), "--readability-sample", "200", "--seed", "5"]
            result = runner.invoke(app, args + ["--out", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert outputs[0] == outputs[1] == outputs[2]
        assert {"report.json", "tables.csv", "ttr_kde.svg", "growth_A.svg"} <= set(outputs[0])

    def test_equalize_tokens(self, fitted_lnre, narrow_file, tmp_path, out_dir):
        small = tmp_path / "small.vrt"
        small.write_text(write_vertical(zipf_stream(3000, 0.9, 8000, seed=5)), encoding="utf-8")
        args = ["compare", str(narrow_file), str(small), "--equalize-tokens", "--seed", "7", "--emit", "json"]
        result = runner.invoke(app, args + ["--out", str(out_dir)])
        assert result.exit_code in (0, 2), result.output
        assert "Equalized to" in result.output
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
        assert report["corpora"][0]["tokens"] <= report["corpora"][1]["tokens"]
        assert report["provenance"]["seed"] == 7


class TestFit:
    def test_single_family(self, spectrum_file, out_dir):
        with patch("src.cli.fit", side_effect=_fitted) as mock_fit:
            result = runner.invoke(app, ["fit", str(spectrum_file), "--family", "zm", "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert mock_fit.call_count == 1
        assert "Fit complete" in result.output
        model = json.loads((out_dir / "model_zm.json").read_text(encoding="utf-8"))
        assert model["family"] == "zm"
        assert (out_dir / "growth_zm.svg").exists()
        assert not (out_dir / "fits.csv").exists()

    def test_all_families_with_one_failure(self, spectrum_file, out_dir):
        def fit_some(spectrum, family):
            if family.value == "gigp":
                raise FittingError("simplex did not converge", best_params={"gamma": -0.5}, simplex_diameter=0.2)
            return _fitted(spectrum, family)

        with patch("src.cli.fit", side_effect=fit_some):
            result = runner.invoke(app, ["fit", str(spectrum_file), "--family", "all", "--out", str(out_dir)])
        assert result.exit_code == 2
        rows = (out_dir / "fits.csv").read_text(encoding="utf-8").splitlines()
        assert rows[1].startswith("gigp,failed,")
        assert (out_dir / "model_zm.json").exists()
        assert (out_dir / "model_fzm.json").exists()

    def test_single_family_failure_is_fatal(self, spectrum_file, out_dir):
        error = FittingError("simplex did not converge", best_params={"alpha": 0.4, "B": 0.1}, simplex_diameter=0.3)
        with patch("src.cli.fit", side_effect=error):
            result = runner.invoke(app, ["fit", str(spectrum_file), "--family", "zm", "--out", str(out_dir)])
        assert result.exit_code == 1
        assert "best_params" in result.output
        assert "simplex_diameter: 0.3" in result.output

    def test_corpus_input(self, narrow_file, out_dir):
        with patch("src.cli.fit", side_effect=_fitted):
            result = runner.invoke(app, ["fit", str(narrow_file), "--family", "zm", "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert "N=6000" in result.output


class TestDlevel:
    def test_distribution(self, trees_file, out_dir):
        result = runner.invoke(app, ["dlevel", str(trees_file), "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert "31 sentences classified, 0 skipped" in result.output
        assert "Level 7: 3" in result.output
        assert (out_dir / "dlevel.csv").exists()
        assert (out_dir / "dlevel.json").exists()

    def test_skipped_lines_are_partial(self, tmp_path, out_dir):
        trees = tmp_path / "mixed.trees"
        trees.write_text("(S (NP (PRP I)) (VP (VBD ran)))\n(S (NP\n", encoding="utf-8")
        result = runner.invoke(app, ["dlevel", str(trees), "--out", str(out_dir)])
        assert result.exit_code == 2
        assert "1 sentences classified, 1 skipped" in result.output

    def test_nothing_classifiable_is_fatal(self, tmp_path, out_dir):
        trees = tmp_path / "bad.trees"
        trees.write_text("(NP (NN x))\n", encoding="utf-8")
        result = runner.invoke(app, ["dlevel", str(trees), "--out", str(out_dir)])
        assert result.exit_code == 1


class TestSample:
    def test_vertical_sample(self, narrow_file, out_dir):
        args = ["sample", str(narrow_file), "--tokens", "1300", "--seed", "2", "--out", str(out_dir)]
        result = runner.invoke(app, args)
        assert result.exit_code == 0, result.output
        assert "Sampled 1300 tokens, 100 sentences" in result.output
        assert (out_dir / "sample.vrt").exists()

    def test_plain_sample(self, corpus_file, out_dir):
        result = runner.invoke(app, ["sample", str(corpus_file), "-n", "50", "--out", str(out_dir)])
        assert result.exit_code == 0, result.output
        text = (out_dir / "sample.txt").read_text(encoding="utf-8")
        assert len(text.split()) <= 50

    def test_short_corpus_warns(self, vertical_file, out_dir):
        result = runner.invoke(app, ["sample", str(vertical_file), "-n", "500", "--out", str(out_dir)])
        assert result.exit_code == 0
        assert "below the budget of 500" in result.output
