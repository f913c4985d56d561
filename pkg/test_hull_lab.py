"""
Command-line tests: exit codes, JSON reports and presentation lookup.
"""
import json

import pytest
from click.testing import CliRunner

import constants
from hull_lab import __version__, cli
from utils import profiler


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args))


class TestWords:
    def test_normalize_json(self, runner):
        result = invoke(runner, "normalize", "S", "a a b y[0]", "--format", "json")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["command"] == "normalize"
        assert report["status"] == "holds"
        assert report["result"]["normal_form"] == "b y[2]"
        assert report["presentation_hash"]

    def test_normalize_text(self, runner):
        result = invoke(runner, "normalize", "S", "a b x[0]")
        assert result.exit_code == 0
        assert "b x[0]" in result.stdout

    def test_equiv_fails_for_different_families(self, runner):
        assert invoke(runner, "equiv", "S", "x[0]", "y[0]").exit_code == 1

    def test_equiv_holds(self, runner):
        assert invoke(runner, "equiv", "S", "a b y[0]", "b y[1]").exit_code == 0

    def test_cancel_check_counterexample(self, runner):
        result = invoke(runner, "cancel-check", "left_absorbing", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 1

    def test_divides(self, runner):
        assert invoke(runner, "divides", "S", "a", "b y[1]").exit_code == 0
        assert invoke(runner, "divides", "S", "x[0]", "y[0]").exit_code == 1


class TestPresentationLookup:
    def test_corpus_fallback_by_stem(self, runner):
        assert invoke(runner, "normalize", "nowhere/S.pres", "a").exit_code == 0

    def test_unknown_presentation(self, runner):
        assert invoke(runner, "normalize", "no_such_monoid", "a").exit_code == 3

    def test_bad_word(self, runner):
        assert invoke(runner, "normalize", "S", "q").exit_code == 3


class TestUsage:
    def test_empty_window(self, runner):
        assert invoke(runner, "cancel-check", "S", "--window=3..1").exit_code == 3

    def test_unknown_command(self, runner):
        assert invoke(runner, "frobnicate").exit_code == 3

    def test_version(self, runner):
        result = invoke(runner, "--version")
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_omega_needs_one_character(self, runner):
        assert invoke(runner, "spectrum", "omega", "S", "--radius", "2", "--window", "0..0").exit_code == 3


class TestEpsilon:
    def test_default(self, runner):
        result = invoke(runner, "regrep", "epsilon", "--format", "json")
        assert result.exit_code == 0
        data = json.loads(result.stdout)["result"]
        assert data["m_used"] == 2
        assert data["epsilon"] == pytest.approx(0.021782, abs=1e-6)
        assert data["b_trace"] == pytest.approx(0.5)
        assert data["exceeds"] is True

    def test_infinite_m(self, runner):
        result = invoke(runner, "regrep", "epsilon", "--m", "inf", "--alpha", "0.3", "--format", "json")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["result"]["m_used"] == 4

    def test_alpha_below_bound(self, runner):
        assert invoke(runner, "regrep", "epsilon", "--m", "2", "--alpha", "0.5").exit_code == 3

    def test_bad_m(self, runner):
        assert invoke(runner, "regrep", "epsilon", "--m", "lots").exit_code == 3


class TestChecks:
    def test_ideals_closure_saturates(self, runner):
        result = invoke(runner, "ideals", "closure", "S", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 0

    def test_align_check_grows(self, runner):
        result = invoke(runner, "align-check", "S", "--pair", "a,b", "--radius", "3", "--window=-1..1")
        assert result.exit_code == 1

    def test_align_check_free_monoid(self, runner):
        assert invoke(runner, "align-check", "free2", "--radius", "3", "--window", "0..0").exit_code == 0

    def test_cstar_in_T_is_unknown(self, runner):
        result = invoke(runner, "regularity", "check", "T", "--kind", "cstar", "--X", "Family(b)",
                        "--h", "a", "--h", "c", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 2

    def test_condition1_failure_exits_1(self, runner):
        result = invoke(runner, "regularity", "check", "S", "--X", "Family(b)", "--h", "a",
                        "--radius", "3", "--window", "0..0")
        assert result.exit_code == 1

    def test_gp_eq_g_invalid_instance(self, runner):
        result = invoke(runner, "regularity", "check", "S", "--kind", "gp-eq-g", "--X", "Family(b)",
                        "--h", "a", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 3

    def test_regrep_eval_residual(self, runner):
        result = invoke(runner, "regrep", "eval", "S", "--expr", "(L[a]-1)*P[Family(b)]",
                        "--radius", "3", "--window=-1..1")
        assert result.exit_code == 1

    def test_regrep_cover_expands_index(self, runner):
        result = invoke(runner, "regrep", "cover", "S", "--X", "Family(b)", "--cover", "Principal(b x[n])",
                        "--cover", "Principal(b y[n])", "--radius", "3", "--window=-1..1")
        assert result.exit_code == 0

    def test_regrep_cover_incomplete(self, runner):
        result = invoke(runner, "regrep", "cover", "S", "--X", "Principal(b)", "--cover", "Principal(b x[0])",
                        "--radius", "3", "--window=-1..1")
        assert result.exit_code == 2

    def test_hausdorff_scan_free_monoid(self, runner):
        assert invoke(runner, "hausdorff", "scan", "free2", "--radius", "3", "--window", "0..0").exit_code == 2


def test_profile_flag(runner, monkeypatch):
    monkeypatch.setattr(constants, "PROFILING_ENABLED", False)
    with runner.isolated_filesystem():
        result = invoke(runner, "--profile", "cancel-check", "S", "--radius", "2", "--window", "0..0")
    assert result.exit_code == 0


class TestRegrepNames:
    def test_r4_runs_the_cover_product(self, runner):
        args = ["S", "--X", "Family(b)", "--cover", "Principal(b x[n])", "--cover", "Principal(b y[n])",
                "--radius", "3", "--window=-1..1", "--format", "json"]
        named = invoke(runner, "regrep", "r4", *args)
        assert named.exit_code == 0
        assert json.loads(named.stdout) == json.loads(invoke(runner, "regrep", "cover", *args).stdout)

    def test_lemma16_runs_the_averaging_constant(self, runner):
        result = invoke(runner, "regrep", "lemma16", "--m", "2", "--alpha", "0.6", "--format", "json")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["result"]["epsilon"] == pytest.approx(0.021782, abs=1e-6)


class TestScans:
    def test_regularity_scan_on_S(self, runner):
        result = invoke(runner, "regularity", "scan", "S", "--limit", "5", "--radius", "3", "--window", "0..0",
                        "--format", "json")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["status"] == "holds"
        assert 0 < report["result"]["instances"] <= 5
        assert report["result"]["skipped_outside_domain"] > 0

    def test_hausdorff_scan_on_T(self, runner):
        result = invoke(runner, "hausdorff", "scan", "T", "--radius", "3", "--window", "0..0", "--format", "json")
        assert result.exit_code == 0
        pairs = {(row["g"], row["sequence"]) for row in json.loads(result.stdout)["result"]["witnesses"]}
        assert ("a", "b x[n]") in pairs

    def test_ideals_intersect(self, runner):
        result = invoke(runner, "ideals", "intersect", "S", "bS", "aS", "--radius", "3", "--window", "0..0",
                        "--format", "json")
        assert result.exit_code == 0
        data = json.loads(result.stdout)["result"]
        assert data["intersection"] == "Family(b)"
        assert set(data["generators"]) == {"b x[0]", "b y[0]"}

    def test_sufficient_conditions_free_monoid(self, runner):
        result = invoke(runner, "regularity", "sufficient", "free2", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 0

    def test_sufficient_conditions_S_is_open(self, runner):
        result = invoke(runner, "regularity", "sufficient", "S", "--radius", "3", "--window", "0..0")
        assert result.exit_code == 2

    def test_spectrum_limit_inside_tail(self, runner):
        result = invoke(runner, "spectrum", "limit", "S", "b x[n]", "--tail", "inside", "--radius", "3",
                        "--window=-1..1", "--format", "json")
        assert result.exit_code in (0, 2)
        assert json.loads(result.stdout)["result"]["sequence"] == "b x[n]"

    def test_spectrum_limit_rejects_unknown_tail(self, runner):
        assert invoke(runner, "spectrum", "limit", "S", "b x[n]", "--tail", "sideways").exit_code == 3


def test_profile_starts_from_empty_stats(runner, monkeypatch):
    monkeypatch.setattr(constants, "PROFILING_ENABLED", False)
    profiler._performance_stats["stale_entry"]["calls"] = 7
    with runner.isolated_filesystem():
        result = invoke(runner, "--profile", "cancel-check", "S", "--radius", "2", "--window", "0..0")
    assert result.exit_code == 0
    assert "stale_entry" not in profiler.get_performance_stats()
    profiler.reset_performance_stats()
