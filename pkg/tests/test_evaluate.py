import math

import numpy as np
import pytest
from scipy import sparse

from listcurator.evaluate import (
    AGGREGATE,
    CVConfig,
    choose_folds,
    cohesion,
    cohesion_report,
    competition_places,
    corrected_cohesion,
    cross_validate,
    medal_tables,
    precision_recall,
    spearman,
)
from listcurator.recommend import Ranking
from listcurator.synth import SynthConfig, generate
from listcurator.views import FeatureSpace, ProfileMatrix


def ranking_from_scores(scores, criterion="co_listed"):
    entries = tuple(sorted(scores.items(), key=lambda item: (-item[1], item[0])))
    return Ranking(criterion=criterion, entries=entries, candidates=frozenset(scores))


class TestChooseFolds:
    @pytest.mark.parametrize(
        "seed_count,expected", [(20, 2), (34, 3), (48, 4), (97, 5), (39, 3), (50, 5), (100, 5)]
    )
    def test_values(self, seed_count, expected):
        assert choose_folds(seed_count) == expected

    def test_exhaustive_against_rule(self):
        for n in range(20, 200):
            folds = choose_folds(n)
            assert n // folds >= 10
            for larger in range(folds + 1, 6):
                assert n // larger < 10

    def test_too_few_seeds(self):
        with pytest.raises(ValueError, match="no valid fold count"):
            choose_folds(19)


class TestPrecisionRecall:
    def test_three_hits(self):
        scores = {f"t{i}": 1.0 - i / 100 for i in range(3)}
        scores.update({f"n{i}": 0.5 - i / 100 for i in range(17)})
        test = {f"t{i}" for i in range(3)} | {f"x{i}" for i in range(7)}
        scores.update({f"x{i}": 0.0 for i in range(7)})
        r = ranking_from_scores(scores)
        assert precision_recall(r, test, 10) == (0.3, 0.3)

    def test_perfect(self):
        scores = {f"t{i}": 1.0 - i / 100 for i in range(10)}
        scores.update({f"n{i}": 0.0 for i in range(10)})
        r = ranking_from_scores(scores)
        test = {f"t{i}" for i in range(10)}
        assert precision_recall(r, test, 10) == (1.0, 1.0)

    def test_no_hits(self):
        scores = {"n1": 1.0, "n2": 0.9, "t1": 0.0}
        r = ranking_from_scores(scores)
        assert precision_recall(r, {"t1"}, 2) == (0.0, 0.0)

    def test_counts_are_integers(self):
        scores = {f"u{i}": float(11 - i) for i in range(12)}
        r = ranking_from_scores(scores)
        test = {"u0", "u3", "u7", "u11"}
        for k in range(1, 13):
            p, rec = precision_recall(r, test, k)
            assert p * k == pytest.approx(round(p * k))
            assert rec * len(test) == pytest.approx(round(rec * len(test)))

    def test_recall_monotone_in_k(self):
        scores = {f"u{i}": float(20 - i) for i in range(20)}
        r = ranking_from_scores(scores)
        test = {"u1", "u5", "u15"}
        values = [precision_recall(r, test, k)[1] for k in range(1, 21)]
        assert values == sorted(values)

    def test_errors(self):
        r = ranking_from_scores({"a": 1.0, "b": 0.5})
        with pytest.raises(ValueError, match="empty test set"):
            precision_recall(r, set(), 1)
        with pytest.raises(ValueError, match="exceeds candidate count"):
            precision_recall(r, {"a"}, 3)
        with pytest.raises(ValueError, match="missing from the ranking"):
            precision_recall(r, {"ghost"}, 1)


class TestSpearman:
    def test_identity_exact(self):
        r = ranking_from_scores({"a": 3.0, "b": 2.0, "c": 1.0, "d": 0.5})
        assert spearman(r, r) == 1.0

    def test_reverse_exact(self):
        forward = ranking_from_scores({"a": 4.0, "b": 3.0, "c": 2.0, "d": 1.0})
        backward = ranking_from_scores({"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0})
        assert spearman(forward, backward) == -1.0

    def test_tie_case_matches_rank_then_pearson(self):
        # oracle: fractional ranks computed by hand, then plain Pearson
        a = ranking_from_scores({"a": 3.0, "b": 2.0, "c": 2.0, "d": 1.0, "e": 0.0})
        b = ranking_from_scores({"a": 3.0, "b": 2.5, "c": 0.5, "d": 1.0, "e": 0.0})
        # ascending fractional ranks over ids a..e
        ranks_a = [5.0, 3.5, 3.5, 2.0, 1.0]
        ranks_b = [5.0, 4.0, 2.0, 3.0, 1.0]
        mean_a = sum(ranks_a) / 5
        mean_b = sum(ranks_b) / 5
        da = [x - mean_a for x in ranks_a]
        db = [x - mean_b for x in ranks_b]
        expected = sum(x * y for x, y in zip(da, db)) / math.sqrt(
            sum(x * x for x in da) * sum(y * y for y in db)
        )
        assert spearman(a, b) == pytest.approx(expected, abs=1e-12)

    def test_mismatched_candidates(self):
        a = ranking_from_scores({"a": 1.0, "b": 0.0})
        b = ranking_from_scores({"a": 1.0, "c": 0.0})
        with pytest.raises(ValueError, match="different candidate sets"):
            spearman(a, b)


class TestMedalTables:
    def test_single_contender_takes_first(self):
        tables = medal_tables([{"only": 0.4}, {"only": 0.2}])
        assert tables["only"] == (100.0, 0.0, 0.0)

    def test_tie_free_columns_sum_to_100(self):
        cells = [
            {"a": 0.9, "b": 0.5, "c": 0.1},
            {"a": 0.2, "b": 0.7, "c": 0.4},
            {"a": 0.3, "b": 0.1, "c": 0.8},
            {"a": 0.6, "b": 0.5, "c": 0.4},
        ]
        tables = medal_tables(cells)
        for place in range(3):
            assert sum(tables[name][place] for name in "abc") == pytest.approx(100.0)

    def test_ties_share_better_place(self):
        places = competition_places({"a": 0.5, "b": 0.5, "c": 0.3})
        assert places == {"a": 1, "b": 1, "c": 3}


class TestCorrectedCohesion:
    def test_arithmetic(self):
        assert corrected_cohesion(0.5, 0.2) == pytest.approx(0.375)

    def test_expected_one(self):
        assert corrected_cohesion(1.0, 1.0) == 0.0

    def test_anchors(self):
        assert corrected_cohesion(1.0, 0.4) == pytest.approx(1.0)
        assert corrected_cohesion(0.4, 0.4) == 0.0
        # strictly increasing in raw for fixed expected
        values = [corrected_cohesion(r, 0.3) for r in (0.1, 0.3, 0.6, 0.9)]
        assert values == sorted(values)


def profile_from_rows(rows, criterion="co_listed"):
    users = tuple(f"u{i:02d}" for i in range(len(rows)))
    features = tuple(f"f{j}" for j in range(len(rows[0])))
    return ProfileMatrix(
        criterion=criterion,
        space=FeatureSpace(features),
        users=users,
        matrix=sparse.csr_matrix(np.array(rows, dtype=float)),
    )


class TestCohesion:
    def test_identical_seed_rows(self):
        rows = [[1, 1, 0]] * 3 + [[0, 1, 1], [1, 0, 0], [0, 0, 1]] * 4
        pm = profile_from_rows(rows)
        entry = cohesion(pm, {"u00", "u01", "u02"}, randomizations=100, rng_seed=0)
        assert entry.raw == pytest.approx(1.0, abs=1e-12)
        assert entry.corrected == pytest.approx(1.0, abs=1e-9)

    def test_random_seed_subset_is_null(self):
        rng = np.random.default_rng(5)
        rows = (rng.random((40, 12)) < 0.3).astype(float)
        rows[rows.sum(axis=1) == 0, 0] = 1.0
        pm = profile_from_rows(rows.tolist())
        seeds = {f"u{i:02d}" for i in rng.choice(40, size=8, replace=False)}
        entry = cohesion(pm, seeds, randomizations=300, rng_seed=1)
        band = 3 * entry.null_std / (1 - entry.expected)
        assert abs(entry.corrected) < band

    def test_errors(self):
        pm = profile_from_rows([[1, 0], [0, 1], [1, 1]])
        with pytest.raises(ValueError, match="at least 2 seed"):
            cohesion(pm, {"u00"}, randomizations=100)
        with pytest.raises(ValueError, match="at least 100 randomizations"):
            cohesion(pm, {"u00", "u01"}, randomizations=10)

    def test_deterministic(self):
        pm = profile_from_rows([[1, 0], [0, 1], [1, 1], [1, 2]])
        a = cohesion(pm, {"u00", "u01"}, randomizations=100, rng_seed=3)
        b = cohesion(pm, {"u00", "u01"}, randomizations=100, rng_seed=3)
        assert a == b


@pytest.fixture(scope="module")
def small_dataset():
    return generate(
        SynthConfig(
            n_seed=20,
            n_noise=120,
            vocab_size=400,
            marker_terms=10,
            tweets_per_user=20,
            list_count=16,
            rng_seed=9,
            signal_strength={"tweets200": 0.9, "co_listed": 0.5},
        )
    )


class TestCrossValidate:
    def test_reproducible_for_fixed_seed(self, small_dataset):
        cfg = CVConfig(runs=3, k_values=(10, 20), rng_seed=4)
        first = cross_validate(small_dataset, ["tweets200", "co_listed"], cfg)
        second = cross_validate(small_dataset, ["tweets200", "co_listed"], cfg)
        assert first.to_json_dict() == second.to_json_dict()

    def test_jobs_do_not_change_results(self, small_dataset):
        cfg = CVConfig(runs=4, k_values=(10,), rng_seed=4)
        serial = cross_validate(small_dataset, ["tweets200", "co_listed"], cfg, n_jobs=1)
        parallel = cross_validate(small_dataset, ["tweets200", "co_listed"], cfg, n_jobs=2)
        assert serial.to_json_dict() == parallel.to_json_dict()

    def test_shapes_and_bounds(self, small_dataset):
        cfg = CVConfig(runs=2, k_values=(10, 20), rng_seed=0)
        report = cross_validate(
            small_dataset, ["tweets200", "co_listed", AGGREGATE], cfg
        )
        assert report.folds == choose_folds(20)
        assert report.n_evaluations == report.runs * report.folds
        assert report.criteria == ("tweets200", "co_listed", "aggregate")
        for c in report.criteria:
            for k in report.k_values:
                assert 0.0 <= report.mean_precision[c][k] <= 1.0
                assert 0.0 <= report.mean_recall[c][k] <= 1.0
        rho = report.spearman_matrix
        assert np.allclose(rho, rho.T)
        assert np.all(np.diag(rho) == 1.0)
        assert np.all(rho >= -1.0) and np.all(rho <= 1.0)

    def test_recall_non_decreasing_in_k(self, small_dataset):
        cfg = CVConfig(runs=2, k_values=(10, 20, 30), rng_seed=1)
        report = cross_validate(small_dataset, ["tweets200"], cfg)
        values = [report.mean_recall["tweets200"][k] for k in report.k_values]
        assert values == sorted(values)

    def test_single_criterion_medal_share(self, small_dataset):
        cfg = CVConfig(runs=2, k_values=(10, 20), rng_seed=2)
        report = cross_validate(small_dataset, ["co_listed"], cfg)
        assert report.medal_precision["co_listed"][0] == 100.0

    def test_planted_marker_criterion_wins(self, small_dataset):
        cfg = CVConfig(runs=3, k_values=(10,), rng_seed=5)
        report = cross_validate(small_dataset, ["tweets200", "followed_by"], cfg)
        assert (
            report.mean_precision["tweets200"][10]
            > report.mean_precision["followed_by"][10]
        )

    def test_aggregate_needs_two_criteria(self, small_dataset):
        with pytest.raises(ValueError, match="at least 2 criteria"):
            cross_validate(small_dataset, ["tweets200", AGGREGATE], CVConfig(runs=1))

    def test_report_serialization(self, small_dataset, tmp_path):
        cfg = CVConfig(runs=2, k_values=(10,), rng_seed=0)
        report = cross_validate(small_dataset, ["tweets200", "co_listed"], cfg, label="demo")
        report.write_json(tmp_path / "r.json")
        report.write_csv(tmp_path / "r.csv")
        report.write_long_csv(tmp_path / "r.long.csv")
        assert (tmp_path / "r.json").stat().st_size > 0
        long_lines = (tmp_path / "r.long.csv").read_text().splitlines()
        assert long_lines[0] == "dataset,criterion,k,metric,value"
        # one precision and one recall row per criterion and k
        assert len(long_lines) == 1 + 2 * 2 * 1


def test_cohesion_report(small_dataset):
    report = cohesion_report(
        small_dataset, ["tweets200", "followed_by"], randomizations=100, rng_seed=0
    )
    assert [e.criterion for e in report.entries] == ["tweets200", "followed_by"]
    planted, null = report.entries
    assert planted.corrected > null.corrected
    assert report.seed_count == 20


def test_cvconfig_validation():
    with pytest.raises(ValueError, match="runs"):
        CVConfig(runs=0)
    with pytest.raises(ValueError, match="every k"):
        CVConfig(k_values=(0,))
    assert CVConfig(k_values=(30, 10, 20, 10)).k_values == (10, 20, 30)
