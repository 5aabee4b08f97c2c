from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synthaudit import (
    AttributeSchema,
    DataError,
    Dataset,
    Kind,
    Role,
    attribute_coverage,
    boundary_adherence,
    category_coverage,
    compute_utility,
    range_coverage,
    statistic_similarity,
)

arr = np.asarray


class TestBoundaryAdherence:
    def test_identity(self):
        col = arr([3.0, 7.0, 9.0])
        assert boundary_adherence(col, col) == 1.0

    def test_half_inside(self):
        real = arr([20.0, 80.0])
        assert boundary_adherence(real, arr([10.0, 50.0, 90.0, 30.0])) == 0.5

    def test_all_below(self):
        assert boundary_adherence(arr([20.0, 80.0]), arr([1.0, 5.0])) == 0.0

    def test_empty_synth_rejected(self):
        with pytest.raises(DataError):
            boundary_adherence(arr([1.0]), arr([]))

    def test_permutation_invariant(self):
        rng = np.random.default_rng(0)
        real = rng.normal(0, 1, 30)
        synth = rng.normal(0, 2, 40)
        base = boundary_adherence(real, synth)
        assert boundary_adherence(rng.permutation(real), rng.permutation(synth)) == base


class TestCategoryCoverage:
    def test_identity(self):
        col = arr(["A", "B", "A"], dtype=object)
        assert category_coverage(col, col) == 1.0

    def test_half_covered(self):
        real = arr(["A", "B", "C", "D"], dtype=object)
        synth = arr(["A", "B", "B"], dtype=object)
        assert category_coverage(real, synth) == 0.5

    def test_disjoint(self):
        assert category_coverage(arr(["A"], dtype=object), arr(["Z"], dtype=object)) == 0.0

    def test_extra_synth_categories_do_not_help(self):
        real = arr(["A", "B"], dtype=object)
        synth = arr(["A", "B", "C", "D"], dtype=object)
        assert category_coverage(real, synth) == 1.0


class TestRangeCoverage:
    def test_superset_range(self):
        assert range_coverage(arr([10.0, 20.0]), arr([5.0, 25.0])) == 1.0

    def test_lower_deficit(self):
        assert range_coverage(arr([0.0, 100.0]), arr([25.0, 100.0])) == pytest.approx(0.75, abs=1e-12)

    def test_both_deficits(self):
        assert range_coverage(arr([0.0, 100.0]), arr([60.0, 70.0])) == pytest.approx(0.1, abs=1e-12)

    def test_clipped_at_zero(self):
        assert range_coverage(arr([0.0, 100.0]), arr([200.0, 300.0])) == 0.0

    def test_constant_real_column(self):
        assert range_coverage(arr([5.0, 5.0]), arr([1.0, 5.0])) == 1.0
        assert range_coverage(arr([5.0, 5.0]), arr([1.0, 2.0])) == 0.0

    def test_widening_synth_range_is_monotone(self):
        real = arr([0.0, 100.0])
        scores = [
            range_coverage(real, arr([lo, hi]))
            for lo, hi in [(45.0, 55.0), (30.0, 60.0), (10.0, 90.0), (0.0, 100.0), (-5.0, 120.0)]
        ]
        assert all(a <= b for a, b in zip(scores, scores[1:]))


class TestStatisticSimilarity:
    def test_identity(self):
        col = arr([1.0, 2.0, 9.0])
        assert statistic_similarity(col, col) == 1.0

    def test_median_shift(self):
        real = arr([0.0, 50.0, 100.0])
        synth = arr([0.0, 40.0, 100.0])
        assert statistic_similarity(real, synth) == pytest.approx(0.9, abs=1e-12)

    def test_clipped_when_displaced_beyond_range(self):
        real = arr([0.0, 50.0, 100.0])
        assert statistic_similarity(real, arr([500.0, 600.0, 700.0])) == 0.0

    def test_constant_real_column(self):
        assert statistic_similarity(arr([5.0, 5.0]), arr([5.0, 5.0])) == 1.0
        assert statistic_similarity(arr([5.0, 5.0]), arr([6.0])) == 0.0


def test_attribute_coverage_dispatch():
    real_num, synth_num = arr([0.0, 100.0]), arr([25.0, 100.0])
    assert attribute_coverage(real_num, synth_num, Kind.NUMERICAL) == pytest.approx(0.75)
    real_cat = arr(["A", "B", "C", "D"], dtype=object)
    synth_cat = arr(["A", "B"], dtype=object)
    assert attribute_coverage(real_cat, synth_cat, Kind.CATEGORICAL) == 0.5


@given(
    real=st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30).filter(
        lambda v: max(v) > min(v)
    ),
    synth=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30),
)
def test_numeric_metrics_stay_in_unit_interval(real, synth):
    r, s = arr(real), arr(synth)
    assert 0.0 <= boundary_adherence(r, s) <= 1.0
    assert 0.0 <= range_coverage(r, s) <= 1.0
    assert 0.0 <= statistic_similarity(r, s) <= 1.0


class TestComputeUtility:
    def test_identity_scores_one_everywhere(self, toy_dataset):
        report = compute_utility(toy_dataset, toy_dataset)
        for scores in report.per_attribute.values():
            assert all(v == 1.0 for v in scores.values())
        for agg in report.aggregate.values():
            assert agg["mean"] == 1.0
            assert agg["median"] == 1.0

    def test_metric_applicability(self, toy_dataset):
        report = compute_utility(toy_dataset, toy_dataset)
        numeric = report.per_attribute["age"]
        categorical = report.per_attribute["home"]
        assert {"BoundaryAdherence", "RangeCoverage", "StatisticSimilarity", "AttributeCoverage"} == set(numeric)
        assert {"CategoryCoverage", "AttributeCoverage"} == set(categorical)

    def test_aggregate_is_mean_over_applicable_attributes(self, toy_schema, toy_dataset):
        synth = Dataset.from_columns(
            toy_schema,
            {
                "age": [25, 30, 35, 40, 90],
                "income": [30000, 35000, 40000, 45000, 500000],
                "home": ["RENT", "RENT", "RENT", "RENT", "RENT"],  # 1 of 3 categories
                "intent": ["PERSONAL", "MEDICAL", "PERSONAL", "VENTURE", "PERSONAL"],
                "amount": [1000, 2000, 1500, 3000, 25000],
            },
        )
        report = compute_utility(toy_dataset, synth)
        scores = [report.per_attribute[a]["CategoryCoverage"] for a in ("home", "intent")]
        assert report.aggregate["CategoryCoverage"]["mean"] == pytest.approx(sum(scores) / 2)

    def test_schema_mismatch_rejected(self, toy_dataset):
        other = Dataset.from_columns(
            (AttributeSchema("age", Kind.NUMERICAL, Role.QI),), {"age": [1.0]}
        )
        with pytest.raises(DataError):
            compute_utility(toy_dataset, other)

    def test_permuted_synthetic_still_scores_one(self, toy_schema, toy_dataset):
        perm = [4, 2, 0, 3, 1]
        synth = Dataset.from_columns(
            toy_schema,
            {name: [toy_dataset.column(name)[i] for i in perm] for name in toy_dataset.columns},
        )
        report = compute_utility(toy_dataset, synth)
        for scores in report.per_attribute.values():
            assert all(v == 1.0 for v in scores.values())
