import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import expected_ap_over_tie_orders, pair_count_auc, staircase_ap
from qsarbench.errors import SchemaError, UndefinedMetricError
from qsarbench.metrics import (
    MetricRecord,
    class_precision_recall,
    classification_records,
    pr_auc,
    prevalence_enrichment,
    read_records,
    regression_metrics,
    regression_records,
    roc_auc,
    write_records,
)


def test_roc_example():
    assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert pair_count_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_roc_edges():
    assert roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert roc_auc([0.5] * 6, [0, 1, 0, 1, 1, 0]) == 0.5


def test_roc_single_class_undefined():
    with pytest.raises(UndefinedMetricError):
        roc_auc([0.1, 0.2], [1, 1])


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 8), st.integers(0, 1)), min_size=2, max_size=40).filter(
        lambda v: 0 < sum(y for _, y in v) < len(v)
    )
)
def test_roc_matches_pair_counting(rows):
    s = [a / 8 for a, _ in rows]
    y = [b for _, b in rows]
    assert roc_auc(s, y) == pytest.approx(pair_count_auc(s, y), abs=1e-12)


def test_pr_example():
    v = pr_auc([0.8, 0.4, 0.35, 0.1], [1, 0, 1, 0])
    assert v == pytest.approx(0.5 * 1.0 + 0.5 * 2 / 3)


def test_pr_perfect():
    assert pr_auc([0.9, 0.8, 0.1, 0.0], [1, 1, 0, 0]) == 1.0


def test_pr_no_positives_undefined():
    with pytest.raises(UndefinedMetricError):
        pr_auc([0.1, 0.2], [0, 0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=30).filter(any), st.randoms(use_true_random=False))
def test_pr_matches_staircase_without_ties(labels, rng):
    scores = rng.sample(range(1000), len(labels))
    y = [int(v) for v in labels]
    assert pr_auc(scores, y) == pytest.approx(staircase_ap(scores, y), abs=1e-12)


@pytest.mark.parametrize(
    "scores,labels",
    [
        ([0.5, 0.5, 0.5, 0.1], [1, 0, 1, 0]),
        ([0.9, 0.5, 0.5, 0.5, 0.5, 0.2], [0, 1, 0, 0, 1, 1]),
        ([0.3] * 5, [1, 0, 0, 1, 0]),
        ([1, 1, 0, 0, 0], [0, 1, 1, 0, 1]),
    ],
)
def test_pr_ties_are_expectation_over_orders(scores, labels):
    assert pr_auc(scores, labels) == pytest.approx(expected_ap_over_tie_orders(scores, labels), abs=1e-12)


def test_pr_all_tied_equals_prevalence_in_expectation():
    labels = [1, 0, 0, 0, 1, 0, 0, 0, 0, 0]
    # all orderings equally likely; expected AP is not exactly the prevalence but close to it
    v = pr_auc([0.0] * 10, labels)
    assert v == pytest.approx(expected_ap_over_tie_orders([0.0] * 10, labels), abs=1e-12)


def test_class_pr_perfect():
    c = class_precision_recall([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0])
    assert (c.p0, c.r0, c.p1, c.r1) == (1, 1, 1, 1) and c.undefined == ()


def test_class_pr_all_negative_predictions():
    c = class_precision_recall([0.1, 0.2, 0.3], [1, 0, 1])
    assert c.r1 == 0 and "p1" in c.undefined


def test_class_pr_hand_count():
    c = class_precision_recall([0.9, 0.6, 0.4, 0.1], [1, 0, 1, 0])
    assert (c.p1, c.r1, c.p0, c.r0) == (0.5, 0.5, 0.5, 0.5)


def test_threshold_inclusive():
    assert class_precision_recall([0.5], [1]).r1 == 1.0


def test_regression_identities():
    t = np.array([-1.0, 0.5, 0.5, 2.0, -2.0])
    assert regression_metrics(t, t).mae == 0 and regression_metrics(t, t).pearson == pytest.approx(1.0)
    assert regression_metrics(-t, t).pearson == pytest.approx(-1.0)
    r = regression_metrics(t + 5, t)
    assert r.mae == pytest.approx(5.0) and r.pearson == pytest.approx(1.0)


def test_constant_prediction_pearson_undefined():
    assert regression_metrics([1.0, 1.0, 1.0], [0.0, 1.0, 2.0]).pearson is None
    recs = regression_records("t", "m", "ML", 0, [1.0, 1.0, 1.0], [0.0, 1.0, 2.0])
    assert math.isnan(recs[1].value) and "undefined" in recs[1].flags


def naive_pearson(a, b):
    n = len(a)
    ma, mb = sum(a) / n, sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_regression_matches_naive(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=50), rng.normal(size=50)
    r = regression_metrics(a, b)
    assert abs(r.mae - sum(abs(x - y) for x, y in zip(a, b)) / 50) <= 1e-12
    assert abs(r.pearson - naive_pearson(list(a), list(b))) <= 1e-12


def test_enrichment():
    assert prevalence_enrichment(0.169, [1] * 169 + [0] * 831) == pytest.approx(1.0)
    assert prevalence_enrichment(0.2, [1] + [0] * 9) == pytest.approx(2.0)
    labels = [1] * 3 + [0] * 27
    assert prevalence_enrichment(pr_auc(list(range(30, 0, -1)), labels), labels) == pytest.approx(10.0)


def test_classification_records_keep_undefined():
    recs = classification_records("t", "m", "ML", 2, [0.2, 0.4], [0, 0])
    by = {r.metric: r for r in recs}
    assert math.isnan(by["pr_auc"].value) and "undefined" in by["pr_auc"].flags
    assert "zero_division" in by["r1"].flags
    assert {r.fold for r in recs} == {"2"}


def test_record_csv_round_trip(tmp_path):
    recs = classification_records("t", "m", "ML", 0, [0.1, 0.9, 0.4], [0, 1, 1])
    write_records(tmp_path / "m.csv", recs)
    back = read_records(tmp_path / "m.csv")
    assert sorted(back, key=lambda r: r.metric) == sorted(recs, key=lambda r: r.metric)


def test_read_records_schema(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("task,model,metric,value\nt,m,roc_auc,0.5\n")
    with pytest.raises(SchemaError):
        read_records(p)
    p.write_text("task,model,family,fold,metric,value\nt,m,ML,0,roc_auc,high\n")
    with pytest.raises(SchemaError):
        read_records(p)


def test_metric_record_is_hashable():
    assert len({MetricRecord("t", "m", "ML", "0", "mae", 1.0)} | {MetricRecord("t", "m", "ML", "0", "mae", 1.0)}) == 1
