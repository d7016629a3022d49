"""Semi-supervised path: pinned rows, holdout, and the k = 0 collapse."""

import numpy as np
import pytest

from hyperfa import classify, datasim, mghfa
from hyperfa.rng import substream


def make_problem(seed=11, p=4, G=2, n_per=70):
    design = datasim.SimDesign("gaussian", p=p, G=G, n_per_component=n_per, seed=seed)
    return datasim.generate(design)


def test_partial_labels_validation():
    with pytest.raises(ValueError, match="vector"):
        classify.PartialLabels(np.zeros((3, 2), dtype=int))
    with pytest.raises(ValueError, match=">= 0"):
        classify.PartialLabels(np.array([1, -1, 2]))
    pl = classify.PartialLabels(np.array([0, 2, 1, 0, 2]))
    assert pl.k == 3
    assert pl.declared_classes().tolist() == [1, 2]


def test_hold_out_unlabel_bounds_and_determinism():
    labels = np.repeat([1, 2, 3], 50)
    with pytest.raises(ValueError):
        classify.hold_out_unlabel(labels, 0.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        classify.hold_out_unlabel(labels, 1.0, np.random.default_rng(0))
    a = classify.hold_out_unlabel(labels, 0.3, substream(5, "holdout"))
    b = classify.hold_out_unlabel(labels, 0.3, substream(5, "holdout"))
    assert np.array_equal(a.labels, b.labels)
    # unlabelling only ever moves labels to 0
    touched = a.labels != labels
    assert np.all(a.labels[touched] == classify.UNLABELLED)
    assert 0 < a.k < labels.shape[0]


def test_no_labels_collapses_to_clustering():
    x, _ = make_problem(seed=21)
    config = mghfa.FitConfig(max_iter=40, seed=9)
    plain = mghfa.fit(x, 2, 1, config)
    viaclassify = classify.fit_classify(
        x, np.zeros(x.shape[0], dtype=int), 2, 1, config
    )
    assert viaclassify.loglik == plain.loglik
    assert np.array_equal(viaclassify.labels, plain.labels)
    np.testing.assert_array_equal(viaclassify.zhat, plain.zhat)


def test_labelled_rows_keep_their_class():
    x, truth = make_problem(seed=31)
    held = classify.hold_out_unlabel(truth.labels, 0.4, substream(7, "holdout"))
    report = classify.fit_classify(x, held, 2, 1, mghfa.FitConfig(max_iter=60, seed=1))
    known = held.labels > 0
    assert np.array_equal(report.labels[known], held.labels[known])
    # pinned rows carry indicator responsibilities
    rows = np.flatnonzero(known)[:10]
    for i in rows:
        assert report.zhat[i, held.labels[i] - 1] == 1.0


def test_predictions_on_easy_data():
    x, truth = make_problem(seed=41, n_per=90)
    held = classify.hold_out_unlabel(truth.labels, 0.3, substream(13, "holdout"))
    report = classify.fit_classify(x, held, 2, 1, mghfa.FitConfig(max_iter=80, seed=2))
    free = held.labels == classify.UNLABELLED
    assert free.sum() > 20
    # components are anchored to the classes, so labels compare directly
    assert datasim.ari(truth.labels[free], report.labels[free]) == 1.0


def test_missing_class_rejected():
    x, truth = make_problem(seed=51)
    labels = np.array(truth.labels, copy=True)
    labels[labels == 2] = classify.UNLABELLED
    with pytest.raises(ValueError, match=r"classes without a single labelled row: \[2\]"):
        classify.fit_classify(x, labels, 2, 1, mghfa.FitConfig(max_iter=20))


def test_label_above_g_rejected():
    x, truth = make_problem(seed=61)
    labels = np.array(truth.labels, copy=True)
    labels[0] = 5
    with pytest.raises(ValueError, match="above G"):
        classify.fit_classify(x, labels, 2, 1, mghfa.FitConfig(max_iter=20))


def test_length_mismatch_rejected():
    x, truth = make_problem(seed=71)
    with pytest.raises(ValueError, match="length"):
        classify.fit_classify(x, truth.labels[:-3], 2, 1, mghfa.FitConfig(max_iter=20))


def test_classify_deterministic():
    x, truth = make_problem(seed=81)
    held = classify.hold_out_unlabel(truth.labels, 0.25, substream(3, "holdout"))
    config = mghfa.FitConfig(max_iter=40, seed=4)
    r1 = classify.fit_classify(x, held, 2, 1, config)
    r2 = classify.fit_classify(x, held, 2, 1, config)
    assert r1.loglik == r2.loglik
    assert np.array_equal(r1.labels, r2.labels)
    np.testing.assert_array_equal(r1.zhat, r2.zhat)
