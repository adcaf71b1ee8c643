import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastconcordance.core import GroupedBinaryData, InputError
from fastconcordance.exact import exact_discrete_rank
from fastconcordance.trapezium import ROCCurve, auc_trapezium, roc_points, trapezium_auc

scores = st.lists(st.integers(0, 8).map(lambda v: v / 8), min_size=1, max_size=40)


@given(scores, scores)
def test_auc_equals_half_ties_concordance(a, b):
    data = GroupedBinaryData(a, b)
    auc = trapezium_auc(data).c_hat
    assert abs(auc - exact_discrete_rank(data, ties="half").c_hat) <= 1e-12


def test_roc_curve_shape():
    curve = roc_points(GroupedBinaryData([0.1, 0.4], [0.35, 0.8]))
    assert isinstance(curve, ROCCurve)
    assert curve.points()[0].tolist() == [0.0, 0.0]
    assert curve.points()[-1].tolist() == [1.0, 1.0]
    assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)
    assert trapezium_auc(GroupedBinaryData([0.1, 0.4], [0.35, 0.8])).c_hat == 0.75


def test_tied_scores_give_diagonal_step():
    curve = roc_points(GroupedBinaryData([0.5], [0.5]))
    assert curve.points().tolist() == [[0.0, 0.0], [1.0, 1.0]]
    assert auc_trapezium(curve) == 0.5


def test_roc_csv(tmp_path):
    curve = roc_points(GroupedBinaryData([0.1, 0.2], [0.3]))
    curve.to_csv(tmp_path / "roc.csv")
    lines = (tmp_path / "roc.csv").read_text().splitlines()
    assert lines[0] == "fpr,tpr"
    assert len(lines) == 1 + len(curve.fpr)


def test_auc_from_raw_points():
    assert auc_trapezium(np.array([[0, 0], [0.5, 1], [1, 1]])) == pytest.approx(0.75)
    with pytest.raises(InputError):
        auc_trapezium(np.array([[0, 0], [1, 0.5]]))
    with pytest.raises(InputError):
        auc_trapezium(np.array([[0, 0], [0.6, 0.5], [0.4, 0.7], [1, 1]]))
