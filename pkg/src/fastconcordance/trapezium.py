"""ROC construction and AUC by the trapezium rule (the binary-outcome baseline)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConcordanceEstimate, GroupedBinaryData, InputError, Method, timed


@dataclass(frozen=True)
class ROCCurve:
    """ROC vertices, one per distinct threshold, preceded by (0, 0).

    ``fp``/``tp`` are the integer counts behind ``fpr``/``tpr``.
    """

    fp: np.ndarray
    tp: np.ndarray
    n_neg: int
    n_pos: int

    @property
    def fpr(self) -> np.ndarray:
        return self.fp / self.n_neg

    @property
    def tpr(self) -> np.ndarray:
        return self.tp / self.n_pos

    def points(self) -> np.ndarray:
        return np.column_stack([self.fpr, self.tpr])

    def __len__(self) -> int:
        return int(self.fp.size)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.points(), delimiter=",", header="fpr,tpr", comments="", fmt="%.17g")


def roc_points(data: GroupedBinaryData) -> ROCCurve:
    scores = np.concatenate([data.group_a, data.group_b])
    pos = np.concatenate([np.zeros(data.group_a.size, np.int64), np.ones(data.group_b.size, np.int64)])
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    tp = np.cumsum(pos[order])
    fp = np.arange(1, s.size + 1) - tp
    # last index of each run of equal scores: ties become one diagonal step
    last = np.flatnonzero(np.diff(s) != 0)
    last = np.append(last, s.size - 1)
    return ROCCurve(
        fp=np.concatenate(([0], fp[last])),
        tp=np.concatenate(([0], tp[last])),
        n_neg=int(data.group_a.size),
        n_pos=int(data.group_b.size),
    )


def auc_trapezium(points) -> float:
    """Area under a ROC polyline: sum of (fpr_{k+1}-fpr_k)*(tpr_k+tpr_{k+1})/2.

    Accepts a :class:`ROCCurve` (computed from the integer counts) or an
    ``(m, 2)`` array of (fpr, tpr) vertices.
    """
    if isinstance(points, ROCCurve):
        dfp = np.diff(points.fp)
        num = int(np.dot(dfp, points.tp[1:] + points.tp[:-1]))
        return num / (2 * points.n_neg * points.n_pos)
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise InputError("ROC vertices must be an (m, 2) array with m >= 2")
    x, y = pts[:, 0], pts[:, 1]
    if not (np.allclose(pts[0], 0.0) and np.allclose(pts[-1], 1.0)):
        raise InputError("ROC vertices must start at (0, 0) and end at (1, 1)")
    if np.any(np.diff(x) < 0) or np.any(np.diff(y) < 0):
        raise InputError("ROC vertices must be non-decreasing in both coordinates")
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


@timed
def trapezium_auc(data: GroupedBinaryData) -> ConcordanceEstimate:
    """AUC as a :class:`ConcordanceEstimate`; prediction ties count one half."""
    roc = roc_points(data)
    auc = auc_trapezium(roc)
    return ConcordanceEstimate(
        c_hat=auc,
        concordant_mass=auc,
        discordant_mass=1.0 - auc,
        method=Method.TRAPEZIUM,
        ties="half",
        diagnostics={"n_vertices": len(roc)},
    )
