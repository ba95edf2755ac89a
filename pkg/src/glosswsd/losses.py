"""Optimization objectives with values and exact input gradients.

Four objectives over pooled embeddings u, v (and anchor/positive/
negative for triplets):

* cosine: squared error between the label and cosine similarity,
  ``(y - cos(u, v))^2``.
* contrastive, standard form: with cosine distance d = 1 - cos(u, v),
  ``0.5 * y * d^2 + 0.5 * (1 - y) * max(0, margin - d)^2``; positives
  are pulled together, negatives pushed beyond the margin.
* contrastive, alternate form: label roles swapped and the hinge taken
  against the squared distance without re-squaring,
  ``0.5 * (1 - y) * d^2 + 0.5 * y * max(0, margin - d^2)``. Retained
  behind a flag for fidelity experiments; the standard form is the
  default because the alternate reading pulls negatives together.
* online contrastive: per batch, keep only hard examples (negatives
  closer than the farthest positive, positives farther than the
  nearest negative) and average the contrastive loss over them.
* triplet: squared euclidean hinge
  ``max(0, |a - p|^2 - |a - n|^2 + margin)``.

Hinge subgradients at the kink are 0. All functions are pure and safe
for concurrent evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatchError, ShapeMismatchError, ZeroVectorError

OBJECTIVES = ("cosine", "contrastive", "online_contrastive", "triplet")
CONTRASTIVE_FORMS = ("standard", "alternate")

DEFAULT_CONTRASTIVE_MARGIN = 0.5
DEFAULT_TRIPLET_MARGIN = 5.0


@dataclass(frozen=True)
class LossConfig:
    objective: str = "contrastive"
    margin: float | None = None
    contrastive_form: str = "standard"
    triplet_distance: str = "squared_euclidean"

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.contrastive_form not in CONTRASTIVE_FORMS:
            raise ValueError(f"unknown contrastive form {self.contrastive_form!r}")
        if self.triplet_distance != "squared_euclidean":
            raise ValueError(f"unknown triplet distance {self.triplet_distance!r}")
        if self.margin is not None and self.margin <= 0:
            raise ValueError("margin must be positive")

    @property
    def resolved_margin(self) -> float:
        if self.margin is not None:
            return self.margin
        if self.objective == "triplet":
            return DEFAULT_TRIPLET_MARGIN
        return DEFAULT_CONTRASTIVE_MARGIN


@dataclass
class BatchLoss:
    """Batch value (mean over the selected subset), per-example values
    over the whole batch, input gradients, and the selection mask."""

    value: float
    per_example: np.ndarray
    grads_u: np.ndarray
    grads_v: np.ndarray
    mask: np.ndarray


def _cosine_parts(u: np.ndarray, v: np.ndarray):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ShapeMismatchError(f"embedding shapes differ: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity of a zero vector")
    c = float(u @ v / (nu * nv))
    dc_du = v / (nu * nv) - c * u / nu**2
    dc_dv = u / (nu * nv) - c * v / nv**2
    return c, dc_du, dc_dv


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    return _cosine_parts(u, v)[0]


def cosine_loss(u: np.ndarray, v: np.ndarray, y: int):
    """Squared error between the label and cosine similarity."""
    c, dc_du, dc_dv = _cosine_parts(u, v)
    residual = y - c
    d_value = -2.0 * residual
    return residual * residual, d_value * dc_du, d_value * dc_dv


def _contrastive_element(d: float, y: int, margin: float, form: str):
    """Per-example contrastive value and its derivative w.r.t. d."""
    if form == "standard":
        if y == 1:
            return 0.5 * d * d, d
        hinge = margin - d
        if hinge > 0.0:
            return 0.5 * hinge * hinge, -hinge
        return 0.0, 0.0
    # alternate: published-formula reading with swapped label roles and
    # the margin applied to the squared distance
    if y == 0:
        return 0.5 * d * d, d
    hinge = margin - d * d
    if hinge > 0.0:
        return 0.5 * hinge, -d
    return 0.0, 0.0


def contrastive_loss(u: np.ndarray, v: np.ndarray, y: int, cfg: LossConfig | None = None):
    cfg = cfg or LossConfig(objective="contrastive")
    c, dc_du, dc_dv = _cosine_parts(u, v)
    value, d_value = _contrastive_element(
        1.0 - c, y, cfg.resolved_margin, cfg.contrastive_form
    )
    # d(distance)/du = -dc_du
    return value, -d_value * dc_du, -d_value * dc_dv


def online_contrastive_loss(us, vs, ys, cfg: LossConfig | None = None) -> BatchLoss:
    """Hard-example contrastive loss over a batch.

    With both classes present, selection keeps negatives with distance
    below the maximum positive distance and positives with distance
    above the minimum negative distance; a single-class batch falls
    back to plain contrastive over everything.
    """
    cfg = cfg or LossConfig(objective="online_contrastive")
    us = np.asarray(us, dtype=np.float64)
    vs = np.asarray(vs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.int_)
    if us.ndim != 2 or us.shape != vs.shape or ys.shape != (us.shape[0],):
        raise ShapeMismatchError("batch arrays must be (n, dim), (n, dim), (n,)")
    n = us.shape[0]
    if n == 0:
        raise EmptyBatchError("online contrastive loss over an empty batch")

    distances = np.empty(n)
    values = np.empty(n)
    d_values = np.empty(n)
    dc_dus = np.empty_like(us)
    dc_dvs = np.empty_like(vs)
    for i in range(n):
        c, dc_du, dc_dv = _cosine_parts(us[i], vs[i])
        distances[i] = 1.0 - c
        values[i], d_values[i] = _contrastive_element(
            distances[i], int(ys[i]), cfg.resolved_margin, cfg.contrastive_form
        )
        dc_dus[i] = dc_du
        dc_dvs[i] = dc_dv

    positive = ys == 1
    negative = ~positive
    if positive.any() and negative.any():
        pos_max = distances[positive].max()
        neg_min = distances[negative].min()
        mask = (positive & (distances > neg_min)) | (negative & (distances < pos_max))
    else:
        mask = np.ones(n, dtype=bool)

    grads_u = np.zeros_like(us)
    grads_v = np.zeros_like(vs)
    selected = int(mask.sum())
    if selected == 0:
        return BatchLoss(0.0, values, grads_u, grads_v, mask)
    scale = 1.0 / selected
    for i in np.flatnonzero(mask):
        grads_u[i] = -d_values[i] * dc_dus[i] * scale
        grads_v[i] = -d_values[i] * dc_dvs[i] * scale
    return BatchLoss(float(values[mask].mean()), values, grads_u, grads_v, mask)


def triplet_loss(anchor, positive, negative, cfg: LossConfig | None = None):
    """Squared-euclidean triplet hinge with subgradient 0 at the kink."""
    cfg = cfg or LossConfig(objective="triplet")
    a = np.asarray(anchor, dtype=np.float64)
    p = np.asarray(positive, dtype=np.float64)
    n = np.asarray(negative, dtype=np.float64)
    if not (a.shape == p.shape == n.shape):
        raise ShapeMismatchError("triplet embeddings must share one shape")
    ap = a - p
    an = a - n
    value = float(ap @ ap - an @ an) + cfg.resolved_margin
    if value <= 0.0:
        zero = np.zeros_like(a)
        return 0.0, zero, zero.copy(), zero.copy()
    return value, 2.0 * (n - p), -2.0 * ap, 2.0 * an
