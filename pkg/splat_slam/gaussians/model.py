# ---
# entity_id: module-gaussian-model
# entity_name: Gaussian Map Store
# entity_type_id: module
# entity_path: splat_slam/gaussians/model.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T11:00:00Z
# entity_exports: [GaussianMap, build_covariance, build_covariances, sigmoid, logit]
# entity_dependencies: [numpy, lie]
# entity_callers: [insertion, pruning, ply, rendering, optim, slam, datasets]
# entity_callees: [quaternion_to_matrix]
# entity_semver_impact: major
# entity_breaking_change_risk: high
# ---

"""
Structure-of-arrays store for the Gaussian map.

Provides:
- GaussianMap with unconstrained parameters (log-scale, quaternion,
  opacity logit, colour logit) plus origin keyframe and creation order
- Covariance construction Sigma_W = R diag(exp(s))^2 R^T
- Snapshots, content hashing and order-preserving compaction

Rows are always sorted by creation_order, which doubles as the stable
Gaussian id used by visibility sets and depth-sort tie breaks.
"""

from __future__ import annotations

import copy
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from splat_slam.geometry.lie import normalize_quaternions, quaternion_to_matrix

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]

# Sigma_W as a plain 3x3 array
CovarianceWorld = FloatArray

LOG_SCALE_MIN = math.log(1e-7)
LOG_SCALE_MAX = math.log(1e3)
COLOUR_EPS = 1e-3


def sigmoid(x: FloatArray) -> FloatArray:
    return 1.0 / (1.0 + np.exp(-x))


def logit(p: FloatArray | float) -> FloatArray:
    p = np.asarray(p, dtype=np.float64)
    return np.log(p) - np.log1p(-p)


def colour_to_logit(colour: FloatArray) -> FloatArray:
    """Logits of colours clipped away from 0 and 1."""
    return logit(np.clip(colour, COLOUR_EPS, 1.0 - COLOUR_EPS))


def build_covariances(log_scale: FloatArray, rotation_q: FloatArray) -> FloatArray:
    """Batched Sigma_W (N, 3, 3); quaternions are normalised first."""
    R = quaternion_to_matrix(normalize_quaternions(rotation_q))
    M = R * np.exp(log_scale)[:, None, :]
    return M @ np.transpose(M, (0, 2, 1))


def build_covariance(log_scale: FloatArray, q: FloatArray) -> CovarianceWorld:
    """Sigma_W = R(q) diag(exp(s))^2 R(q)^T for one Gaussian."""
    ls = np.asarray(log_scale, dtype=np.float64).reshape(1, 3)
    quat = np.asarray(q, dtype=np.float64).reshape(1, 4)
    return build_covariances(ls, quat)[0]


@dataclass(eq=False)
class GaussianMap:
    """All Gaussian parameters. Only the mapper writes to a live map."""

    mean_w: FloatArray = field(default_factory=lambda: np.zeros((0, 3)))
    log_scale: FloatArray = field(default_factory=lambda: np.zeros((0, 3)))
    rotation_q: FloatArray = field(default_factory=lambda: np.zeros((0, 4)))
    opacity_logit: FloatArray = field(default_factory=lambda: np.zeros(0))
    colour_logit: FloatArray = field(default_factory=lambda: np.zeros((0, 3)))
    origin_keyframe: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    creation_order: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    next_order: int = 0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    @classmethod
    def empty(cls, seed: int = 0) -> GaussianMap:
        return cls(rng=np.random.default_rng(seed))

    @property
    def count(self) -> int:
        return int(self.mean_w.shape[0])

    def __len__(self) -> int:
        return self.count

    @property
    def opacity(self) -> FloatArray:
        return sigmoid(self.opacity_logit)

    @property
    def colour(self) -> FloatArray:
        return sigmoid(self.colour_logit)

    @property
    def scale(self) -> FloatArray:
        return np.exp(self.log_scale)

    def covariances(self) -> FloatArray:
        return build_covariances(self.log_scale, self.rotation_q)

    def append(
        self,
        mean_w: FloatArray,
        log_scale: FloatArray,
        rotation_q: FloatArray,
        opacity_logit: FloatArray,
        colour_logit: FloatArray,
        origin_keyframe: int,
    ) -> range:
        """Append rows and return their index range."""
        n = int(np.asarray(mean_w).shape[0])
        start = self.count
        self.mean_w = np.concatenate([self.mean_w, np.asarray(mean_w, dtype=np.float64)])
        self.log_scale = np.concatenate(
            [self.log_scale, np.clip(log_scale, LOG_SCALE_MIN, LOG_SCALE_MAX)]
        )
        self.rotation_q = np.concatenate(
            [self.rotation_q, normalize_quaternions(np.asarray(rotation_q, dtype=np.float64))]
        )
        self.opacity_logit = np.concatenate(
            [self.opacity_logit, np.asarray(opacity_logit, dtype=np.float64).reshape(n)]
        )
        self.colour_logit = np.concatenate(
            [self.colour_logit, np.asarray(colour_logit, dtype=np.float64)]
        )
        self.origin_keyframe = np.concatenate(
            [self.origin_keyframe, np.full(n, origin_keyframe, dtype=np.int64)]
        )
        self.creation_order = np.concatenate(
            [self.creation_order, np.arange(self.next_order, self.next_order + n, dtype=np.int64)]
        )
        self.next_order += n
        return range(start, start + n)

    def compact(self, keep: NDArray[np.bool_]) -> int:
        """Drop rows where keep is False, preserving creation order. Returns removed count."""
        removed = int(self.count - np.count_nonzero(keep))
        if removed == 0:
            return 0
        self.mean_w = self.mean_w[keep]
        self.log_scale = self.log_scale[keep]
        self.rotation_q = self.rotation_q[keep]
        self.opacity_logit = self.opacity_logit[keep]
        self.colour_logit = self.colour_logit[keep]
        self.origin_keyframe = self.origin_keyframe[keep]
        self.creation_order = self.creation_order[keep]
        return removed

    def constrain(self) -> None:
        """Renormalise quaternions and clamp log-scales after an optimiser step."""
        self.rotation_q = normalize_quaternions(self.rotation_q)
        np.clip(self.log_scale, LOG_SCALE_MIN, LOG_SCALE_MAX, out=self.log_scale)

    def rows_for_ids(self, ids: IntArray) -> IntArray:
        """Row indices of the given creation_order ids (ids must be present)."""
        return np.searchsorted(self.creation_order, ids).astype(np.int64)

    def snapshot(self) -> GaussianMap:
        """Deep copy that never changes underneath a reader."""
        return copy.deepcopy(self)

    def content_hash(self) -> str:
        """SHA-256 over every parameter and bookkeeping array."""
        digest = hashlib.sha256()
        for array in (
            self.mean_w,
            self.log_scale,
            self.rotation_q,
            self.opacity_logit,
            self.colour_logit,
            self.origin_keyframe,
            self.creation_order,
        ):
            digest.update(np.ascontiguousarray(array).tobytes())
        digest.update(str(self.next_order).encode())
        return digest.hexdigest()
