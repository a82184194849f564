#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import heapq
import logging
import math

import numpy as np
import pandas as pd

from ..dataset import normalize_sensors
from ..exceptions import DegenerateInputError, InvalidInputError

logger = logging.getLogger("sensorimotor.analysis")

DEFAULT_LEAFSIZE = 16


def _squared_distances(points, query):
    diff = points - query
    return (diff * diff).sum(axis=1)


class SpatialIndex(object):
    """
    Balanced KD-tree over an immutable ``N x D`` point table supporting exact
    k-nearest-neighbor queries.

    Splits happen at the median of the widest dimension; leaves hold at most
    ``leafsize`` points. Results are ordered by distance with ties broken by
    the lower point index, so they match a linear scan exactly.

    :arg points: ``N x D`` array-like of finite coordinates
    :arg leafsize: maximum points per leaf (default 16)
    """

    def __init__(self, points, leafsize=DEFAULT_LEAFSIZE):
        try:
            data = np.array(points, dtype=float)
        except (TypeError, ValueError):
            raise InvalidInputError("points must all have the same dimension")
        if data.ndim != 2 or len(data) == 0 or data.shape[1] == 0:
            raise InvalidInputError("need a non-empty N x D point table, got shape %r" % (data.shape,))
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("points must be finite")
        data.setflags(write=False)

        self.points = data
        self.size, self.dimension = data.shape
        self.leafsize = max(int(leafsize), 1)
        self._order = np.arange(self.size)
        # node: (lo, hi, axis, split, left, right); leaves have axis == -1
        self._nodes = []
        self._root = self._build(0, self.size)
        self._sorted = data[self._order]

    def __repr__(self):
        return "<SpatialIndex: %d points, %d-D>" % (self.size, self.dimension)

    def __len__(self):
        return self.size

    def _build(self, lo, hi):
        node_id = len(self._nodes)
        self._nodes.append(None)
        if hi - lo <= self.leafsize:
            self._nodes[node_id] = (lo, hi, -1, 0.0, -1, -1)
            return node_id

        idx = self._order[lo:hi]
        block = self.points[idx]
        spread = block.max(axis=0) - block.min(axis=0)
        axis = int(np.argmax(spread))
        if spread[axis] == 0:
            # all points identical, nothing to split on
            self._nodes[node_id] = (lo, hi, -1, 0.0, -1, -1)
            return node_id

        mid = (hi - lo) // 2
        part = np.argpartition(block[:, axis], mid, kind="introselect")
        self._order[lo:hi] = idx[part]
        split = float(self.points[self._order[lo + mid], axis])
        left = self._build(lo, lo + mid)
        right = self._build(lo + mid, hi)
        self._nodes[node_id] = (lo, hi, axis, split, left, right)
        return node_id

    def knn(self, query, k):
        """
        The ``k`` nearest points to ``query`` as ``(index, distance)`` pairs,
        ascending by distance, ties by index.
        """
        query = np.asarray(query, dtype=float).reshape(-1)
        if query.shape[0] != self.dimension:
            raise InvalidInputError(
                "query has dimension %d, index has %d" % (query.shape[0], self.dimension)
            )
        if not np.all(np.isfinite(query)):
            raise InvalidInputError("query must be finite")
        if int(k) != k or not 1 <= k <= self.size:
            raise InvalidInputError("k must be in [1, %d], got %r" % (self.size, k))

        # max-heap of the best k as (-d2, -index)
        heap = []
        self._search(self._root, query, int(k), heap)
        best = sorted((-d2, -i) for d2, i in heap)
        return [(int(i), math.sqrt(d2)) for d2, i in best]

    def _search(self, node_id, query, k, heap):
        lo, hi, axis, split, left, right = self._nodes[node_id]
        if axis < 0:
            d2 = _squared_distances(self._sorted[lo:hi], query)
            for offset in np.argsort(d2, kind="stable"):
                candidate = (float(d2[offset]), int(self._order[lo + offset]))
                if len(heap) < k:
                    heapq.heappush(heap, (-candidate[0], -candidate[1]))
                elif candidate < (-heap[0][0], -heap[0][1]):
                    heapq.heapreplace(heap, (-candidate[0], -candidate[1]))
                elif candidate[0] > -heap[0][0]:
                    break
            return

        diff = query[axis] - split
        near, far = (left, right) if diff < 0 else (right, left)
        self._search(near, query, k, heap)
        if len(heap) < k or diff * diff <= -heap[0][0]:
            self._search(far, query, k, heap)


def build_index(points, leafsize=DEFAULT_LEAFSIZE):
    """ Build a :class:`SpatialIndex` over ``points``. """
    return SpatialIndex(points, leafsize)


def knn(index, query, k):
    """ Exact ``k`` nearest neighbors of ``query`` in ``index``. """
    return index.knn(query, k)


class LocalityReport(object):
    """
    Outcome of :func:`locality_ratio`.

    ``anchors`` are record indices; ``neighbor_means`` the mean physical
    distance (m) from each anchor to its sensor-space neighbors; ``baseline``
    the mean physical distance of random record pairs; ``ratio`` their
    quotient (0 perfect locality, about 1 no spatial information).
    """

    def __init__(self, anchors, neighbor_means, baseline, anchor_xy, neighbor_xy, k):
        self.anchors = np.asarray(anchors)
        self.neighbor_means = np.asarray(neighbor_means, dtype=float)
        self.baseline = float(baseline)
        self.ratio = float(self.neighbor_means.mean() / self.baseline)
        self.anchor_xy = anchor_xy
        self.neighbor_xy = neighbor_xy
        self.k = k

    def __repr__(self):
        return "<LocalityReport: ratio %.4f over %d anchors>" % (self.ratio, len(self.anchors))

    def as_dict(self):
        return {
            "k": self.k,
            "anchors": self.anchors,
            "neighbor_means": self.neighbor_means,
            "mean_neighbor_distance": float(self.neighbor_means.mean()),
            "baseline": self.baseline,
            "ratio": self.ratio,
        }

    def pairs(self):
        """ ``(anchor, anchor_x, anchor_y, neighbor_x, neighbor_y)`` rows. """
        k = self.neighbor_xy.shape[1]
        return pd.DataFrame(
            {
                "anchor": np.repeat(self.anchors, k),
                "anchor_x": np.repeat(self.anchor_xy[:, 0], k),
                "anchor_y": np.repeat(self.anchor_xy[:, 1], k),
                "neighbor_x": self.neighbor_xy[:, :, 0].reshape(-1),
                "neighbor_y": self.neighbor_xy[:, :, 1].reshape(-1),
            }
        )


def locality_ratio(dataset, k=10, n_anchors=200, rng=None):
    """
    How well sensor-space neighborhoods stay together in physical space.

    Anchors are sampled uniformly without replacement (over records sorted by
    index). For each, its ``k`` nearest records in min-max normalized sensor
    space (the anchor itself excluded) are found and their mean physical
    distance to the anchor's end position taken. The baseline is the mean
    physical distance of ``n_anchors * k`` random record pairs drawn from the
    same ``rng``.

    :arg dataset: :class:`~sensorimotor.dataset.Dataset`
    :arg k: neighbors per anchor (default 10)
    :arg n_anchors: number of anchors (default 200)
    :arg rng: ``numpy.random.Generator``
    """
    if rng is None:
        raise InvalidInputError("locality_ratio needs a seeded rng")
    if int(k) != k or k < 1:
        raise InvalidInputError("k must be >= 1, got %r" % (k,))
    n = len(dataset)
    if n <= k:
        raise InvalidInputError("dataset of %d records is too small for k=%d" % (n, k))
    if int(n_anchors) != n_anchors or not 1 <= n_anchors <= n:
        raise InvalidInputError("n_anchors must be in [1, %d], got %r" % (n, n_anchors))

    dataset = dataset.sorted_by_index()
    sensors, _, _ = normalize_sensors(dataset)
    positions = dataset.ends
    index = build_index(sensors)

    anchors = rng.choice(n, size=int(n_anchors), replace=False)
    neighbor_positions = np.empty((len(anchors), k), dtype=np.int64)
    for row, anchor in enumerate(anchors):
        found = [i for i, _ in index.knn(sensors[anchor], k + 1) if i != anchor][:k]
        neighbor_positions[row] = found

    anchor_xy = positions[anchors]
    neighbor_xy = positions[neighbor_positions]
    means = np.sqrt(((neighbor_xy - anchor_xy[:, None, :]) ** 2).sum(axis=2)).mean(axis=1)

    m = len(anchors) * k
    first = rng.integers(0, n, size=m)
    second = (first + rng.integers(1, n, size=m)) % n
    baseline = np.sqrt(((positions[first] - positions[second]) ** 2).sum(axis=1)).mean()
    if not baseline > 0:
        raise DegenerateInputError("all records share one position, baseline is 0")

    report = LocalityReport(dataset.index[anchors], means, baseline, anchor_xy, neighbor_xy, k)
    logger.info("Locality ratio %.4f (k=%d, %d anchors)", report.ratio, k, len(anchors))
    return report
