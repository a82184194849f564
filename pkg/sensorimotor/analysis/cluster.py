#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import logging

import numpy as np
import pandas as pd

from ..exceptions import InvalidInputError
from ..sim import WALLS

logger = logging.getLogger("sensorimotor.analysis")

DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-6


def _squared_distances(matrix, centroids):
    out = np.empty((len(matrix), len(centroids)))
    for j, c in enumerate(centroids):
        diff = matrix - c
        out[:, j] = (diff * diff).sum(axis=1)
    return out


def _assign(matrix, centroids):
    d2 = _squared_distances(matrix, centroids)
    # argmin takes the first minimum, i.e. the lower centroid id on ties
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(matrix)), labels]


class ClusterModel(object):
    """
    Result of :func:`kmeans`.

    :arg centroids: ``k x D`` centroid table
    :arg assignments: cluster id per row of the clustered matrix
    :arg inertia: sum of squared distances to the assigned centroids
    :arg history: inertia after every Lloyd iteration of the winning run
    """

    def __init__(self, centroids, assignments, inertia, history=(), n_iter=0):
        self.centroids = centroids
        self.assignments = assignments
        self.inertia = float(inertia)
        self.history = list(history)
        self.n_iter = n_iter

    def __repr__(self):
        return "<ClusterModel: k=%d, inertia %.6g>" % (self.k, self.inertia)

    @property
    def k(self):
        return len(self.centroids)

    def sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def _kmeans_plus_plus(matrix, k, rng):
    n = len(matrix)
    chosen = [int(rng.integers(n))]
    closest = _squared_distances(matrix, matrix[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            pick = int(rng.choice(n, p=closest / total))
        else:
            pick = int(rng.integers(n))
        chosen.append(pick)
        closest = np.minimum(closest, _squared_distances(matrix, matrix[[pick]]).ravel())
    return matrix[chosen].copy()


def _lloyd(matrix, centroids, max_iter, tol):
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, d2 = _assign(matrix, centroids)
        history.append(float(d2.sum()))
        updated = np.empty_like(centroids)
        for j in range(len(centroids)):
            members = labels == j
            if members.any():
                updated[j] = matrix[members].mean(axis=0)
            else:
                # reseed an empty cluster on the point farthest from its centroid
                far = int(np.argmax(d2))
                logger.warning("Empty cluster %d reseeded on row %d", j, far)
                updated[j] = matrix[far]
                d2[far] = 0.0
        shift = np.sqrt(((updated - centroids) ** 2).sum(axis=1)).max()
        centroids = updated
        if shift < tol:
            break
    labels, d2 = _assign(matrix, centroids)
    return ClusterModel(centroids, labels, d2.sum(), history, n_iter)


def kmeans(
    matrix,
    k,
    seed,
    restarts=DEFAULT_RESTARTS,
    max_iter=DEFAULT_MAX_ITER,
    tol=DEFAULT_TOL,
):
    """
    Best of ``restarts`` Lloyd runs with k-means++ seeding.

    Every run iterates until no centroid moves by ``tol`` or more, or
    ``max_iter`` iterations. The run with the lowest inertia wins (the first
    one on ties). Deterministic for a given ``seed`` and row order.

    :arg matrix: ``N x D`` array (normalized sensor vectors)
    :arg k: number of clusters, ``1 <= k <= N``
    :arg seed: integer seed of the k-means++ draws
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or not np.all(np.isfinite(matrix)):
        raise InvalidInputError("kmeans needs a finite N x D matrix")
    if int(k) != k or not 1 <= k <= len(matrix):
        raise InvalidInputError("k must be in [1, %d], got %r" % (len(matrix), k))
    if int(restarts) != restarts or restarts < 1:
        raise InvalidInputError("restarts must be >= 1, got %r" % (restarts,))

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(int(restarts)):
        model = _lloyd(matrix, _kmeans_plus_plus(matrix, int(k), rng), int(max_iter), tol)
        if best is None or model.inertia < best.inertia:
            best = model
    logger.debug("kmeans k=%d: inertia %.6g", k, best.inertia)
    return best


class ElbowCurve(object):
    """ Best inertia per ``k`` and the ``k`` picked at the elbow. """

    def __init__(self, ks, inertias, selected, distances):
        self.ks = list(ks)
        self.inertias = list(inertias)
        self.selected = selected
        self.distances = list(distances)

    def __repr__(self):
        return "<ElbowCurve: k in %s, selected %d>" % (self.ks, self.selected)

    def to_frame(self):
        return pd.DataFrame(
            {"k": self.ks, "inertia": self.inertias, "chord_distance": self.distances}
        )


def elbow_point(ks, inertias):
    """
    Index of the point farthest from the chord joining the first and last
    points of the curve, both axes min-max scaled. Ties go to the smaller
    ``k``.
    """
    x = np.asarray(ks, dtype=float)
    y = np.asarray(inertias, dtype=float)
    if len(x) == 1:
        return 0, np.zeros(1)
    x = (x - x.min()) / (x.max() - x.min())
    span = y.max() - y.min()
    y = (y - y.min()) / span if span > 0 else np.zeros_like(y)
    dx, dy = x[-1] - x[0], y[-1] - y[0]
    distances = np.abs(dy * (x - x[0]) - dx * (y - y[0])) / np.hypot(dx, dy)
    return int(np.argmax(distances)), distances


def elbow_select(matrix, k_range, seed, restarts=DEFAULT_RESTARTS):
    """
    Cluster ``matrix`` for every ``k`` in the ascending ``k_range`` and pick
    the elbow of the inertia curve (see :func:`elbow_point`).
    """
    ks = [int(k) for k in k_range]
    if not ks or any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidInputError("k_range must be non-empty and ascending, got %r" % (k_range,))
    inertias = [kmeans(matrix, k, seed, restarts).inertia for k in ks]
    position, distances = elbow_point(ks, inertias)
    curve = ElbowCurve(ks, inertias, ks[position], distances)
    logger.info("Elbow at k=%d over %s", curve.selected, ks)
    return curve


def nearest_wall_labels(points, arena):
    """
    Index into :data:`~sensorimotor.sim.WALLS` (N, E, S, W) of the wall
    closest to every point; ties resolve in that order.
    """
    return np.argmin(arena.wall_distances(points), axis=1)


def wall_purity(model, dataset, arena):
    """
    Fraction of records whose cluster's majority nearest-wall label matches
    their own: ``(1/N) * sum over clusters of the largest wall count``.
    """
    if len(model.assignments) != len(dataset):
        raise InvalidInputError(
            "%d assignments for %d records" % (len(model.assignments), len(dataset))
        )
    if not len(dataset):
        raise InvalidInputError("wall purity of an empty dataset")
    labels = nearest_wall_labels(dataset.ends, arena)
    table = np.zeros((model.k, len(WALLS)), dtype=np.int64)
    np.add.at(table, (model.assignments, labels), 1)
    return float(table.max(axis=1).sum()) / len(dataset)


def cluster_summary(model, matrix):
    """
    Size and per-dimension standard deviation of the members of every
    cluster, one row per cluster.
    """
    matrix = np.asarray(matrix, dtype=float)
    rows = []
    for j in range(model.k):
        members = matrix[model.assignments == j]
        spread = members.std(axis=0) if len(members) else np.full(matrix.shape[1], np.nan)
        row = {"cluster": j, "size": len(members), "mean_std": float(np.mean(spread))}
        row.update(("std_%02d" % i, float(s)) for i, s in enumerate(spread))
        rows.append(row)
    return pd.DataFrame(rows)
