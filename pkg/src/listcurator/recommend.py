"""Centroid-based recommender: rank candidates by cosine to the training centroid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator

from .validation import as_csr_rows, row_norms
from .views import ProfileMatrix


@dataclass(frozen=True)
class Ranking:
    """Descending-score ordering of a candidate set with deterministic ties.

    Scores are non-increasing; equal scores are ordered by ascending user id.
    Entries cover exactly the candidate set.
    """

    criterion: str
    entries: tuple[tuple[str, float], ...]
    candidates: frozenset[str]
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((u, float(s)) for u, s in self.entries))
        object.__setattr__(self, "candidates", frozenset(self.candidates))
        ids = [u for u, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate user ids in ranking")
        if set(ids) != self.candidates:
            raise ValueError("ranking entries do not cover the candidate set")
        scores = [s for _, s in self.entries]
        if not all(np.isfinite(scores)):
            raise ValueError("ranking scores must be finite")
        for (ua, sa), (ub, sb) in zip(self.entries, self.entries[1:]):
            if sb > sa:
                raise ValueError("ranking scores must be non-increasing")
            if sb == sa and ub < ua:
                raise ValueError("tied scores must be ordered by ascending user id")

    def top(self, k: int) -> tuple[tuple[str, float], ...]:
        return self.entries[:k]

    def score_of(self, user_id: str) -> float:
        return dict(self.entries)[user_id]

    def to_records(self) -> list[tuple[int, str, float]]:
        return [(i + 1, u, s) for i, (u, s) in enumerate(self.entries)]


def _mean_row(X: sparse.csr_matrix) -> sparse.csr_matrix:
    ones = sparse.csr_matrix(np.ones((1, X.shape[0])))
    return (ones @ X).multiply(1.0 / X.shape[0]).tocsr()


class CentroidRecommender(BaseEstimator):
    """Score rows by cosine similarity to the mean of the rows seen in fit.

    ``fit`` takes the profile rows of the training users; ``decision_function``
    returns cosine scores for candidate rows, with zero-norm rows scoring 0.
    """

    def fit(self, X, y=None):
        X = as_csr_rows(X)
        if X.shape[0] < 1:
            raise ValueError("need at least one training row")
        if X.nnz and X.data.min() < 0:
            raise ValueError("profile rows must be nonnegative")
        self.centroid_ = _mean_row(X)
        self.centroid_norm_ = float(np.sqrt(self.centroid_.multiply(self.centroid_).sum()))
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        X = as_csr_rows(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"feature mismatch: fitted on {self.n_features_in_}, got {X.shape[1]}"
            )
        if self.centroid_norm_ == 0.0:
            return np.zeros(X.shape[0])
        norms = row_norms(X)
        dots = np.asarray((X @ self.centroid_.T).todense()).ravel()
        scores = np.zeros(X.shape[0])
        nz = norms > 0
        scores[nz] = dots[nz] / (norms[nz] * self.centroid_norm_)
        return np.minimum(scores, 1.0)

    def score_samples(self, X) -> np.ndarray:
        return self.decision_function(X)


def centroid(profile: ProfileMatrix, training: Iterable[str]) -> sparse.csr_matrix:
    """Component-wise mean of the training users' rows (implicit zeros included)."""
    ids = sorted(set(training))
    if not ids:
        raise ValueError("empty training set")
    indices = []
    for u in ids:
        if u not in profile.user_index:
            raise ValueError(f"unknown user id {u!r}")
        indices.append(profile.user_index[u])
    return _mean_row(profile.matrix[indices])


def rank(
    profile: ProfileMatrix,
    training: Iterable[str],
    candidates: Iterable[str],
    criterion: str | None = None,
) -> Ranking:
    """Rank candidates by cosine similarity to the training centroid.

    Training and candidate sets must be disjoint and known to the profile.
    Ties are broken by ascending user id, making the ordering deterministic.
    """
    train_ids = sorted(set(training))
    cand_ids = sorted(set(candidates))
    if not train_ids:
        raise ValueError("empty training set")
    if not cand_ids:
        raise ValueError("empty candidate set")
    overlap = set(train_ids) & set(cand_ids)
    if overlap:
        raise ValueError(f"training and candidates overlap: {sorted(overlap)[:5]}")
    for u in train_ids + cand_ids:
        if u not in profile.user_index:
            raise ValueError(f"unknown user id {u!r}")

    X = profile.matrix
    recommender = CentroidRecommender().fit(X[[profile.user_index[u] for u in train_ids]])
    scores = recommender.decision_function(X[[profile.user_index[u] for u in cand_ids]])
    order = sorted(zip(cand_ids, scores), key=lambda item: (-item[1], item[0]))
    return Ranking(
        criterion=criterion or profile.criterion,
        entries=tuple(order),
        candidates=frozenset(cand_ids),
    )
