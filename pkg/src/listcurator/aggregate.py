"""Rank aggregation: fuse per-criterion rankings via the dominant SVD component."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .recommend import Ranking
from .validation import check_finite

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000


@dataclass(frozen=True)
class ScorePanel:
    """Dense candidates x criteria matrix of standardized scores."""

    candidates: tuple[str, ...]
    columns: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "columns", tuple(self.columns))
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape != (len(self.candidates), len(self.columns)):
            raise ValueError(
                f"scores shape {scores.shape} does not match "
                f"{len(self.candidates)} candidates x {len(self.columns)} columns"
            )
        if len(self.columns) < 2:
            raise ValueError("a score panel needs at least 2 criteria columns")
        object.__setattr__(self, "scores", scores)


def build_panel(rankings: Sequence[Ranking]) -> ScorePanel:
    """Assemble rankings over one shared candidate set into a standardized panel.

    Each column is shifted to zero mean and scaled to unit variance; columns
    with zero variance become all-zero but are kept so the panel shape is
    stable.
    """
    if len(rankings) < 2:
        raise ValueError("need at least 2 rankings to build a panel")
    candidate_set = rankings[0].candidates
    for r in rankings[1:]:
        if r.candidates != candidate_set:
            raise ValueError("rankings cover different candidate sets")
    candidates = tuple(sorted(candidate_set))
    scores = np.empty((len(candidates), len(rankings)))
    for j, r in enumerate(rankings):
        lookup = dict(r.entries)
        scores[:, j] = [lookup[u] for u in candidates]
    check_finite(scores, "panel scores")

    means = scores.mean(axis=0)
    stds = scores.std(axis=0)
    standardized = np.zeros_like(scores)
    # constant columns (zero range) standardize to all-zero but are kept
    live = np.ptp(scores, axis=0) > 0
    standardized[:, live] = (scores[:, live] - means[live]) / stds[live]
    return ScorePanel(
        candidates=candidates,
        columns=tuple(r.criterion for r in rankings),
        scores=standardized,
    )


def dominant_singular_triple(
    a: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER
) -> tuple[float, np.ndarray, np.ndarray]:
    """Dominant singular triple (sigma, u, v) by power iteration on the Gram matrix.

    Deterministic: the start vector is all ones, normalized. Iterates on the
    smaller-side Gram matrix until the iterate moves less than ``tol``. If the
    start lands in the null space, restarts from consecutive basis vectors.
    """
    a = np.asarray(a, dtype=np.float64)
    n, m = a.shape
    gram_on_right = m <= n
    b = a.T @ a if gram_on_right else a @ a.T
    dim = b.shape[0]

    x = np.ones(dim) / np.sqrt(dim)
    restart = 0
    for _ in range(max_iter):
        y = b @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            if restart >= dim:
                # entire matrix is zero
                return 0.0, np.zeros(n), np.zeros(m)
            x = np.zeros(dim)
            x[restart] = 1.0
            restart += 1
            continue
        y /= norm
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y

    if gram_on_right:
        v = x
        av = a @ v
        sigma = float(np.linalg.norm(av))
        u = av / sigma if sigma > 0 else np.zeros(n)
    else:
        u = x
        atu = a.T @ u
        sigma = float(np.linalg.norm(atu))
        v = atu / sigma if sigma > 0 else np.zeros(m)
    return sigma, u, v


def svd_aggregate(panel: ScorePanel) -> Ranking:
    """Aggregate a standardized panel into one ranking via its rank-1 factorization.

    The aggregate score vector is the first left singular vector scaled by the
    first singular value, with sign chosen so its inner product with the
    per-row mean of the panel is nonnegative. When the panel is entirely zero
    or the sign cannot be fixed, falls back to mean-score ranking and flags
    the result as degenerate.
    """
    a = panel.scores
    check_finite(a, "panel scores")
    sigma, u, _ = dominant_singular_triple(a)
    row_means = a.mean(axis=1)
    aggregate = sigma * u

    alignment = float(aggregate @ row_means)
    scale = float(np.linalg.norm(aggregate) * np.linalg.norm(row_means))
    degenerate = sigma <= POWER_TOL or scale == 0.0 or abs(alignment) <= 1e-12 * scale
    if degenerate:
        scores = row_means
    elif alignment < 0:
        scores = -aggregate
    else:
        scores = aggregate

    order = sorted(zip(panel.candidates, scores), key=lambda item: (-item[1], item[0]))
    return Ranking(
        criterion="aggregate",
        entries=tuple(order),
        candidates=frozenset(panel.candidates),
        degenerate=degenerate,
    )


def save_panel_csv(panel: ScorePanel, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", *panel.columns])
        for i, user in enumerate(panel.candidates):
            writer.writerow([user, *[repr(x) for x in panel.scores[i]]])
