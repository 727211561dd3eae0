"""Evaluation protocol: repeated k-fold CV, precision/recall@k, medal tables,
pairwise Spearman correlations, and chance-corrected seed cohesion.

Randomness comes from numpy's PCG64 generator: run ``i`` of a cross-validation
uses ``SeedSequence(rng_seed).spawn(runs)[i]``, so results are reproducible
bit for bit across platforms and across worker counts.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import sparse
from scipy.stats import rankdata

from .aggregate import build_panel, svd_aggregate
from .corpus import Dataset
from .recommend import Ranking, rank
from .views import CRITERIA, DEFAULT_CRITERIA, ProfileMatrix, build_view, check_criterion

AGGREGATE = "aggregate"


@dataclass(frozen=True)
class CVConfig:
    runs: int = 250
    k_values: tuple[int, ...] = (10, 20, 30, 40, 50)
    rng_seed: int = 0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        ks = tuple(sorted({int(k) for k in self.k_values}))
        if not ks or ks[0] < 1:
            raise ValueError("every k must be at least 1")
        object.__setattr__(self, "k_values", ks)


def choose_folds(seed_count: int) -> int:
    """Largest fold count in [2, 5] that keeps at least ten users per test fold."""
    for folds in (5, 4, 3, 2):
        if seed_count // folds >= 10:
            return folds
    raise ValueError(
        f"no valid fold count: {seed_count} seeds cannot give test folds of 10 or more"
    )


def precision_recall(ranking: Ranking, test: Iterable[str], k: int) -> tuple[float, float]:
    """Precision and recall of the top k against a held-out test set."""
    test_set = set(test)
    if not test_set:
        raise ValueError("empty test set")
    if not test_set <= ranking.candidates:
        missing = sorted(test_set - ranking.candidates)[:5]
        raise ValueError(f"test users missing from the ranking: {missing}")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(ranking.entries):
        raise ValueError(f"k={k} exceeds candidate count {len(ranking.entries)}")
    hits = sum(1 for u, _ in ranking.entries[:k] if u in test_set)
    return hits / k, hits / len(test_set)


def _spearman_scores(xa: np.ndarray, xb: np.ndarray) -> float:
    ra = rankdata(xa)
    rb = rankdata(xb)
    n = len(ra)
    if n < 2:
        return 0.0
    if len(np.unique(ra)) == n and len(np.unique(rb)) == n:
        # tie-free shortcut, exact for identical and reversed orderings
        d = ra - rb
        return 1.0 - 6.0 * float(d @ d) / (n * (n * n - 1))
    da = ra - ra.mean()
    db = rb - rb.mean()
    sa = float(da @ da)
    sb = float(db @ db)
    if sa == 0.0 or sb == 0.0:
        return 0.0
    return float(np.clip((da @ db) / math.sqrt(sa * sb), -1.0, 1.0))


def spearman(a: Ranking, b: Ranking) -> float:
    """Spearman rank correlation of two rankings, with average ranks for ties."""
    if a.candidates != b.candidates:
        raise ValueError("rankings cover different candidate sets")
    ids = sorted(a.candidates)
    sa = dict(a.entries)
    sb = dict(b.entries)
    return _spearman_scores(
        np.array([sa[u] for u in ids]), np.array([sb[u] for u in ids])
    )


def competition_places(scores: Mapping[str, float]) -> dict[str, int]:
    """Competition ranking: place = 1 + number of strictly better contenders."""
    return {
        name: 1 + sum(1 for other in scores.values() if other > s)
        for name, s in scores.items()
    }


def medal_tables(cells: Sequence[Mapping[str, float]]) -> dict[str, tuple[float, float, float]]:
    """Percent of cells where each contender placed first, second, third.

    Ties share the better place and both consume it, so a tied first leaves
    second place empty for that cell.
    """
    if not cells:
        return {}
    names = list(cells[0])
    counts = {name: [0, 0, 0] for name in names}
    for cell in cells:
        for name, place in competition_places(cell).items():
            if place <= 3:
                counts[name][place - 1] += 1
    total = len(cells)
    return {name: tuple(100.0 * c / total for c in counts[name]) for name in names}


@dataclass(frozen=True, eq=False)
class EvalReport:
    dataset: str
    criteria: tuple[str, ...]
    k_values: tuple[int, ...]
    runs: int
    folds: int
    n_evaluations: int
    mean_precision: dict
    mean_recall: dict
    spearman_matrix: np.ndarray
    medal_precision: dict
    medal_recall: dict

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "criteria": list(self.criteria),
            "k_values": list(self.k_values),
            "runs": self.runs,
            "folds": self.folds,
            "n_evaluations": self.n_evaluations,
            "mean_precision": {c: {str(k): v for k, v in ks.items()} for c, ks in self.mean_precision.items()},
            "mean_recall": {c: {str(k): v for k, v in ks.items()} for c, ks in self.mean_recall.items()},
            "spearman": [[float(x) for x in row] for row in self.spearman_matrix],
            "medal_precision": {c: list(v) for c, v in self.medal_precision.items()},
            "medal_recall": {c: list(v) for c, v in self.medal_recall.items()},
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["criterion", "k", "mean_precision", "mean_recall"])
            for c in self.criteria:
                for k in self.k_values:
                    writer.writerow([c, k, repr(self.mean_precision[c][k]), repr(self.mean_recall[c][k])])

    def write_long_csv(self, path: str | Path) -> None:
        """Plotting-friendly long format: dataset, criterion, k, metric, value."""
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dataset", "criterion", "k", "metric", "value"])
            for c in self.criteria:
                for k in self.k_values:
                    writer.writerow([self.dataset, c, k, "precision", repr(self.mean_precision[c][k])])
                    writer.writerow([self.dataset, c, k, "recall", repr(self.mean_recall[c][k])])


def _fold_blocks(n: int, folds: int) -> list[np.ndarray]:
    # contiguous blocks whose sizes differ by at most one
    return np.array_split(np.arange(n), folds)


def _evaluate_runs(
    views: Mapping[str, ProfileMatrix],
    base: Sequence[str],
    include_aggregate: bool,
    seeds: Sequence[str],
    non_seeds: Sequence[str],
    folds: int,
    k_values: Sequence[int],
    seed_states: Sequence[np.random.SeedSequence],
) -> list[list[tuple[dict, dict, np.ndarray]]]:
    """Evaluate a chunk of runs; one list of per-fold results per run, in order."""
    results = []
    non_seed_set = set(non_seeds)
    for state in seed_states:
        rng = np.random.Generator(np.random.PCG64(state))
        perm = rng.permutation(len(seeds))
        per_fold = []
        for block in _fold_blocks(len(seeds), folds):
            test = {seeds[i] for i in perm[block]}
            training = set(seeds) - test
            candidates = test | non_seed_set
            rankings = [rank(views[c], training, candidates, criterion=c) for c in base]
            if include_aggregate:
                rankings.append(svd_aggregate(build_panel(rankings)))
            precision = {}
            recall = {}
            for r in rankings:
                for k in k_values:
                    p, rec = precision_recall(r, test, k)
                    precision[(r.criterion, k)] = p
                    recall[(r.criterion, k)] = rec
            ordered = sorted(candidates)
            vectors = []
            for r in rankings:
                lookup = dict(r.entries)
                vectors.append(np.array([lookup[u] for u in ordered]))
            rho = np.eye(len(rankings))
            for i in range(len(rankings)):
                for j in range(i + 1, len(rankings)):
                    rho[i, j] = rho[j, i] = _spearman_scores(vectors[i], vectors[j])
            per_fold.append((precision, recall, rho))
        results.append(per_fold)
    return results


def cross_validate(
    dataset: Dataset,
    criteria: Sequence[str] = DEFAULT_CRITERIA,
    cfg: CVConfig | None = None,
    n_jobs: int = 1,
    label: str = "dataset",
) -> EvalReport:
    """Repeated randomized k-fold cross-validation of the selected criteria.

    Each run shuffles the seed users and splits them into ``choose_folds``
    contiguous folds; each fold's candidates are its held-out seeds plus every
    non-seed user. Pass ``"aggregate"`` among the criteria to also evaluate
    the SVD aggregation of the remaining ones. Results are independent of
    ``n_jobs`` and bit-for-bit reproducible for a fixed ``cfg.rng_seed``.
    """
    cfg = cfg or CVConfig()
    tags = list(dict.fromkeys(criteria))
    include_aggregate = AGGREGATE in tags
    base = [t for t in tags if t != AGGREGATE]
    for tag in base:
        check_criterion(tag)
    if not base:
        raise ValueError("need at least one criterion")
    if include_aggregate and len(base) < 2:
        raise ValueError("the aggregate needs at least 2 criteria")

    seeds = sorted(dataset.seed_ids)
    folds = choose_folds(len(seeds))
    non_seeds = sorted(dataset.non_seed_ids)
    views = {c: build_view(dataset, c) for c in base}
    columns = base + ([AGGREGATE] if include_aggregate else [])
    children = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.runs)

    if n_jobs == 1:
        chunks = [
            _evaluate_runs(views, base, include_aggregate, seeds, non_seeds, folds, cfg.k_values, children)
        ]
    else:
        splits = [s for s in np.array_split(np.arange(cfg.runs), max(1, n_jobs) * 4) if len(s)]
        chunks = Parallel(n_jobs=n_jobs)(
            delayed(_evaluate_runs)(
                views, base, include_aggregate, seeds, non_seeds, folds, cfg.k_values,
                [children[i] for i in split],
            )
            for split in splits
        )

    psum: dict = defaultdict(float)
    rsum: dict = defaultdict(float)
    rho_sum = np.zeros((len(columns), len(columns)))
    n_evaluations = 0
    for chunk in chunks:
        for run_folds in chunk:
            for precision, recall, rho in run_folds:
                n_evaluations += 1
                for c in columns:
                    for k in cfg.k_values:
                        psum[(c, k)] += precision[(c, k)]
                        rsum[(c, k)] += recall[(c, k)]
                rho_sum += rho

    mean_precision = {c: {k: psum[(c, k)] / n_evaluations for k in cfg.k_values} for c in columns}
    mean_recall = {c: {k: rsum[(c, k)] / n_evaluations for k in cfg.k_values} for c in columns}
    rho_mean = rho_sum / n_evaluations
    np.fill_diagonal(rho_mean, 1.0)

    cells_p = [{c: mean_precision[c][k] for c in columns} for k in cfg.k_values]
    cells_r = [{c: mean_recall[c][k] for c in columns} for k in cfg.k_values]
    return EvalReport(
        dataset=label,
        criteria=tuple(columns),
        k_values=cfg.k_values,
        runs=cfg.runs,
        folds=folds,
        n_evaluations=n_evaluations,
        mean_precision=mean_precision,
        mean_recall=mean_recall,
        spearman_matrix=rho_mean,
        medal_precision=medal_tables(cells_p),
        medal_recall=medal_tables(cells_r),
    )


def corrected_cohesion(raw: float, expected: float) -> float:
    """Chance correction (raw - expected) / (1 - expected); 0 when expected is 1."""
    if expected >= 1.0 - 1e-12:
        return 0.0
    return (raw - expected) / (1.0 - expected)


@dataclass(frozen=True)
class CohesionEntry:
    criterion: str
    raw: float
    expected: float
    corrected: float
    randomizations: int
    null_std: float
    expected_se: float


@dataclass(frozen=True, eq=False)
class CohesionReport:
    dataset: str
    seed_count: int
    entries: tuple[CohesionEntry, ...]

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "seed_count": self.seed_count,
            "entries": [
                {
                    "criterion": e.criterion,
                    "raw": e.raw,
                    "expected": e.expected,
                    "corrected": e.corrected,
                    "randomizations": e.randomizations,
                    "null_std": e.null_std,
                    "expected_se": e.expected_se,
                }
                for e in self.entries
            ],
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["dataset", "criterion", "raw", "expected", "corrected", "randomizations", "null_std", "expected_se"]
            )
            for e in self.entries:
                writer.writerow(
                    [self.dataset, e.criterion, repr(e.raw), repr(e.expected), repr(e.corrected),
                     e.randomizations, repr(e.null_std), repr(e.expected_se)]
                )


def _normalized_rows(matrix: sparse.csr_matrix) -> sparse.csr_matrix:
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    inv = np.zeros_like(norms)
    nz = norms > 0
    inv[nz] = 1.0 / norms[nz]
    return sparse.diags(inv) @ matrix


def _mean_pairwise_cosine(rows: sparse.csr_matrix) -> float:
    n = rows.shape[0]
    gram = rows @ rows.T
    total = gram.sum() - gram.diagonal().sum()
    return float(np.clip(total / (n * (n - 1)), 0.0, 1.0))


def cohesion(
    profile: ProfileMatrix,
    seeds: Iterable[str],
    randomizations: int = 1000,
    rng_seed: int = 0,
) -> CohesionEntry:
    """Chance-corrected mean pairwise seed similarity for one view.

    The expected value is estimated by re-drawing same-size user subsets
    uniformly at random from all rows; ``null_std`` is the spread of that
    randomization distribution and ``expected_se`` the standard error of its
    mean.
    """
    seed_ids = sorted(set(seeds))
    if len(seed_ids) < 2:
        raise ValueError("need at least 2 seed users")
    if randomizations < 100:
        raise ValueError("need at least 100 randomizations")
    for u in seed_ids:
        if u not in profile.user_index:
            raise ValueError(f"unknown user id {u!r}")

    normalized = _normalized_rows(profile.matrix)
    raw = _mean_pairwise_cosine(normalized[[profile.user_index[u] for u in seed_ids]])

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(rng_seed)))
    n_users = normalized.shape[0]
    draws = np.empty(randomizations)
    for i in range(randomizations):
        sample = rng.choice(n_users, size=len(seed_ids), replace=False)
        draws[i] = _mean_pairwise_cosine(normalized[sample])
    expected = float(draws.mean())
    null_std = float(draws.std(ddof=1))
    return CohesionEntry(
        criterion=profile.criterion,
        raw=raw,
        expected=expected,
        corrected=corrected_cohesion(raw, expected),
        randomizations=randomizations,
        null_std=null_std,
        expected_se=null_std / math.sqrt(randomizations),
    )


def cohesion_report(
    dataset: Dataset,
    criteria: Sequence[str] = CRITERIA,
    seeds: Iterable[str] | None = None,
    randomizations: int = 1000,
    rng_seed: int = 0,
    label: str = "dataset",
) -> CohesionReport:
    """Per-criterion cohesion of a seed set (the dataset's seeds by default)."""
    seed_ids = sorted(set(seeds)) if seeds is not None else sorted(dataset.seed_ids)
    entries = []
    for tag in criteria:
        check_criterion(tag)
        view = build_view(dataset, tag)
        entries.append(cohesion(view, seed_ids, randomizations=randomizations, rng_seed=rng_seed))
    return CohesionReport(dataset=label, seed_count=len(seed_ids), entries=tuple(entries))
