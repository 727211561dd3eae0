"""The ten sparse user-profile views and the cosine similarity kernel.

Content views (tweet aggregates and list text) produce raw term-frequency
rows and are weighted with :func:`tfidf` before use; network views
(followed-by, retweeted-by, mentioned-by, co-listed) are used as built.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Dataset
from .text import tokenize
from .validation import as_row_vector, check_nonnegative

CONTENT_CRITERIA = (
    "tweets50",
    "tweets100",
    "tweets200",
    "list_names",
    "list_descriptions",
    "list_merged",
)
NETWORK_CRITERIA = ("followed_by", "retweeted_by", "mentioned_by", "co_listed")
CRITERIA = CONTENT_CRITERIA + NETWORK_CRITERIA

# the five strongest views, used as the default aggregation set
DEFAULT_CRITERIA = ("followed_by", "mentioned_by", "co_listed", "tweets200", "list_names")

_TWEET_DEPTH = {"tweets50": 50, "tweets100": 100, "tweets200": 200}


def check_criterion(tag: str) -> str:
    if tag not in CRITERIA:
        raise ValueError(f"unknown criterion {tag!r}; expected one of: {', '.join(CRITERIA)}")
    return tag


@dataclass(frozen=True)
class FeatureSpace:
    """Ordered feature identifiers (terms, user ids, or list ids) with column lookup."""

    features: tuple
    index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        index = {f: i for i, f in enumerate(self.features)}
        if len(index) != len(self.features):
            raise ValueError("duplicate features in feature space")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class ProfileMatrix:
    """Sparse nonnegative user x feature matrix tagged with its criterion."""

    criterion: str
    space: FeatureSpace
    users: tuple[str, ...]
    matrix: sparse.csr_matrix = field(compare=False)

    def __post_init__(self):
        check_criterion(self.criterion)
        object.__setattr__(self, "users", tuple(self.users))
        m = self.matrix.tocsr().astype(np.float64)
        m.eliminate_zeros()
        if m.shape != (len(self.users), len(self.space)):
            raise ValueError(
                f"matrix shape {m.shape} does not match "
                f"{len(self.users)} users x {len(self.space)} features"
            )
        if m.nnz and m.data.min() <= 0:
            raise ValueError("profile weights must be strictly positive")
        if len(set(self.users)) != len(self.users):
            raise ValueError("duplicate user ids in profile rows")
        object.__setattr__(self, "matrix", m)

    @cached_property
    def user_index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.users)}

    def row(self, user_id: str) -> sparse.csr_matrix:
        try:
            i = self.user_index[user_id]
        except KeyError:
            raise ValueError(f"unknown user id {user_id!r}") from None
        return self.matrix.getrow(i)

    def same_as(self, other: "ProfileMatrix") -> bool:
        return (
            self.criterion == other.criterion
            and self.space == other.space
            and self.users == other.users
            and self.matrix.shape == other.matrix.shape
            and (self.matrix != other.matrix).nnz == 0
        )

    def to_triplets(self, path: str | Path) -> None:
        """Write a self-describing (user_id, feature, weight) text export.

        Header lines carry the criterion plus full row and column orders so
        empty rows and columns survive; float weights use ``repr`` and
        round-trip bit-exactly.
        """
        out = Path(path)
        fields = [self.criterion, *self.users, *map(str, self.space.features)]
        if any("\t" in f or "\n" in f for f in fields):
            raise ValueError("identifiers may not contain tabs or newlines")
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with out.open("w", encoding="utf-8") as fh:
            fh.write(f"#criterion\t{self.criterion}\n")
            for u in self.users:
                fh.write(f"#user\t{u}\n")
            for f in self.space.features:
                fh.write(f"#feature\t{f}\n")
            for i in order:
                fh.write(
                    f"{self.users[coo.row[i]]}\t{self.space.features[coo.col[i]]}\t{float(coo.data[i])!r}\n"
                )

    @classmethod
    def from_triplets(cls, path: str | Path) -> "ProfileMatrix":
        criterion = None
        users: list[str] = []
        features: list[str] = []
        rows, cols, data = [], [], []
        user_pos: dict[str, int] = {}
        feature_pos: dict[str, int] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if parts[0] == "#criterion":
                    criterion = parts[1]
                elif parts[0] == "#user":
                    user_pos[parts[1]] = len(users)
                    users.append(parts[1])
                elif parts[0] == "#feature":
                    feature_pos[parts[1]] = len(features)
                    features.append(parts[1])
                else:
                    if len(parts) != 3:
                        raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
                    rows.append(user_pos[parts[0]])
                    cols.append(feature_pos[parts[1]])
                    data.append(float(parts[2]))
        if criterion is None:
            raise ValueError(f"{path}: missing #criterion header")
        matrix = sparse.csr_matrix(
            (data, (rows, cols)), shape=(len(users), len(features)), dtype=np.float64
        )
        return cls(criterion=criterion, space=FeatureSpace(tuple(features)), users=tuple(users), matrix=matrix)


def _term_counts(dataset: Dataset, criterion: str) -> list[Counter]:
    """Raw term counts per user, in dataset user order."""
    counts: dict[str, Counter] = {u: Counter() for u in dataset.user_ids}
    if criterion in _TWEET_DEPTH:
        depth = _TWEET_DEPTH[criterion]
        for author, tweets in dataset.tweets_by_author.items():
            if author not in counts:
                continue
            bag = counts[author]
            for tweet in tweets[:depth]:
                bag.update(tokenize(tweet.text))
    else:
        use_names = criterion in ("list_names", "list_merged")
        use_descriptions = criterion in ("list_descriptions", "list_merged")
        for rec in dataset.lists:
            tokens: list[str] = []
            if use_names:
                tokens.extend(tokenize(rec.name))
            if use_descriptions and rec.description:
                tokens.extend(tokenize(rec.description))
            if not tokens:
                continue
            for member in rec.members:
                if member in counts:
                    counts[member].update(tokens)
    return [counts[u] for u in dataset.user_ids]


def _from_entries(
    criterion: str,
    users: Sequence[str],
    features: Sequence,
    entries: Iterable[tuple[int, int, float]],
) -> ProfileMatrix:
    rows, cols, data = [], [], []
    for r, c, w in entries:
        if w == 0:
            continue
        rows.append(r)
        cols.append(c)
        data.append(float(w))
    matrix = sparse.csr_matrix(
        (data, (rows, cols)), shape=(len(users), len(features)), dtype=np.float64
    )
    return ProfileMatrix(
        criterion=criterion, space=FeatureSpace(tuple(features)), users=tuple(users), matrix=matrix
    )


def build_profile(dataset: Dataset, criterion: str) -> ProfileMatrix:
    """Build one profile view. Content views return raw term counts.

    Every dataset user gets a row; users with no data get an all-implicit-zero
    row. Network columns span all dataset users (sorted), co-listed columns
    span all list ids (sorted), term columns span the sorted union vocabulary.
    """
    check_criterion(criterion)
    users = dataset.user_ids

    if criterion in CONTENT_CRITERIA:
        per_user = _term_counts(dataset, criterion)
        vocabulary = sorted(set().union(*per_user)) if per_user else []
        vocab_index = {t: j for j, t in enumerate(vocabulary)}
        entries = (
            (i, vocab_index[term], count)
            for i, bag in enumerate(per_user)
            for term, count in bag.items()
        )
        return _from_entries(criterion, users, vocabulary, entries)

    user_row = {u: i for i, u in enumerate(users)}
    if criterion == "co_listed":
        list_ids = sorted(rec.list_id for rec in dataset.lists)
        list_col = {lid: j for j, lid in enumerate(list_ids)}
        entries = (
            (user_row[member], list_col[rec.list_id], 1.0)
            for rec in dataset.lists
            for member in sorted(rec.members)
            if member in user_row
        )
        return _from_entries(criterion, users, list_ids, entries)

    # followed_by / retweeted_by / mentioned_by: row u_i holds, at column u_j,
    # how strongly u_j points at u_i (transposed adjacency)
    kind = {"followed_by": "follow", "retweeted_by": "retweet", "mentioned_by": "mention"}[criterion]
    columns = sorted(users)
    col_of = {u: j for j, u in enumerate(columns)}
    entries = (
        (user_row[tgt], col_of[src], float(w))
        for src, tgt, w in dataset.edges(kind).edges
        if src in col_of and tgt in user_row
    )
    return _from_entries(criterion, users, columns, entries)


def tfidf(profile: ProfileMatrix) -> ProfileMatrix:
    """Log TF-IDF weighting: weight = log(1 + tf) * log(N / df), natural log.

    N counts all rows (users), df counts rows where the term occurs. Terms
    present in every row get weight 0 and their columns are pruned. Only the
    content criteria accept this weighting.
    """
    if profile.criterion not in CONTENT_CRITERIA:
        raise ValueError(
            f"tfidf applies to content criteria only, not {profile.criterion!r}"
        )
    m = profile.matrix
    n_rows, n_cols = m.shape
    df = np.bincount(m.indices, minlength=n_cols)
    idf = np.zeros(n_cols)
    occupied = df > 0
    idf[occupied] = np.log(n_rows / df[occupied])
    data = np.log1p(m.data) * idf[m.indices]
    weighted = sparse.csr_matrix((data, m.indices.copy(), m.indptr.copy()), shape=m.shape)
    weighted.eliminate_zeros()

    keep = df < n_rows
    features = profile.space.features
    if not keep.all():
        weighted = weighted[:, np.flatnonzero(keep)].tocsr()
        features = tuple(f for f, k in zip(features, keep) if k)
    return ProfileMatrix(
        criterion=profile.criterion,
        space=FeatureSpace(features),
        users=profile.users,
        matrix=weighted,
    )


def build_view(dataset: Dataset, criterion: str) -> ProfileMatrix:
    """Build a ready-to-rank view: raw profile plus tf-idf for content criteria."""
    profile = build_profile(dataset, criterion)
    if criterion in CONTENT_CRITERIA:
        profile = tfidf(profile)
    return profile


def cosine(a, b) -> float:
    """Cosine similarity of two nonnegative vectors, 0.0 if either has zero norm."""
    va = as_row_vector(a)
    vb = as_row_vector(b)
    check_nonnegative(va, "first vector")
    check_nonnegative(vb, "second vector")
    if va.shape[1] != vb.shape[1]:
        raise ValueError(f"dimension mismatch: {va.shape[1]} vs {vb.shape[1]}")
    na = np.sqrt(va.multiply(va).sum())
    nb = np.sqrt(vb.multiply(vb).sum())
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, float(va.multiply(vb).sum() / (na * nb)))


class ProfileVectorizer(BaseEstimator, TransformerMixin):
    """Sklearn-style adapter turning a Dataset into sparse profile rows.

    ``fit`` learns the feature space (and idf weights for content criteria)
    from one dataset; ``transform`` maps any dataset onto that space, so the
    views compose with ordinary sklearn pipelines.
    """

    def __init__(self, criterion: str = "tweets200", use_tfidf: bool = True):
        self.criterion = criterion
        self.use_tfidf = use_tfidf

    def fit(self, X: Dataset, y=None):
        raw = build_profile(X, self.criterion)
        if self.criterion in CONTENT_CRITERIA and self.use_tfidf:
            n_rows = raw.matrix.shape[0]
            df = np.bincount(raw.matrix.indices, minlength=raw.matrix.shape[1])
            keep = np.flatnonzero((df > 0) & (df < n_rows))
            self.idf_ = np.log(n_rows / df[keep])
            self.profile_ = tfidf(raw)
        else:
            self.idf_ = None
            self.profile_ = raw
        self.space_ = self.profile_.space
        self.users_ = self.profile_.users
        self._fitted_on = id(X)
        return self

    def fit_transform(self, X: Dataset, y=None):
        return self.fit(X).transform(X)

    def transform(self, X: Dataset) -> sparse.csr_matrix:
        if not hasattr(self, "space_"):
            raise ValueError("ProfileVectorizer is not fitted")
        if id(X) == self._fitted_on:
            return self.profile_.matrix
        raw = build_profile(X, self.criterion)
        col_map = np.full(len(raw.space), -1, dtype=np.int64)
        for j, feature in enumerate(raw.space.features):
            col_map[j] = self.space_.index.get(feature, -1)
        coo = raw.matrix.tocoo()
        mask = col_map[coo.col] >= 0
        rows, cols, data = coo.row[mask], col_map[coo.col[mask]], coo.data[mask]
        if self.idf_ is not None:
            data = np.log1p(data) * self.idf_[cols]
        out = sparse.csr_matrix(
            (data, (rows, cols)), shape=(len(raw.users), len(self.space_)), dtype=np.float64
        )
        out.eliminate_zeros()
        return out

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray([str(f) for f in self.space_.features], dtype=object)
