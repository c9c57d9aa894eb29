"""Latent semantic vote classifier.

Documents become unit-length TF-IDF vectors over the selected word features
with the protein-mention count appended as one more coordinate.  A truncated
SVD of the training term-document matrix gives the latent space; a test
document is folded in and compared by cosine with every training document.
Mean cosines to the positive and negative training documents (pi, nu) are
separated by a straight line ``pi > m * nu + b``.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from bibliome.corpus import Label

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class DocMatrix:
    """Row-per-document matrix of unit TF-IDF vectors (last column is np)."""

    vectors: np.ndarray
    vocabulary: tuple
    idf: np.ndarray
    zero_rows: tuple = ()


def idf_weights(docs: Sequence[Sequence[str]], vocabulary: Sequence[str]) -> np.ndarray:
    """ln(N / df) per vocabulary stem; NaN where df = 0."""
    df = Counter()
    for stems in docs:
        df.update(set(stems))
    n = len(docs)
    return np.array([math.log(n / df[w]) if df[w] else math.nan for w in vocabulary])


def build_matrix(
    docs: Sequence[Sequence[str]],
    vocabulary: Sequence[str],
    np_counts: Sequence[float],
    idf: Optional[np.ndarray] = None,
) -> DocMatrix:
    """TF-IDF document vectors with the mention count appended, each normalized.

    When ``idf`` is None it is computed from ``docs`` and stems that occur in
    no document are dropped from the vocabulary.  Pass the training ``idf``
    (and its vocabulary) to vectorize test documents.
    """
    vocabulary = tuple(vocabulary)
    if idf is None:
        idf = idf_weights(docs, vocabulary)
        keep = ~np.isnan(idf)
        if not keep.all():
            dropped = [w for w, k in zip(vocabulary, keep) if not k]
            log.warning("dropping %d features absent from every document: %s", len(dropped), dropped[:10])
            vocabulary = tuple(w for w, k in zip(vocabulary, keep) if k)
            idf = idf[keep]
    index = {w: j for j, w in enumerate(vocabulary)}
    mat = np.zeros((len(docs), len(vocabulary) + 1))
    for i, stems in enumerate(docs):
        for w, tf in Counter(s for s in stems if s in index).items():
            mat[i, index[w]] = tf
    mat[:, :-1] *= idf
    mat[:, -1] = np.asarray(np_counts, dtype=float)
    norms = np.linalg.norm(mat, axis=1)
    zero = tuple(int(i) for i in np.flatnonzero(norms == 0))
    nz = norms > 0
    mat[nz] /= norms[nz, None]
    return DocMatrix(mat, vocabulary, np.asarray(idf, dtype=float), zero)


def numerical_rank(singular_values: np.ndarray, shape) -> int:
    if singular_values.size == 0:
        return 0
    tol = singular_values[0] * max(shape) * np.finfo(float).eps
    return int(np.sum(singular_values > tol))


@dataclass(frozen=True)
class LsiSpace:
    """Rank-k factorization of the training term-document matrix ``A = U S V^T``.

    ``basis`` is ``U_k`` (terms x k) and ``doc_projections`` is ``V_k``
    (training docs x k), i.e. the folded-in coordinates of the training
    documents.
    """

    k: int
    singular_values: np.ndarray
    basis: np.ndarray
    doc_projections: np.ndarray
    labels: tuple = ()
    vocabulary: tuple = ()
    idf: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def project(self, vectors: np.ndarray) -> np.ndarray:
        return project(vectors, self)

    def reconstruct(self) -> np.ndarray:
        """Rank-k approximation of the training matrix, rows = documents."""
        return (self.doc_projections * self.singular_values) @ self.basis.T

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "k": self.k,
            "singular_values": self.singular_values.tolist(),
            "basis": self.basis.tolist(),
            "doc_projections": self.doc_projections.tolist(),
            "labels": [lab.value for lab in self.labels],
            "vocabulary": list(self.vocabulary),
            "idf": self.idf.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LsiSpace":
        if obj.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported LSI space version {obj.get('version')!r}")
        k = obj["k"]
        return cls(
            k,
            np.asarray(obj["singular_values"], dtype=float),
            np.asarray(obj["basis"], dtype=float).reshape(-1, k),
            np.asarray(obj["doc_projections"], dtype=float).reshape(-1, k),
            tuple(Label(v) for v in obj["labels"]),
            tuple(obj["vocabulary"]),
            np.asarray(obj["idf"], dtype=float),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "LsiSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def fit_svd(matrix, k: int = 100, labels: Sequence[Label] = (), vocabulary=(), idf=None) -> LsiSpace:
    """Truncated SVD of a document-row matrix (or DocMatrix).

    ``k`` is clamped to the numerical rank of the matrix.
    """
    if isinstance(matrix, DocMatrix):
        vocabulary = vocabulary or matrix.vocabulary
        idf = matrix.idf if idf is None else idf
        matrix = matrix.vectors
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        raise ValueError("cannot factor an empty matrix")
    if k < 1:
        raise ValueError("k must be >= 1")
    # term-document orientation: columns are documents
    u, s, vt = np.linalg.svd(a.T, full_matrices=False)
    r = numerical_rank(s, a.shape)
    if k > r:
        log.warning("k=%d exceeds matrix rank %d; using k=%d", k, r, r)
        k = r
    if k == 0:
        raise ValueError("matrix has rank 0")
    return LsiSpace(
        k,
        s[:k].copy(),
        u[:, :k].copy(),
        vt[:k].T.copy(),
        tuple(labels),
        tuple(vocabulary),
        np.zeros(0) if idf is None else np.asarray(idf, dtype=float),
    )


def project(vectors: np.ndarray, space: LsiSpace) -> np.ndarray:
    """Fold document vectors into the latent space: ``S_k^-1 U_k^T v``.

    Accepts one vector or a row-per-document matrix.
    """
    v = np.asarray(vectors, dtype=float)
    if v.shape[-1] != space.basis.shape[0]:
        raise ValueError(f"vector dimension {v.shape[-1]} != space dimension {space.basis.shape[0]}")
    return (v @ space.basis) / space.singular_values


# Inputs are unit vectors or exactly zero, so anything this short is rounding noise.
_ZERO_NORM = 1e-12


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    return np.divide(x, norms, out=np.zeros_like(x), where=norms > _ZERO_NORM)


def latent_cosines(vectors: np.ndarray, space: LsiSpace) -> np.ndarray:
    """Cosine of each test vector with each training document in the latent space.

    Coordinates are scaled by the singular values before comparison, so at
    full rank the cosines equal those of the raw vectors.  A zero projection
    gives zero cosines.
    """
    test = _unit_rows(np.atleast_2d(project(vectors, space)) * space.singular_values)
    train = _unit_rows(space.doc_projections * space.singular_values)
    return test @ train.T


def pi_nu_from_cosines(cosines: np.ndarray, positive: np.ndarray):
    """Mean cosine per row over positive and over negative columns."""
    pos = np.asarray(positive, dtype=bool)
    neg = ~pos
    cos = np.atleast_2d(cosines)
    pi = cos[:, pos].sum(axis=1) / max(pos.sum(), 1)
    nu = cos[:, neg].sum(axis=1) / max(neg.sum(), 1)
    return pi, nu


def pi_nu(vectors: np.ndarray, space: LsiSpace, labels: Optional[Sequence[Label]] = None):
    """Mean latent cosine to positive (pi) and negative (nu) training documents."""
    labels = space.labels if labels is None else labels
    if len(labels) != space.doc_projections.shape[0]:
        raise ValueError("labels must align with the training documents of the space")
    positive = np.array([lab is Label.POSITIVE for lab in labels])
    pi, nu = pi_nu_from_cosines(latent_cosines(vectors, space), positive)
    if np.ndim(vectors) == 1:
        return float(pi[0]), float(nu[0])
    return pi, nu


@dataclass(frozen=True)
class LsiBoundary:
    m: float
    b: float

    def classify(self, pi, nu):
        return classify_lsi(pi, nu, self)


def classify_lsi(pi, nu, boundary: LsiBoundary):
    """Positive iff ``pi > m * nu + b`` (strict)."""
    above = np.asarray(pi) > boundary.m * np.asarray(nu) + boundary.b
    if np.ndim(above) == 0:
        return Label.POSITIVE if above else Label.NEGATIVE
    return above


def default_m_grid() -> np.ndarray:
    return np.round(np.linspace(0.0, 3.0, 61), 10)


def default_b_grid() -> np.ndarray:
    return np.round(np.linspace(-1.0, 1.0, 201), 10)


def _f_and_acc(pred: np.ndarray, truth: np.ndarray):
    """F-score and accuracy for boolean predictions; pred may be 2-D (candidates x docs)."""
    tp = (pred & truth).sum(axis=-1)
    fp = (pred & ~truth).sum(axis=-1)
    fn = (~pred & truth).sum(axis=-1)
    n = truth.size
    acc = (n - fp - fn) / n
    denom = 2 * tp + fp + fn
    f = np.divide(2 * tp, denom, out=np.zeros(np.shape(tp), dtype=float), where=denom > 0)
    return f, acc


def fit_boundary(evaluations, m_grid=None, b_grid=None) -> LsiBoundary:
    """Grid search for the line maximizing mean F-score across evaluation sets.

    ``evaluations`` is a sequence of ``(pi, nu, is_positive)`` triples, one
    per evaluation partition.  Ties go to higher mean accuracy, then smaller
    ``|m|``, then smaller ``|b|``.
    """
    m_grid = default_m_grid() if m_grid is None else np.asarray(m_grid, dtype=float)
    b_grid = default_b_grid() if b_grid is None else np.asarray(b_grid, dtype=float)
    if m_grid.size == 0 or b_grid.size == 0:
        raise ValueError("empty boundary grid")
    evals = [(np.asarray(p, float), np.asarray(n, float), np.asarray(t, bool)) for p, n, t in evaluations]
    if not evals:
        raise ValueError("no evaluation sets")
    best = None
    for m in m_grid:
        f_sum = np.zeros(b_grid.size)
        a_sum = np.zeros(b_grid.size)
        for pi, nu, truth in evals:
            diff = pi - m * nu
            pred = diff[None, :] > b_grid[:, None]
            f, acc = _f_and_acc(pred, truth[None, :])
            f_sum += f
            a_sum += acc
        f_mean = f_sum / len(evals)
        a_mean = a_sum / len(evals)
        for j, b in enumerate(b_grid):
            key = (-f_mean[j], -a_mean[j], abs(m), abs(b))
            if best is None or key < best[0]:
                best = (key, float(m), float(b))
    return LsiBoundary(best[1], best[2])
