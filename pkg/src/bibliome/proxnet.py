"""Per-document word proximity networks and seed-based feature expansion.

Two stems are close when they tend to appear in the same paragraphs; the
edge weight is the Jaccard index of their paragraph incidence sets.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

# Prefix marking unstemmed protein-mention nodes.
MENTION_PREFIX = "@"


@dataclass(frozen=True)
class IncidenceMatrix:
    """Binary paragraph x stem presence matrix."""

    cells: np.ndarray  # (m paragraphs, n stems), bool
    stems: tuple

    @property
    def index(self) -> dict:
        return {s: j for j, s in enumerate(self.stems)}


def build_incidence(
    paragraph_stems: Sequence[Iterable[str]],
    paragraph_mentions: Optional[Sequence[Iterable[str]]] = None,
) -> IncidenceMatrix:
    """Incidence of stems (and optionally ``@mention`` nodes) over paragraphs.

    Only stems present in some paragraph become columns, in sorted order.
    """
    if len(paragraph_stems) == 0:
        raise ValueError("document has no paragraphs")
    rows = [set(p) for p in paragraph_stems]
    if paragraph_mentions is not None:
        for row, mentions in zip(rows, paragraph_mentions):
            row.update(MENTION_PREFIX + m for m in mentions)
    stems = tuple(sorted(set().union(*rows)))
    index = {s: j for j, s in enumerate(stems)}
    cells = np.zeros((len(rows), len(stems)), dtype=bool)
    for k, row in enumerate(rows):
        cells[k, [index[s] for s in row]] = True
    return IncidenceMatrix(cells, stems)


def wpp(matrix: IncidenceMatrix, i, j) -> float:
    """Paragraphs containing both stems over paragraphs containing either."""
    idx = matrix.index
    a = matrix.cells[:, idx[i] if isinstance(i, str) else i]
    b = matrix.cells[:, idx[j] if isinstance(j, str) else j]
    return float(np.sum(a & b) / np.sum(a | b))


class ProximityNetwork:
    """Weighted word graph of one document; only nonzero edges are kept."""

    def __init__(self, matrix: IncidenceMatrix):
        d = matrix.cells.astype(np.int64)
        both = d.T @ d
        count = d.sum(axis=0)
        either = count[:, None] + count[None, :] - both
        # every node occurs somewhere, so either > 0
        self.weights = both / either
        self.nodes = matrix.stems
        self._index = {s: j for j, s in enumerate(self.nodes)}

    @classmethod
    def from_paragraphs(cls, paragraph_stems, paragraph_mentions=None) -> "ProximityNetwork":
        return cls(build_incidence(paragraph_stems, paragraph_mentions))

    def __contains__(self, node) -> bool:
        return node in self._index

    def weight(self, a: str, b: str) -> float:
        return float(self.weights[self._index[a], self._index[b]])

    def neighbors(self, node: str) -> dict:
        row = self.weights[self._index[node]]
        return {self.nodes[j]: float(row[j]) for j in np.flatnonzero(row) if self.nodes[j] != node}

    def edges(self) -> list[tuple]:
        """(a, b, weight) for a < b with weight > 0."""
        iu, ju = np.triu_indices(len(self.nodes), k=1)
        w = self.weights[iu, ju]
        keep = w > 0
        return [(self.nodes[i], self.nodes[j], float(x)) for i, j, x in zip(iu[keep], ju[keep], w[keep])]

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, delimiter="\t", lineterminator="\n")
            w.writerow(["stem_i", "stem_j", "wpp"])
            for a, b, x in self.edges():
                w.writerow([a, b, repr(x)])


def expand_features(network: ProximityNetwork, seeds: Iterable[str], threshold: float = 0.25, limit: int = 50) -> list[str]:
    """Seeds plus up to ``limit`` nodes linked to a seed with weight >= threshold.

    Neighbours are ordered by their strongest link to any seed, then by name.
    Seeds missing from the network are skipped.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    present = []
    for s in dict.fromkeys(seeds):
        if s in network:
            present.append(s)
        else:
            log.warning("seed %r not in network", s)
    if not present:
        return []
    rows = network.weights[[network._index[s] for s in present]]
    best = rows.max(axis=0)
    seed_set = set(present)
    cands = [(-float(best[j]), network.nodes[j]) for j in np.flatnonzero(best >= threshold) if network.nodes[j] not in seed_set]
    cands.sort()
    return present + [name for _, name in cands[:limit]]
