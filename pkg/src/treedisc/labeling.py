"""Unit-vector edge labelings: antipodal stars, pruning-aware extension, full recursion."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from treedisc.sphere import phi, sample_sphere_many
from treedisc.tree_core import (
    ChainMismatch,
    DecompositionTrace,
    Edge,
    PruneChain,
    Tree,
    TreeError,
    recursive_decomposition,
)

DEFAULT_L0 = 32


@dataclass
class Labeling:
    """One unit vector in R^(d+1) per edge, rows in canonical edge order."""

    d: int
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float).reshape(-1, self.d + 1)
        norms = np.linalg.norm(self.vectors, axis=1)
        if len(norms) and np.abs(norms - 1.0).max() > 1e-9:
            raise TreeError("labeling vectors must have unit norm")

    def __len__(self) -> int:
        return len(self.vectors)

    def to_dict(self) -> dict:
        return {"d": self.d, "vectors": self.vectors.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Labeling":
        return cls(int(data["d"]), np.asarray(data["vectors"], dtype=float))

    @classmethod
    def from_map(cls, tree: Tree, d: int, vec: dict[Edge, np.ndarray]) -> "Labeling":
        return cls(d, np.array([vec[e] for e in tree.edges]).reshape(tree.m, d + 1))


def antipodal_vectors(k: int, d: int, rng) -> np.ndarray:
    """Rows x1, -x1, x2, -x2, ...; an odd count ends with one unpaired uniform point."""
    pairs = k // 2
    x = sample_sphere_many(d, pairs + (k % 2), rng)
    out = np.empty((k, d + 1))
    out[0:2 * pairs:2] = x[:pairs]
    out[1:2 * pairs:2] = -x[:pairs]
    if k % 2:
        out[-1] = x[-1]
    return out


def label_star(ell: int, d: int, rng=None) -> Labeling:
    """Antipodal random labeling of the star ``generate("star", ell)``."""
    if ell < 1 or d < 1:
        raise TreeError("label_star needs ell >= 1 and d >= 1")
    return Labeling(d, antipodal_vectors(ell, d, np.random.default_rng(rng)))


def _apply_chain(vec: dict[Edge, np.ndarray], chain: PruneChain) -> None:
    for rec in reversed(chain.records):
        anchor = vec.get(rec.anchor_edge)
        if anchor is None:
            raise ChainMismatch(f"edge {rec.anchor_edge} has no label to extend from")
        vec[rec.edge] = -anchor


def extend_labeling(f_pruned: Labeling, chain: PruneChain, pruned: Tree) -> Labeling:
    """Labeling of the unpruned tree: each reattached edge xy gets -f(yz)."""
    if len(f_pruned) != pruned.m:
        raise ChainMismatch("labeling does not cover the pruned tree")
    original = chain.unwind(pruned)
    vec = {e: f_pruned.vectors[i] for i, e in enumerate(pruned.edges)}
    _apply_chain(vec, chain)
    return Labeling.from_map(original, f_pruned.d, vec)


@dataclass
class ConstructionTrace(DecompositionTrace):
    d: int = 1
    l0: int = DEFAULT_L0
    phi_levels: int = field(default=0)

    @property
    def sequence(self) -> list[int]:
        """Forest sizes of the levels bounded by phi, then everything left over."""
        head = self.forest_sizes[: self.phi_levels]
        return head + [self.ell - sum(head)]

    def bound(self) -> float:
        seq = self.sequence
        return sum(phi(x, self.d) for x in seq[:-1]) + seq[-1]

    def to_dict(self) -> dict:
        out = super().to_dict()
        out.update(d=self.d, l0=self.l0, sequence=self.sequence, bound=self.bound())
        return out


def label_tree(tree: Tree, d: int, rng=None, l0: int = DEFAULT_L0) -> tuple[Labeling, ConstructionTrace]:
    """Random labeling built level by level from the star-forest recursion.

    Every level labels all of its forest edges jointly with antipodal pairs;
    the final single edge gets the first coordinate axis.  Levels whose forest
    has more than ``l0`` edges are charged phi(ell_F) in the trace bound, the
    rest are charged their size.
    """
    if tree.m < 1:
        raise TreeError("label_tree needs at least one edge")
    if l0 < 1:
        raise TreeError("l0 must be >= 1")
    gen = np.random.default_rng(rng)
    levels = recursive_decomposition(tree)
    vec: dict[Edge, np.ndarray] = {}
    for lvl in levels[:-1]:
        edges = lvl.decomposition.forest_edges
        for e, v in zip(edges, antipodal_vectors(len(edges), d, gen)):
            vec[e] = v
    base = np.zeros(d + 1)
    base[0] = 1.0
    vec[levels[-1].tree.edges[0]] = base
    for lvl in reversed(levels):
        _apply_chain(vec, lvl.chain)

    trace = DecompositionTrace.from_levels(levels)
    n_phi = 0
    for size in trace.forest_sizes:
        if size <= l0:
            break
        n_phi += 1
    out = ConstructionTrace(trace.ell, trace.levels, trace.base_leaves, d=d, l0=l0, phi_levels=n_phi)
    return Labeling.from_map(tree, d, vec), out
