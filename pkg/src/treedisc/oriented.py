"""Oriented discrepancy: orientations, exact evaluation, oracles and constructions.

An orientation is stored as a ``(tail, head)`` pair per edge in canonical
order.  Internally it is a sign vector: ``+1`` when the edge points from its
smaller to its larger endpoint, ``-1`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import islice

import numpy as np

from treedisc.tree_core import (
    ChainMismatch,
    DecompositionTrace,
    Edge,
    PruneChain,
    SizeLimitExceeded,
    Tree,
    TreeError,
    bfs_order,
    connected_edge_subsets,
    generate,
    recursive_decomposition,
)


@dataclass(frozen=True)
class Orientation:
    edges: tuple[Edge, ...]  # (tail, head), aligned to the tree's canonical edge order

    def signs(self) -> np.ndarray:
        return np.array([1 if t < h else -1 for t, h in self.edges], dtype=np.int64)

    @classmethod
    def from_signs(cls, tree: Tree, signs) -> "Orientation":
        return cls(tuple((u, v) if s > 0 else (v, u) for (u, v), s in zip(tree.edges, signs)))

    @classmethod
    def from_map(cls, tree: Tree, heads: dict[Edge, Edge]) -> "Orientation":
        return cls(tuple(heads[e] for e in tree.edges))

    def reversed(self) -> "Orientation":
        return Orientation(tuple((h, t) for t, h in self.edges))

    def check(self, tree: Tree) -> None:
        if len(self.edges) != tree.m:
            raise ChainMismatch(f"orientation has {len(self.edges)} edges, tree has {tree.m}")
        for (t, h), e in zip(self.edges, tree.edges):
            if tuple(sorted((t, h))) != e:
                raise TreeError(f"oriented pair {(t, h)} does not match edge {e}")

    def to_dict(self) -> dict:
        return {"edges": [list(p) for p in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "Orientation":
        return cls(tuple((int(t), int(h)) for t, h in data["edges"]))


@dataclass(frozen=True)
class RootedSubtree:
    root: int
    edges: tuple[int, ...]  # edge indices; empty means the lone root vertex


def agreement(tree: Tree, sigma: Orientation, rooted: RootedSubtree) -> int:
    """Sum over the subtree of +1 where sigma points away from the root, -1 otherwise."""
    chosen = set(rooted.edges)
    if not chosen:
        if rooted.root not in tree.adj:
            raise TreeError(f"root {rooted.root} is not a vertex")
        return 0
    total, seen, stack = 0, {rooted.root}, [rooted.root]
    used = 0
    while stack:
        v = stack.pop()
        for w in tree.adj.get(v, ()):
            i = tree.index_of(v, w)
            if i in chosen and w not in seen:
                seen.add(w)
                stack.append(w)
                used += 1
                total += 1 if sigma.edges[i] == (v, w) else -1
    if used != len(chosen):
        raise TreeError("rooted subtree is not connected through its root")
    return total


# ------------------------------------------------------------------ DP core


def _away_weight(tree: Tree, parent: int, child: int, signs):
    """+-1 weight of edge parent->child: +1 when the orientation agrees."""
    i = tree.index_of(parent, child)
    return signs[i] if parent < child else -signs[i]


def _rooted_dp(tree: Tree, root: int, signs):
    """Max-sum and min-sum rooted-subtree values at ``root`` (signs may be batched)."""
    order, parent = bfs_order(tree, root)
    zero = signs[0] * 0 if len(signs) else 0
    gmax = {v: zero for v in order}
    gmin = {v: zero for v in order}
    for v in reversed(order[1:]):
        p = parent[v]
        w = _away_weight(tree, p, v, signs)
        gmax[p] = gmax[p] + np.maximum(0, w + gmax[v])
        gmin[p] = gmin[p] + np.minimum(0, w + gmin[v])
    return gmax, gmin, order, parent


def _values_quadratic(tree: Tree, signs) -> dict[int, object]:
    out = {}
    for r in tree.vertices:
        gmax, gmin, _, _ = _rooted_dp(tree, r, signs)
        out[r] = np.maximum(gmax[r], -gmin[r])
    return out


def _values_reroot(tree: Tree, signs) -> dict[int, object]:
    root = tree.vertices[0]
    dmax, dmin, order, parent = _rooted_dp(tree, root, signs)
    fmax, fmin = {root: dmax[root]}, {root: dmin[root]}
    for v in order[1:]:
        p = parent[v]
        w = _away_weight(tree, p, v, signs)
        rest_max = fmax[p] - np.maximum(0, w + dmax[v])
        rest_min = fmin[p] - np.minimum(0, w + dmin[v])
        fmax[v] = dmax[v] + np.maximum(0, -w + rest_max)
        fmin[v] = dmin[v] + np.minimum(0, -w + rest_min)
    return {v: np.maximum(fmax[v], -fmin[v]) for v in tree.vertices}


def _witness_at(tree: Tree, root: int, signs) -> RootedSubtree:
    gmax, gmin, order, parent = _rooted_dp(tree, root, signs)
    use_max = gmax[root] >= -gmin[root]
    g = gmax if use_max else gmin
    edges, stack = [], [root]
    while stack:
        v = stack.pop()
        for c in tree.adj[v]:
            if parent.get(c) != v:
                continue
            val = _away_weight(tree, v, c, signs) + g[c]
            if (val > 0) if use_max else (val < 0):
                edges.append(tree.index_of(v, c))
                stack.append(c)
    return RootedSubtree(root, tuple(sorted(edges)))


def oriented_eval(tree: Tree, sigma: Orientation, method: str = "reroot") -> tuple[int, RootedSubtree]:
    """Exact max |agreement| over rooted subtrees.

    ``"quadratic"`` runs the two clamped DPs from every root; ``"reroot"``
    gets all roots from one DP plus a top-down pass.  Both are integer-exact.
    """
    sigma.check(tree)
    if tree.m == 0:
        return 0, RootedSubtree(tree.vertices[0], ())
    signs = [int(s) for s in sigma.signs()]
    if method == "reroot":
        vals = _values_reroot(tree, signs)
    elif method == "quadratic":
        vals = _values_quadratic(tree, signs)
    else:
        raise ValueError(f"unknown method {method!r}")
    best_root = max(tree.vertices, key=lambda v: (vals[v], -v))
    return int(vals[best_root]), _witness_at(tree, best_root, signs)


def oriented_values(tree: Tree, sigma: Orientation, method: str = "reroot") -> dict[int, int]:
    """Per-root maximum |agreement|."""
    sigma.check(tree)
    signs = [int(s) for s in sigma.signs()]
    fn = _values_reroot if method == "reroot" else _values_quadratic
    return {v: int(x) for v, x in fn(tree, signs).items()}


# ------------------------------------------------------------------- oracles


def oriented_eval_bruteforce(tree: Tree, sigma: Orientation, max_edges: int = 20) -> int:
    """Max |agreement| over every (root, connected edge set containing the root)."""
    if tree.m > max_edges:
        raise SizeLimitExceeded(f"{tree.m} edges exceeds oracle cap {max_edges}")
    sigma.check(tree)
    best = 0
    for subset in connected_edge_subsets(tree, max_edges):
        if not subset:
            continue
        verts = {x for i in subset for x in tree.edges[i]}
        for r in verts:
            best = max(best, abs(agreement(tree, sigma, RootedSubtree(r, subset))))
    return best


def oriented_discrepancy_bruteforce(tree: Tree, max_edges: int = 16, chunk: int = 8192) -> int:
    """Minimum over all 2^|E| orientations of :func:`oriented_eval`."""
    if tree.m > max_edges:
        raise SizeLimitExceeded(f"{tree.m} edges exceeds oracle cap {max_edges}")
    if tree.m == 0:
        return 0
    m = tree.m
    best = math.inf
    codes = iter(range(2 ** m))
    bits = np.arange(m, dtype=np.int64)
    while True:
        block = np.fromiter(islice(codes, chunk), dtype=np.int64)
        if not len(block):
            break
        signs = (((block[:, None] >> bits) & 1) * 2 - 1).T  # (m, K)
        vals = _values_reroot(tree, list(signs))
        per_orientation = np.max(np.stack([vals[v] for v in tree.vertices]), axis=0)
        best = min(best, int(per_orientation.min()))
    return int(best)


# ------------------------------------------------------------- constructions


def orient_star(ell: int) -> Orientation:
    """First ceil(ell/2) edges of ``generate("star", ell)`` point at the centre, the rest away."""
    if ell < 1:
        raise TreeError("orient_star needs ell >= 1")
    inward = (ell + 1) // 2
    return Orientation(tuple((i, 0) if i <= inward else (0, i) for i in range(1, ell + 1)))


def _apply_chain(heads: dict[Edge, Edge], chain: PruneChain) -> None:
    for rec in reversed(chain.records):
        anchor = heads.get(rec.anchor_edge)
        if anchor is None:
            raise ChainMismatch(f"edge {rec.anchor_edge} has no orientation to extend from")
        # xy points at y exactly when zy points at y
        heads[rec.edge] = (rec.x, rec.y) if anchor[1] == rec.y else (rec.y, rec.x)


def extend_orientation(sigma_pruned: Orientation, chain: PruneChain, pruned: Tree) -> Orientation:
    sigma_pruned.check(pruned)
    original = chain.unwind(pruned)
    heads = dict(zip(pruned.edges, sigma_pruned.edges))
    _apply_chain(heads, chain)
    return Orientation.from_map(original, heads)


@dataclass
class OrientationTrace(DecompositionTrace):
    @property
    def sequence(self) -> list[int]:
        return self.forest_sizes + [self.base_leaves]

    def bound(self) -> int:
        return sum((x + 1) // 2 + 2 for x in self.sequence)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out.update(sequence=self.sequence, bound=self.bound())
        return out


def orient_tree(tree: Tree) -> tuple[Orientation, OrientationTrace]:
    """Orientation from the star-forest recursion.

    Each level's forest edges, taken together in canonical order, send the
    first half (rounded up) toward their star centre and the rest away.  The
    final single edge points from its smaller to its larger endpoint.
    """
    if tree.m < 1:
        raise TreeError("orient_tree needs at least one edge")
    levels = recursive_decomposition(tree)
    heads: dict[Edge, Edge] = {}
    for lvl in levels[:-1]:
        centre_of = {e: c.center for c in lvl.decomposition.star_forest for e in c.edges}
        edges = lvl.decomposition.forest_edges
        inward = (len(edges) + 1) // 2
        for k, e in enumerate(edges):
            c = centre_of[e]
            leaf = e[0] if e[1] == c else e[1]
            heads[e] = (leaf, c) if k < inward else (c, leaf)
    heads[levels[-1].tree.edges[0]] = levels[-1].tree.edges[0]
    for lvl in reversed(levels):
        _apply_chain(heads, lvl.chain)
    t = DecompositionTrace.from_levels(levels)
    return Orientation.from_map(tree, heads), OrientationTrace(t.ell, t.levels, t.base_leaves)


def star_tree(ell: int) -> Tree:
    """The tree :func:`orient_star` is aligned to."""
    return generate("star", ell)
