"""Labeled trees: construction, generators, pruning and the star-forest decomposition.

Vertices are integers and edges are stored as sorted pairs ``(u, v)`` with
``u < v``; the edge tuple itself is sorted lexicographically and that order is
the *canonical edge order* every per-edge array in the package is aligned to.
Trees built from user input use vertices ``0..n-1``.  Subtrees produced by
pruning or decomposition keep the vertex ids of the tree they came from.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

Edge = tuple[int, int]


class InputError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class TreeError(InputError):
    pass


class NotConnected(TreeError):
    pass


class HasCycle(TreeError):
    pass


class SelfLoop(TreeError):
    pass


class DuplicateEdge(TreeError):
    pass


class OutOfRange(TreeError):
    pass


class PreconditionViolated(TreeError):
    pass


class SizeLimitExceeded(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ChainMismatch(TreeError):
    pass


def _canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Tree:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for v in adj:
            adj[v].sort()
        return adj

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def index_of(self, u: int, v: int) -> int:
        return self.edge_index[_canon(u, v)]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def edge_neighbors(self) -> list[list[int]]:
        """Line-graph adjacency: edges sharing an endpoint with edge ``i``."""
        out = []
        for i, (u, v) in enumerate(self.edges):
            nb = {self.index_of(u, w) for w in self.adj[u] if w != v}
            nb |= {self.index_of(v, w) for w in self.adj[v] if w != u}
            out.append(sorted(nb))
        return out

    def is_star(self) -> bool:
        return self.n >= 2 and any(self.degree(v) == self.m for v in self.vertices)

    @classmethod
    def from_edges(cls, edges: Sequence[Sequence[int]]) -> "Tree":
        """Tree on the vertices spanned by ``edges`` (labels are kept as given)."""
        if not edges:
            raise NotConnected("an edge-induced tree needs at least one edge")
        verts = sorted({int(x) for e in edges for x in e})
        return _validated(verts, edges)

    def relabeled(self) -> tuple["Tree", dict[int, int]]:
        """Compact copy on ``0..n-1`` plus the old-to-new vertex map."""
        mp = {v: i for i, v in enumerate(self.vertices)}
        return _validated(range(self.n), [(mp[u], mp[v]) for u, v in self.edges]), mp

    def to_dict(self) -> dict:
        out = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.vertices != tuple(range(self.n)):
            out["vertices"] = list(self.vertices)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        if "vertices" in data:
            return _validated(data["vertices"], data["edges"])
        return from_edge_list(data["n"], data["edges"])


def _validated(verts: Sequence[int], pairs: Sequence[Sequence[int]]) -> Tree:
    verts = [int(v) for v in verts]
    vset = set(verts)
    seen: set[Edge] = set()
    parent = {v: v for v in verts}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for pair in pairs:
        if len(pair) != 2:
            raise TreeError(f"edge {pair!r} is not a vertex pair")
        u, v = int(pair[0]), int(pair[1])
        if u not in vset or v not in vset:
            raise OutOfRange(f"edge ({u}, {v}) has an endpoint outside the vertex set")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        e = _canon(u, v)
        if e in seen:
            raise DuplicateEdge(f"edge {e} listed twice")
        seen.add(e)
        ru, rv = find(u), find(v)
        if ru == rv:
            raise HasCycle(f"edge {e} closes a cycle")
        parent[ru] = rv
    if len(seen) != len(verts) - 1:
        raise NotConnected(f"{len(verts)} vertices but only {len(seen)} edges")
    return Tree(tuple(sorted(verts)), tuple(sorted(seen)))


def from_edge_list(n: int, pairs: Sequence[Sequence[int]]) -> Tree:
    """Validate ``pairs`` as the edge list of a tree on vertices ``0..n-1``."""
    if n < 1:
        raise TreeError("a tree needs at least one vertex")
    return _validated(range(n), pairs)


# --------------------------------------------------------------------- Prüfer


def prufer_decode(seq: Sequence[int]) -> Tree:
    n = len(seq) + 2
    for x in seq:
        if not 0 <= x < n:
            raise OutOfRange(f"Prüfer entry {x} outside 0..{n - 1}")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(heap)
    edges = []
    for x in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, int(x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(heap, int(x))
    u, v = heapq.heappop(heap), heapq.heappop(heap)
    edges.append((u, v))
    return from_edge_list(n, edges)


def prufer_encode(tree: Tree) -> list[int]:
    if tree.vertices != tuple(range(tree.n)):
        raise TreeError("Prüfer encoding needs vertices 0..n-1")
    degree = {v: tree.degree(v) for v in tree.vertices}
    removed = set()
    heap = [v for v in tree.vertices if degree[v] == 1]
    heapq.heapify(heap)
    seq = []
    for _ in range(tree.n - 2):
        leaf = heapq.heappop(heap)
        removed.add(leaf)
        nb = next(w for w in tree.adj[leaf] if w not in removed)
        seq.append(nb)
        degree[nb] -= 1
        if degree[nb] == 1:
            heapq.heappush(heap, nb)
    return seq


# ----------------------------------------------------------------- generators


def generate(kind: str, *sizes: int, seed: int | None = None) -> Tree:
    """Build a test tree.

    ``star(l)``, ``path(n)``, ``caterpillar(spine, legs)``,
    ``spider(legs, length)``, ``broom(handle, bristles)`` and ``random(n)``.
    The random family decodes a uniformly drawn Prüfer sequence, so it is a
    uniform labeled tree and fully determined by ``seed``.
    """
    if not sizes or any(int(s) < 1 for s in sizes):
        raise TreeError(f"{kind}: size parameters must be >= 1, got {sizes}")
    sizes = tuple(int(s) for s in sizes)
    if kind == "star":
        (l,) = sizes
        return from_edge_list(l + 1, [(0, i) for i in range(1, l + 1)])
    if kind == "path":
        (n,) = sizes
        return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "caterpillar":
        spine, legs = sizes
        edges = [(i, i + 1) for i in range(spine - 1)]
        nxt = spine
        for i in range(spine):
            for _ in range(legs):
                edges.append((i, nxt))
                nxt += 1
        return from_edge_list(nxt, edges)
    if kind == "spider":
        legs, length = sizes
        edges, nxt = [], 1
        for _ in range(legs):
            prev = 0
            for _ in range(length):
                edges.append((prev, nxt))
                prev, nxt = nxt, nxt + 1
        return from_edge_list(nxt, edges)
    if kind == "broom":
        handle, bristles = sizes
        edges = [(i, i + 1) for i in range(handle - 1)]
        edges += [(handle - 1, handle + j) for j in range(bristles)]
        return from_edge_list(handle + bristles, edges)
    if kind == "random":
        (n,) = sizes
        if n == 1:
            return from_edge_list(1, [])
        rng = np.random.default_rng(seed)
        return prufer_decode([int(x) for x in rng.integers(0, n, size=n - 2)])
    raise TreeError(f"unknown tree kind {kind!r}")


# ------------------------------------------------------------ leaf structure


def leaves(tree: Tree) -> set[int]:
    return {v for v in tree.vertices if tree.degree(v) == 1}


def leaf_parents(tree: Tree) -> set[int]:
    """The set P: vertices with at least one leaf neighbour."""
    lv = leaves(tree)
    return {v for v in tree.vertices if any(w in lv for w in tree.adj[v])}


def num_leaves(tree: Tree) -> int:
    return sum(1 for v in tree.vertices if tree.degree(v) == 1)


# ------------------------------------------------------------------- pruning


@dataclass(frozen=True)
class PruneRecord:
    x: int  # removed leaf
    y: int  # its degree-2 neighbour at removal time
    z: int  # the other neighbour of y

    @property
    def edge(self) -> Edge:
        return _canon(self.x, self.y)

    @property
    def anchor_edge(self) -> Edge:
        return _canon(self.y, self.z)


@dataclass(frozen=True)
class PruneChain:
    records: tuple[PruneRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PruneRecord]:
        return iter(self.records)

    def to_list(self) -> list[dict]:
        return [{"x": r.x, "y": r.y, "z": r.z} for r in self.records]

    @classmethod
    def from_list(cls, data: list[dict]) -> "PruneChain":
        return cls(tuple(PruneRecord(int(r["x"]), int(r["y"]), int(r["z"])) for r in data))

    def replay(self, original: Tree) -> Tree:
        """Apply the removals to ``original``, checking each one is legal."""
        adj = {v: set(ws) for v, ws in original.adj.items()}
        for r in self.records:
            if r.y not in adj.get(r.x, ()) or len(adj[r.x]) != 1:
                raise ChainMismatch(f"{r.x} is not a leaf hanging off {r.y}")
            if adj[r.y] != {r.x, r.z}:
                raise ChainMismatch(f"{r.y} does not have degree 2 with neighbours {r.x}, {r.z}")
            adj[r.y].discard(r.x)
            del adj[r.x]
        edges = {_canon(u, v) for u, ws in adj.items() for v in ws}
        return Tree.from_edges(sorted(edges))

    def unwind(self, pruned: Tree) -> Tree:
        """Reattach the removed edges in reverse order, recovering the original tree."""
        edges = set(pruned.edges)
        present = set(pruned.vertices)
        for r in reversed(self.records):
            if r.x in present or r.y not in present or r.anchor_edge not in edges:
                raise ChainMismatch(f"cannot reattach {r.edge} at {r.y}")
            edges.add(r.edge)
            present.add(r.x)
        return Tree.from_edges(sorted(edges))


def prune_deg2_leaf_parents(tree: Tree) -> tuple[Tree, PruneChain]:
    """Repeatedly delete a leaf whose neighbour has degree 2.

    Among eligible leaves the smallest vertex id goes first.  Stops when no
    leaf is eligible or a single edge is left.
    """
    if tree.m <= 1:
        return tree, PruneChain()
    adj = {v: set(ws) for v, ws in tree.adj.items()}
    remaining = tree.m

    def eligible(x: int) -> bool:
        if len(adj.get(x, ())) != 1:
            return False
        (y,) = adj[x]
        return len(adj[y]) == 2

    heap = [x for x in tree.vertices if eligible(x)]
    heapq.heapify(heap)
    records = []
    while heap and remaining > 1:
        x = heapq.heappop(heap)
        if not eligible(x):
            continue
        (y,) = adj[x]
        (z,) = adj[y] - {x}
        records.append(PruneRecord(x, y, z))
        adj[y].discard(x)
        del adj[x]
        remaining -= 1
        if eligible(y):
            heapq.heappush(heap, y)
    edges = sorted({_canon(u, v) for u, ws in adj.items() for v in ws})
    return Tree.from_edges(edges), PruneChain(tuple(records))


def terminal_paths(tree: Tree) -> list[list[int]]:
    """Maximal paths through degree-2 vertices ending at a leaf.

    Each path is a vertex list starting at its anchor (a vertex of degree at
    least 3) and ending at the leaf.  A bare path has no anchor and is
    returned as one canonical entry: the whole path, walked from its smaller
    leaf to its larger one.
    """
    if tree.m == 0:
        return []
    if all(tree.degree(v) <= 2 for v in tree.vertices):
        start = min(leaves(tree))
        order = [start]
        prev = None
        while len(order) < tree.n:
            nxt = next(w for w in tree.adj[order[-1]] if w != prev)
            prev = order[-1]
            order.append(nxt)
        return [order]
    paths = []
    for leaf in sorted(leaves(tree)):
        walk = [leaf]
        prev, cur = leaf, tree.adj[leaf][0]
        while tree.degree(cur) == 2:
            walk.append(cur)
            prev, cur = cur, next(w for w in tree.adj[cur] if w != prev)
        walk.append(cur)
        paths.append(walk[::-1])
    paths.sort(key=lambda p: (p[0], p[-1]))
    return paths


# ------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class StarComponent:
    center: int
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class Decomposition:
    """Split of a pruned tree into a star forest F and a residual tree R.

    ``ell_R`` counts leaves of the original tree whose edge stayed in R (the
    kept edges).  This is the number of leaves of R except when the input is a
    star, where R is a single edge.
    """

    star_forest: tuple[StarComponent, ...]
    residual: Tree
    kept_edges: dict[int, Edge] = field(default_factory=dict)
    ell_F: int = 0
    ell_R: int = 0

    @property
    def forest_edges(self) -> list[Edge]:
        return sorted(e for c in self.star_forest for e in c.edges)


def decompose_star_forest(tree: Tree) -> Decomposition:
    if tree.n < 3:
        raise PreconditionViolated("decomposition needs at least 3 vertices")
    lv = leaves(tree)
    for x in sorted(lv):
        p = tree.adj[x][0]
        if tree.degree(p) == 2:
            raise PreconditionViolated(f"leaf {x} hangs off degree-2 vertex {p}; prune first")
    forest, kept = [], {}
    forest_set: set[Edge] = set()
    for p in sorted(leaf_parents(tree)):
        I_p = sorted(_canon(p, x) for x in tree.adj[p] if x in lv)
        non_leaf = tree.degree(p) - len(I_p)
        if non_leaf >= 2:
            to_forest = I_p
        else:
            kept[p] = I_p[0]
            to_forest = I_p[1:]
        forest.append(StarComponent(p, tuple(to_forest)))
        forest_set.update(to_forest)
    residual = Tree.from_edges([e for e in tree.edges if e not in forest_set])
    return Decomposition(tuple(forest), residual, kept, len(forest_set), len(kept))


# ------------------------------------------------------- subtree enumeration

DEFAULT_ENUM_CAP = 24


def connected_edge_subsets(tree: Tree, max_edges: int = DEFAULT_ENUM_CAP) -> Iterator[tuple[int, ...]]:
    """Every connected edge subset exactly once, as sorted edge-index tuples.

    The empty subset comes first.  Nonempty subsets are the connected induced
    subgraphs of the line graph, enumerated with the ESU scheme (each subset
    is grown only from its smallest edge index).
    """
    if tree.m > max_edges:
        raise SizeLimitExceeded(f"{tree.m} edges exceeds enumeration cap {max_edges}")
    yield ()
    nbrs = tree.edge_neighbors

    def extend(sub: list[int], closed: set[int], ext: list[int], root: int):
        yield tuple(sorted(sub))
        ext = list(ext)
        while ext:
            w = ext.pop()
            new = [u for u in nbrs[w] if u > root and u not in closed]
            yield from extend(sub + [w], closed | set(new), ext + new, root)

    for root in range(tree.m):
        ext = [u for u in nbrs[root] if u > root]
        yield from extend([root], {root, *nbrs[root]}, ext, root)


def bfs_order(tree: Tree, root: int) -> tuple[list[int], dict[int, int | None]]:
    """Vertices in BFS order from ``root`` and the parent map."""
    parent: dict[int, int | None] = {root: None}
    order = [root]
    q = deque([root])
    while q:
        v = q.popleft()
        for w in tree.adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
                q.append(w)
    return order, parent


def is_connected_subset(tree: Tree, subset: Sequence[int]) -> bool:
    if len(subset) <= 1:
        return True
    chosen = set(subset)
    start = subset[0]
    seen, stack = {start}, [start]
    nbrs = tree.edge_neighbors
    while stack:
        i = stack.pop()
        for j in nbrs[i]:
            if j in chosen and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(chosen)


# ----------------------------------------------------------------- recursion


@dataclass(frozen=True)
class RecursionLevel:
    chain: PruneChain  # pruning applied to this level's input tree
    tree: Tree  # the pruned tree
    decomposition: Decomposition | None  # None at the single-edge base
    leaves: int  # leaves of the input tree accounted to this level


def recursive_decomposition(tree: Tree) -> list[RecursionLevel]:
    """Prune, split off the star forest, recurse on the residual; last level is one edge.

    For the first level ``leaves`` is the leaf count of ``tree``; deeper levels
    inherit ``ell_R`` of the level above, so the forest sizes plus the base
    count add up to the leaf count of ``tree``.
    """
    if tree.m < 1:
        raise TreeError("recursion needs at least one edge")
    levels = []
    current, acc = tree, num_leaves(tree)
    while True:
        pruned, chain = prune_deg2_leaf_parents(current)
        if pruned.m == 1:
            levels.append(RecursionLevel(chain, pruned, None, acc))
            return levels
        dec = decompose_star_forest(pruned)
        levels.append(RecursionLevel(chain, pruned, dec, acc))
        current, acc = dec.residual, dec.ell_R


@dataclass
class DecompositionTrace:
    """Per-level accounting of a recursive decomposition."""

    ell: int
    levels: list[dict]
    base_leaves: int

    @classmethod
    def from_levels(cls, levels: list[RecursionLevel]) -> "DecompositionTrace":
        rows = []
        for lvl in levels[:-1]:
            dec = lvl.decomposition
            rows.append(
                {
                    "leaves": lvl.leaves,
                    "ell_F": dec.ell_F,
                    "ell_R": dec.ell_R,
                    "components": len(dec.star_forest),
                    "chain_length": len(lvl.chain),
                }
            )
        return cls(levels[0].leaves, rows, levels[-1].leaves)

    @property
    def leaf_counts(self) -> list[int]:
        return [row["leaves"] for row in self.levels] + [self.base_leaves]

    @property
    def forest_sizes(self) -> list[int]:
        return [row["ell_F"] for row in self.levels]

    def to_dict(self) -> dict:
        return {"ell": self.ell, "levels": self.levels, "base_leaves": self.base_leaves}
