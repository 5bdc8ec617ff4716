"""Max-norm connected-subtree sums for a fixed edge labeling.

Every evaluator returns an :class:`EvalResult` whose ``lower`` is the norm of
an actual connected edge set (the witness) and whose ``upper`` bounds the true
maximum.  The empty subtree counts, with sum zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import islice

import numpy as np

from treedisc.labeling import Labeling
from treedisc.sphere import EpsNet, sample_sphere
from treedisc.tree_core import (
    DEFAULT_ENUM_CAP,
    DimensionMismatch,
    NotConnected,
    Tree,
    TreeError,
    bfs_order,
    connected_edge_subsets,
    is_connected_subset,
)


@dataclass
class EvalResult:
    lower: float
    upper: float
    witness: tuple[int, ...]
    method: str
    info: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper if math.isfinite(self.upper) else None,
            "method": self.method,
            "witness": list(self.witness),
        }


def _vectors(f) -> np.ndarray:
    return f.vectors if isinstance(f, Labeling) else np.atleast_2d(np.asarray(f, dtype=float))


def _check(tree: Tree, F: np.ndarray) -> None:
    if len(F) != tree.m:
        raise DimensionMismatch(f"labeling has {len(F)} vectors for {tree.m} edges")


def subtree_sum(tree: Tree, f, subset) -> np.ndarray:
    F = _vectors(f)
    _check(tree, F)
    subset = list(subset)
    if not is_connected_subset(tree, subset):
        raise NotConnected(f"edge set {subset} is not connected")
    if not subset:
        return np.zeros(F.shape[1])
    return F[subset].sum(axis=0)


def eval_bruteforce(tree: Tree, f, max_edges: int = DEFAULT_ENUM_CAP, chunk: int = 4096) -> EvalResult:
    """Exact maximum by enumerating every connected edge subset."""
    F = _vectors(f)
    _check(tree, F)
    best, best_set = 0.0, ()
    it = connected_edge_subsets(tree, max_edges)
    while True:
        block = list(islice(it, chunk))
        if not block:
            break
        inc = np.zeros((len(block), tree.m))
        for r, s in enumerate(block):
            inc[r, list(s)] = 1.0
        norms = np.linalg.norm(inc @ F, axis=1)
        j = int(np.argmax(norms))
        if norms[j] > best:
            best, best_set = float(norms[j]), block[j]
    return EvalResult(best, best, tuple(best_set), "bruteforce")


# ------------------------------------------------------------ directional DP


class _Rooted:
    """Tree rooted at its smallest vertex, with per-vertex parent-edge indices."""

    def __init__(self, tree: Tree):
        order, parent = bfs_order(tree, tree.vertices[0])
        self.tree = tree
        self.order = order
        self.pos = {v: i for i, v in enumerate(order)}
        self.parent_pos = np.array([-1] + [self.pos[parent[v]] for v in order[1:]])
        self.parent_edge = np.array([-1] + [tree.index_of(v, parent[v]) for v in order[1:]])
        self.children: list[list[int]] = [[] for _ in order]
        for i in range(1, len(order)):
            self.children[self.parent_pos[i]].append(i)


def _dp_block(rt: _Rooted, W: np.ndarray) -> np.ndarray:
    """g[v] = sum over children c of max(0, w(vc) + g[c]) for a block of weight columns."""
    G = np.zeros((len(rt.order), W.shape[1]))
    for i in range(len(rt.order) - 1, 0, -1):
        G[rt.parent_pos[i]] += np.maximum(0.0, W[rt.parent_edge[i]] + G[i])
    return G


def _witness(rt: _Rooted, w: np.ndarray) -> tuple[float, tuple[int, ...]]:
    G = _dp_block(rt, w[:, None])[:, 0]
    top = int(np.argmax(G))
    if G[top] <= 0:
        return 0.0, ()
    edges, stack = [], [top]
    while stack:
        i = stack.pop()
        for c in rt.children[i]:
            e = rt.parent_edge[c]
            if w[e] + G[c] > 0:
                edges.append(int(e))
                stack.append(c)
    return float(G[top]), tuple(sorted(edges))


def max_weight_connected_subtree(tree: Tree, w) -> tuple[float, tuple[int, ...]]:
    """Heaviest connected edge set (possibly empty) for real edge weights ``w``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (tree.m,):
        raise DimensionMismatch(f"need {tree.m} weights, got shape {w.shape}")
    if tree.m == 0:
        return 0.0, ()
    return _witness(_Rooted(tree), w)


def directional_maxima(tree: Tree, F: np.ndarray, directions: np.ndarray, block: int = 0) -> np.ndarray:
    """max over connected S of <a, sum_S f> for every row a of ``directions``."""
    rt = _Rooted(tree)
    K = len(directions)
    if not block:
        block = max(1, min(K, 4_000_000 // max(1, tree.n)))
    out = np.empty(K)
    for s in range(0, K, block):
        W = F @ directions[s:s + block].T
        out[s:s + block] = _dp_block(rt, W).max(axis=0)
    return out


def eval_certified(tree: Tree, f, net: EpsNet, slack: str = "lipschitz") -> EvalResult:
    """Interval from directional DP over an eps-net.

    ``lower`` is the norm of the best direction's witness (never below the
    directional maximum h).  ``upper`` depends on ``slack``:

    * ``"lipschitz"``: h + eps * |E|, since each edge weight moves by at most eps;
    * ``"angular"``: h / (1 - eps^2 / 2), since the optimal direction is within
      eps of a net point and the objective there is the optimum times a cosine;
    * ``"best"``: the smaller of the two.

    Both bounds are valid when the net covers the sphere at radius eps.
    """
    F = _vectors(f)
    _check(tree, F)
    if net.d != F.shape[1] - 1:
        raise DimensionMismatch(f"net lives on S^{net.d}, labels on S^{F.shape[1] - 1}")
    if slack not in ("lipschitz", "angular", "best"):
        raise ValueError(f"unknown slack rule {slack!r}")
    vals = directional_maxima(tree, F, net.points)
    k = int(np.argmax(vals))
    h = float(vals[k])
    _, wit = _witness(_Rooted(tree), F @ net.points[k])
    lower = float(np.linalg.norm(F[list(wit)].sum(axis=0))) if wit else 0.0
    lip = h + net.eps * tree.m
    ang = h / (1.0 - net.eps ** 2 / 2.0) if net.eps ** 2 < 2.0 else math.inf
    upper = {"lipschitz": lip, "angular": ang, "best": min(lip, ang)}[slack]
    upper = max(upper, lower)
    info = {"eps": net.eps, "directional_max": h, "direction_index": k, "net_size": len(net), "slack": slack}
    return EvalResult(lower, upper, wit, f"net({net.eps:g})", info)


def eval_local_ascent(tree: Tree, f, starts: int = 8, rng=None, max_iter: int = 100) -> EvalResult:
    """Alternate best-subtree-for-direction and direction-of-subtree-sum from random starts."""
    F = _vectors(f)
    _check(tree, F)
    d = F.shape[1] - 1
    if d < 1:
        raise DimensionMismatch("local ascent needs d >= 1")
    gen = np.random.default_rng(rng)
    rt = _Rooted(tree)
    best, best_set, histories = 0.0, (), []
    for _ in range(starts):
        a = sample_sphere(d, gen)
        seen, hist = set(), []
        for _ in range(max_iter):
            _, wit = _witness(rt, F @ a)
            if not wit or wit in seen:
                break
            seen.add(wit)
            v = F[list(wit)].sum(axis=0)
            val = float(np.linalg.norm(v))
            hist.append(val)
            if val > best:
                best, best_set = val, wit
            if val == 0:
                break
            a = v / val
        histories.append(hist)
    return EvalResult(best, math.inf, best_set, "local-ascent", {"histories": histories})


# ------------------------------------------------------------- circle stars


def _star_center(tree: Tree) -> int:
    for v in tree.vertices:
        if tree.degree(v) == tree.m:
            return v
    raise TreeError("tree is not a star")


def eval_star_circle_exact(tree: Tree, f) -> EvalResult:
    """Exact value for a star labeled on the circle S^1, by an angular sweep.

    The maximum over subsets equals the maximum over directions a of
    sum_i max(0, <a, y_i>).  Label i is active on an open half-circle; between
    consecutive half-circle endpoints the active set is fixed, and the largest
    active-set norm over all arcs is the answer.
    """
    F = _vectors(f)
    _check(tree, F)
    if F.shape[1] != 2:
        raise DimensionMismatch("circle sweep needs labels on S^1 (d = 1)")
    _star_center(tree)
    ell = len(F)
    two_pi = 2.0 * math.pi
    th = np.arctan2(F[:, 1], F[:, 0])
    ang = np.concatenate([(th - math.pi / 2) % two_pi, (th + math.pi / 2) % two_pi])
    order = np.argsort(ang, kind="stable")
    rank = np.empty(2 * ell, dtype=np.int64)
    rank[order] = np.arange(2 * ell)
    r_in, r_out = rank[:ell], rank[ell:]
    # just before the first event, label i is active iff its exit comes before its entry
    init = r_out < r_in
    sign = np.concatenate([np.ones(ell), -np.ones(ell)])
    idx = np.concatenate([np.arange(ell), np.arange(ell)])
    steps = sign[order, None] * F[idx[order]]
    sums = F[init].sum(axis=0) + np.cumsum(steps, axis=0)
    norms = np.linalg.norm(sums, axis=1)
    j = int(np.argmax(norms))
    if np.linalg.norm(F[init].sum(axis=0)) >= norms[j]:
        member = init
    else:
        flips = (r_in <= j).astype(int) + (r_out <= j).astype(int)
        member = init ^ (flips % 2 == 1)
    wit = tuple(int(i) for i in np.flatnonzero(member))
    val = float(np.linalg.norm(F[list(wit)].sum(axis=0))) if wit else 0.0
    return EvalResult(val, val, wit, "circle-star")
