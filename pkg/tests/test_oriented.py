import itertools

import pytest

from treedisc.oriented import (
    Orientation,
    RootedSubtree,
    agreement,
    extend_orientation,
    orient_star,
    orient_tree,
    oriented_discrepancy_bruteforce,
    oriented_eval,
    oriented_eval_bruteforce,
    oriented_values,
    star_tree,
)
from treedisc.tree_core import (
    ChainMismatch,
    SizeLimitExceeded,
    TreeError,
    from_edge_list,
    generate,
    num_leaves,
    prune_deg2_leaf_parents,
)

from conftest import connected_subsets_slow, random_trees


def naive_value(tree, sigma):
    """Independent oracle: every connected subset, every vertex of it as root, walk by BFS."""
    best = 0
    for subset in connected_subsets_slow(tree):
        if not subset:
            continue
        verts = sorted({x for i in subset for x in tree.edges[i]})
        for r in verts:
            total, seen, frontier = 0, {r}, [r]
            while frontier:
                v = frontier.pop()
                for i in subset:
                    a, b = tree.edges[i]
                    if v in (a, b):
                        w = b if v == a else a
                        if w not in seen:
                            seen.add(w)
                            frontier.append(w)
                            total += 1 if sigma.edges[i] == (v, w) else -1
            best = max(best, abs(total))
    return best


def random_orientation(tree, rng):
    return Orientation.from_signs(tree, rng.choice([-1, 1], size=tree.m))


class TestOrientation:
    def test_json_and_signs(self, rng):
        t = generate("random", 12, seed=1)
        s = random_orientation(t, rng)
        assert Orientation.from_dict(s.to_dict()) == s
        assert Orientation.from_signs(t, s.signs()) == s

    def test_check(self):
        t = generate("path", 3)
        with pytest.raises(ChainMismatch):
            Orientation(((0, 1),)).check(t)
        with pytest.raises(TreeError):
            Orientation(((0, 1), (0, 2))).check(t)


class TestAgreement:
    def test_lone_root(self):
        t = generate("path", 3)
        assert agreement(t, Orientation(((0, 1), (1, 2))), RootedSubtree(1, ())) == 0

    def test_path(self):
        t = generate("path", 3)
        sigma = Orientation(((0, 1), (1, 2)))
        assert agreement(t, sigma, RootedSubtree(0, (0, 1))) == 2
        assert agreement(t, sigma, RootedSubtree(2, (0, 1))) == -2
        assert agreement(t, sigma, RootedSubtree(1, (0, 1))) == 0

    def test_not_through_root(self):
        t = generate("path", 4)
        with pytest.raises(TreeError):
            agreement(t, Orientation(((0, 1), (1, 2), (2, 3))), RootedSubtree(0, (2,)))


class TestEval:
    def test_p3_in_out(self):
        # both edges point at the middle vertex, so rooting there gives |-2|
        t = generate("path", 3)
        sigma = Orientation(((0, 1), (2, 1)))
        assert oriented_eval(t, sigma)[0] == 2

    def test_single_edge(self):
        assert oriented_eval(generate("path", 2), Orientation(((1, 0),)))[0] == 1

    def test_star_all_out(self):
        t = generate("star", 5)
        sigma = Orientation(tuple((0, i) for i in range(1, 6)))
        val, wit = oriented_eval(t, sigma)
        assert val == 5 and wit.root == 0

    def test_methods_agree_with_oracle(self, rng):
        for t in random_trees(120, 2, 10, seed=2):
            sigma = random_orientation(t, rng)
            v1, wit = oriented_eval(t, sigma, "reroot")
            v2, _ = oriented_eval(t, sigma, "quadratic")
            assert v1 == v2 == naive_value(t, sigma) == oriented_eval_bruteforce(t, sigma)
            assert abs(agreement(t, sigma, wit)) == v1

    def test_per_root_values(self, rng):
        for t in random_trees(50, 2, 30, seed=3):
            sigma = random_orientation(t, rng)
            assert oriented_values(t, sigma, "reroot") == oriented_values(t, sigma, "quadratic")

    def test_reverse_symmetry(self, rng):
        for t in random_trees(50, 2, 40, seed=4):
            sigma = random_orientation(t, rng)
            assert oriented_eval(t, sigma)[0] == oriented_eval(t, sigma.reversed())[0]

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            oriented_eval(generate("path", 3), Orientation(((0, 1), (1, 2))), method="x")


class TestDiscrepancyOracle:
    @pytest.mark.parametrize("ell", range(2, 9))
    def test_star_tight(self, ell):
        assert oriented_discrepancy_bruteforce(generate("star", ell)) == (ell + 1) // 2 + 1

    def test_single_edge(self):
        assert oriented_discrepancy_bruteforce(generate("star", 1)) == 1

    def test_p3(self):
        assert oriented_discrepancy_bruteforce(generate("path", 3)) == 2

    def test_matches_naive_min(self):
        for t in random_trees(15, 2, 7, seed=5):
            naive = min(
                naive_value(t, Orientation.from_signs(t, s))
                for s in itertools.product([-1, 1], repeat=t.m)
            )
            assert oriented_discrepancy_bruteforce(t) == naive

    def test_cap(self):
        with pytest.raises(SizeLimitExceeded):
            oriented_discrepancy_bruteforce(generate("path", 30))


class TestConstructions:
    @pytest.mark.parametrize("ell", [2, 3, 4, 10, 100, 10_000])
    def test_orient_star(self, ell):
        assert oriented_eval(star_tree(ell), orient_star(ell))[0] == (ell + 1) // 2 + 1

    def test_extension_adds_at_most_one(self, rng):
        worst = 0
        for t in random_trees(200, 2, 14, seed=6):
            pruned, chain = prune_deg2_leaf_parents(t)
            sp = random_orientation(pruned, rng)
            s = extend_orientation(sp, chain, pruned)
            delta = oriented_eval(t, s)[0] - oriented_eval(pruned, sp)[0]
            assert 0 <= delta <= 1
            worst = max(worst, delta)
        assert worst == 1

    def test_extension_rule(self):
        t = generate("path", 3)
        pruned, chain = prune_deg2_leaf_parents(t)
        s = extend_orientation(Orientation(((2, 1),)), chain, pruned)
        assert s.edges == ((0, 1), (2, 1))

    def test_chain_vertices_simultaneous(self, rng):
        for t in random_trees(500, 2, 40, seed=11):
            pruned, chain = prune_deg2_leaf_parents(t)
            s = extend_orientation(random_orientation(pruned, rng), chain, pruned)
            for rec in chain:
                into_y = s.edges[t.index_of(rec.x, rec.y)][1] == rec.y
                assert into_y == (s.edges[t.index_of(rec.z, rec.y)][1] == rec.y)

    def test_path4_example(self):
        # a-b-c-d with a=2, b=3, c=1, d=0 so the smallest-leaf rule prunes down to a-b
        t = from_edge_list(4, [(2, 3), (3, 1), (1, 0)])
        pruned, chain = prune_deg2_leaf_parents(t)
        assert pruned.edges == ((2, 3),)
        s = extend_orientation(Orientation(((2, 3),)), chain, pruned)
        assert set(s.edges) == {(2, 3), (1, 3), (1, 0)}
        assert oriented_eval(t, s)[0] == 2

    def test_empty_chain_identity(self):
        t = generate("star", 4)
        sigma = orient_star(4)
        pruned, chain = prune_deg2_leaf_parents(t)
        assert len(chain) == 0 and extend_orientation(sigma, chain, pruned) == sigma

    def test_orient_tree_bounds(self):
        for t in random_trees(200, 2, 300, seed=7):
            sigma, tr = orient_tree(t)
            sigma.check(t)
            val = oriented_eval(t, sigma)[0]
            assert num_leaves(t) / 2 <= val <= tr.bound()
            assert sum(tr.sequence) == num_leaves(t)

    def test_orient_tree_small_sandwich(self):
        for t in random_trees(40, 4, 10, seed=8):
            sigma, tr = orient_tree(t)
            opt = oriented_discrepancy_bruteforce(t)
            ell = num_leaves(t)
            assert ell / 2 <= opt <= oriented_eval(t, sigma)[0] <= tr.bound()
            assert opt <= ell + 1

    def test_trace_json(self):
        _, tr = orient_tree(from_edge_list(5, [(0, 1), (0, 2), (0, 3), (3, 4)]))
        data = tr.to_dict()
        assert data["bound"] == tr.bound() and data["sequence"] == tr.sequence

    def test_deterministic(self):
        t = generate("random", 200, seed=9)
        assert orient_tree(t)[0] == orient_tree(t)[0]

    def test_invalid(self):
        with pytest.raises(TreeError):
            orient_star(0)
