import itertools

import numpy as np
import pytest

from treedisc.tree_core import Tree, generate


def random_trees(count, n_min, n_max, seed):
    """``count`` uniform random trees with vertex counts in [n_min, n_max]."""
    rng = np.random.default_rng(seed)
    for k in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        yield generate("random", n, seed=int(rng.integers(2**31)))


def connected_subsets_slow(tree: Tree):
    """All connected edge subsets by filtering the full power set (independent oracle)."""
    out = [()]
    for r in range(1, tree.m + 1):
        for subset in itertools.combinations(range(tree.m), r):
            verts = {}
            parent = {}

            def find(a):
                while parent[a] != a:
                    a = parent[a]
                return a

            for i in subset:
                for x in tree.edges[i]:
                    parent.setdefault(x, x)
                    verts[x] = True
            for i in subset:
                u, v = tree.edges[i]
                parent[find(u)] = find(v)
            if len({find(x) for x in verts}) == 1:
                out.append(subset)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], key, props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(lines, key=lambda t: int(t[0].split()[0])):
        mark = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] criterion {name} {detail}".rstrip())
