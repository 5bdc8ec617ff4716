"""Unit-sphere sampling, epsilon-nets, Beta-function constants and the simplex bridge.

A point of S^d lives in R^(d+1).  Distances between sphere points are chordal
(Euclidean in the ambient space).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _rng(rng) -> np.random.Generator:
    return np.random.default_rng(rng)


def sample_sphere(d: int, rng=None) -> np.ndarray:
    """One uniform point on S^d."""
    return sample_sphere_many(d, 1, rng)[0]


def sample_sphere_many(d: int, k: int, rng=None) -> np.ndarray:
    """``k`` uniform points on S^d as a ``(k, d+1)`` array (normalized Gaussians)."""
    if d < 0:
        raise ValueError("sphere dimension must be >= 0")
    g = _rng(rng).standard_normal((k, d + 1))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # exact zeros have probability zero; guard anyway
    while np.any(norms == 0):
        bad = (norms == 0).ravel()
        g[bad] = _rng(rng).standard_normal((int(bad.sum()), d + 1))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return g / norms


# ------------------------------------------------------------------ constants


def beta_half(d: int) -> float:
    """B(d/2, 1/2) by the recurrence B(z+1, 1/2) = B(z, 1/2) * z / (z + 1/2)."""
    if d < 1:
        raise ValueError("beta_half needs d >= 1")
    if d % 2:
        z, b = 0.5, math.pi
    else:
        z, b = 1.0, 2.0
    while z < d / 2:
        b *= z / (z + 0.5)
        z += 1.0
    return b


def lower_bound(ell: float, d: int) -> float:
    """ell / (d * B(d/2, 1/2)), the known lower bound on d-dimensional discrepancy."""
    return ell / (d * beta_half(d))


def phi(ell: float, d: int) -> float:
    return lower_bound(ell, d) + 2.0 * ell ** 0.75


def mean_abs_dot(d: int) -> float:
    """E|<x, a>| for x uniform on S^d and a fixed unit vector."""
    return 2.0 / (d * beta_half(d))


# ---------------------------------------------------------------------- nets


@dataclass
class EpsNet:
    d: int
    eps: float
    points: np.ndarray
    certificate: dict | None = field(default=None)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def size_bound(self) -> float:
        return (1.0 + 2.0 / self.eps) ** (self.d + 1)

    def is_separated(self) -> bool:
        if len(self.points) < 2:
            return True
        cos_max = 1.0 - self.eps ** 2 / 2.0
        g = self.points @ self.points.T
        np.fill_diagonal(g, -np.inf)
        return bool(g.max() <= cos_max + 1e-12)

    def to_dict(self) -> dict:
        out = {"d": self.d, "eps": self.eps, "points": self.points.tolist()}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EpsNet":
        pts = np.asarray(data["points"], dtype=float).reshape(-1, int(data["d"]) + 1)
        return cls(int(data["d"]), float(data["eps"]), pts, data.get("certificate"))


def build_eps_net(
    d: int,
    eps: float,
    rng=None,
    patience: int = 10,
    min_rejections: int = 1000,
    batch: int = 1024,
) -> EpsNet:
    """Greedy maximal eps-separated set drawn from a stream of uniform points.

    A candidate joins the net when it is at chordal distance >= eps from every
    net point.  The stream stops after ``max(patience * len(net),
    min_rejections)`` consecutive rejections, so maximality (hence covering) is
    only probable; pair with :func:`verify_covering`.
    """
    if not 0 < eps <= 2:
        raise ValueError(f"eps must lie in (0, 2], got {eps}")
    gen = _rng(rng)
    cos_max = 1.0 - eps ** 2 / 2.0  # dist >= eps  <=>  <p, q> <= cos_max
    cap = 1024
    pts = np.empty((cap, d + 1))
    size = 0
    rejected = 0
    while True:
        cand = sample_sphere_many(d, batch, gen)
        if size:
            ok = (cand @ pts[:size].T).max(axis=1) <= cos_max
        else:
            ok = np.ones(batch, dtype=bool)
        start = size
        for j in range(batch):
            if ok[j] and (size == start or (pts[start:size] @ cand[j]).max() <= cos_max):
                if size == cap:
                    cap *= 2
                    grown = np.empty((cap, d + 1))
                    grown[:size] = pts[:size]
                    pts = grown
                pts[size] = cand[j]
                size += 1
                rejected = 0
            else:
                rejected += 1
                if rejected >= max(patience * size, min_rejections):
                    return EpsNet(d, float(eps), pts[:size].copy())


def densify_net(net: EpsNet, trials: int, rng=None, chunk: int = 65536) -> EpsNet:
    """Add every sampled point farther than eps from the net (separation is kept).

    Continues the greedy stream past its patience cut-off, closing the small
    holes a probabilistic stop leaves behind.
    """
    gen = _rng(rng)
    cos_max = 1.0 - net.eps ** 2 / 2.0
    pts = net.points.copy()
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        cand = sample_sphere_many(net.d, k, gen)
        far = cand[(cand @ pts.T).max(axis=1) <= cos_max] if len(pts) else cand
        added: list[np.ndarray] = []
        for p in far:
            if not added or max(q @ p for q in added) <= cos_max:
                added.append(p)
        if added:
            pts = np.vstack([pts, added])
        done += k
    return EpsNet(net.d, net.eps, pts)


def certified_net(d: int, eps: float, rng=None, trials: int = 200_000) -> EpsNet:
    """Net whose ``eps`` is an observed covering radius, for certified evaluation.

    Builds the greedy net, densifies it, then measures the covering gap on an
    independent sample and widens ``eps`` to that gap when it is larger.
    On S^1 the equally spaced net is exact and is returned directly.
    """
    if d == 1:
        return circle_net(eps)
    gen = _rng(rng)
    net = densify_net(build_eps_net(d, eps, gen), trials, gen)
    cert = verify_covering(net, trials, gen)
    return EpsNet(d, max(float(eps), cert["max_gap"]), net.points, cert)


def circle_net(eps: float) -> EpsNet:
    """Equally spaced net on S^1 with covering radius <= eps (exact, no sampling)."""
    if not 0 < eps <= 2:
        raise ValueError(f"eps must lie in (0, 2], got {eps}")
    # k points leave a worst-case chordal gap of 2 sin(pi / (2k))
    k = max(1, math.ceil(math.pi / (2.0 * math.asin(min(eps, 2.0) / 2.0)) - 1e-12))
    while 2.0 * math.sin(math.pi / (2 * k)) > eps:
        k += 1
    ang = 2.0 * math.pi * np.arange(k) / k
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    gap = 2.0 * math.sin(math.pi / (2 * k)) if k > 1 else 2.0
    return EpsNet(1, float(eps), pts, {"kind": "analytic", "max_gap": gap, "pass": gap <= eps})


def nearest_distance(points: np.ndarray, net_points: np.ndarray, chunk: int = 8192) -> np.ndarray:
    out = np.empty(len(points))
    for s in range(0, len(points), chunk):
        best = (points[s:s + chunk] @ net_points.T).max(axis=1)
        out[s:s + chunk] = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * best))
    return out


def verify_covering(net: EpsNet, trials: int, rng=None) -> dict:
    """Empirical covering check: every sampled point within ``eps`` of the net."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gen = _rng(rng)
    worst = 0.0
    chunk = 65536
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        pts = sample_sphere_many(net.d, k, gen)
        worst = max(worst, float(nearest_distance(pts, net.points).max()))
        done += k
    cert = {"kind": "sampled", "trials": int(trials), "max_gap": worst, "pass": worst <= net.eps}
    net.certificate = cert
    return cert


# ------------------------------------------------------------------- simplex


def simplex_vertices(d: int) -> np.ndarray:
    """d+1 unit vectors in R^(d+1) with pairwise inner product -1/d."""
    if d < 1:
        raise ValueError("simplex needs d >= 1")
    v = np.eye(d + 1) - 1.0 / (d + 1)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def simplex_identity_check(d: int, counts) -> tuple[float, float]:
    """(||sum a_i v_i||^2, (1/d) sum_{j<i} (a_i - a_j)^2) for colour counts a."""
    a = np.asarray(counts, dtype=float)
    if a.shape != (d + 1,):
        raise ValueError(f"need {d + 1} counts, got {a.shape}")
    s = a @ simplex_vertices(d)
    lhs = float(s @ s)
    diff = a[:, None] - a[None, :]
    rhs = float(np.triu(diff ** 2, 1).sum() / d)
    return lhs, rhs
