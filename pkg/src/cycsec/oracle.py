"""Independent ground-truth SEC separators for tests and ``--verify`` runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DomainError
from .graph import EQ_TOL, SEC, VIOLATION_TOL, FractionalPoint, SupportGraph
from .maxflow import FlowNetwork
from .repository import QRepository

MAX_ENUMERATE = 16

PointLike = Union[FractionalPoint, SupportGraph]


@dataclass
class OracleResult:
    max_violation: float
    witness: SEC | None
    all_violated_Q: list[frozenset[int]] = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return self.max_violation > 0.0


def _unpack(p: PointLike, weights: Mapping[int, float] | None):
    if isinstance(p, SupportGraph):
        verts = sorted(p.vertices())
        w = dict(p.y if weights is None else weights)
        edges = list(p.edges())
    else:
        verts = p.support()
        w = {v: p.y_of(v) for v in verts} if weights is None else dict(weights)
        edges = [(u, v, xe) for (u, v), xe in p.x.items()]
    return verts, w, edges


def best_endpoint_slack(p: PointLike, Q: Iterable[int], weights: Mapping[int, float] | None = None) -> float:
    """Slack of ``<Q, u, v>`` with ``u``/``v`` of largest weight inside/outside ``Q``."""
    verts, w, edges = _unpack(p, weights)
    Qs = set(Q)
    out = [v for v in verts if v not in Qs]
    if not Qs or not out or not Qs <= set(verts):
        raise DomainError("Q must be a nonempty proper subset of the vertices")
    cut = sum(xe for u, v, xe in edges if (u in Qs) != (v in Qs))
    return cut - 2.0 * max(w[v] for v in Qs) - 2.0 * max(w[v] for v in out) + 2.0


def _argmax(verts: Iterable[int], w: Mapping[int, float]) -> int:
    verts = list(verts)
    top = max(w[v] for v in verts)
    return min(v for v in verts if w[v] >= top - EQ_TOL)


def oracle_enumerate(p: PointLike, weights: Mapping[int, float] | None = None) -> OracleResult:
    """Exhaustive search over every cut with both sides of size at least 2.

    ``p`` may be a point or a (shrunk) support graph; ``weights`` replaces
    the vertex values (pass ``g.m`` for the max-inequality). On a graph each
    live vertex stands for its original members: side sizes count members,
    reported sets are expanded, and witness endpoints are the smallest
    member of the chosen live vertex.
    """
    verts, w, edges = _unpack(p, weights)
    n = len(verts)
    if n > MAX_ENUMERATE:
        raise DomainError(f"exhaustive oracle limited to {MAX_ENUMERATE} vertices, got {n}")
    shrunk = isinstance(p, SupportGraph)
    count = np.array([len(p.members[v]) if shrunk else 1 for v in verts])
    total = int(count.sum())
    if n < 2 or total < 4:
        return OracleResult(0.0, None, [])
    pos = {v: i for i, v in enumerate(verts)}
    # every cut once: masks containing the first vertex
    codes = np.arange(1 << (n - 1), dtype=np.int64)
    bits = np.empty((codes.size, n), dtype=bool)
    bits[:, 0] = True
    for i in range(1, n):
        bits[:, i] = (codes >> (i - 1)) & 1
    sizes = bits.astype(np.int64) @ count
    keep = (sizes >= 2) & (sizes <= total - 2)
    bits = bits[keep]
    if bits.shape[0] == 0:
        return OracleResult(0.0, None, [])
    cut = np.zeros(bits.shape[0])
    for u, v, xe in edges:
        cut += xe * (bits[:, pos[u]] != bits[:, pos[v]])
    wv = np.array([w[v] for v in verts])
    inside = np.where(bits, wv, -np.inf).max(axis=1)
    outside = np.where(bits, -np.inf, wv).max(axis=1)
    slack = cut - 2.0 * inside - 2.0 * outside + 2.0

    def orig(Q: Iterable[int]) -> frozenset[int]:
        return frozenset(p.expand(Q)) if shrunk else frozenset(Q)

    repo = QRepository(p.universe if shrunk else verts)
    for row in np.flatnonzero(slack < -VIOLATION_TOL):
        repo.add(orig(verts[i] for i in np.flatnonzero(bits[row])), float(slack[row]))
    best = int(np.argmin(slack))
    if slack[best] >= -VIOLATION_TOL:
        return OracleResult(0.0, None, [])
    Q = frozenset(verts[i] for i in np.flatnonzero(bits[best]))
    u = _argmax(Q, w)
    v = _argmax((x for x in verts if x not in Q), w)
    if shrunk:
        u, v = min(p.members[u]), min(p.members[v])
    return OracleResult(float(-slack[best]), SEC(orig(Q), u, v, float(slack[best])), repo.sets())


def oracle_pairwise(p: PointLike, weights: Mapping[int, float] | None = None) -> OracleResult:
    """One ``(u, v)``-minimum cut per unordered vertex pair."""
    g = p if isinstance(p, SupportGraph) else SupportGraph(p)
    verts, w, _ = _unpack(g, weights)
    if len(verts) < 2:
        return OracleResult(0.0, None, [])
    net = FlowNetwork.from_graph(g)
    repo = QRepository(verts)
    n = len(verts)
    best: SEC | None = None
    for i, u in enumerate(verts):
        for v in verts[i + 1 :]:
            value, side, _ = net.min_cut(net.index[u], net.index[v])
            slack = value - 2.0 * w[u] - 2.0 * w[v] + 2.0
            if slack >= -VIOLATION_TOL:
                continue
            Q = frozenset(net.ids[j] for j in np.flatnonzero(side))
            if 2 <= len(Q) <= n - 2:
                repo.add(Q, slack)
            if best is None or slack < best.slack:
                best = SEC(Q, u, v, slack)
    if best is None:
        return OracleResult(0.0, None, [])
    return OracleResult(-best.slack, best, repo.sets())
