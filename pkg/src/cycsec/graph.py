"""Fractional points, support graphs and vertex-set contraction.

A fractional point ``(y, x)`` assigns a weight to each vertex and each
undirected edge of a loop-free graph.  Its support graph keeps only the
positive entries; shrinking a vertex set ``S`` replaces it by a fresh vertex
``s`` with

* ``x[s, v] = x(S : v)`` for every outside neighbour ``v`` (parallel edges merged),
* ``y[s] = x(delta(S)) / 2`` so that degree equations keep holding,
* ``m[s] = max m`` over ``S`` (largest original ``y`` inside the preimage).

The partition map ``pi`` records, for every live vertex, which original
vertices were merged into it.
"""

from __future__ import annotations

import copy
import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import DomainError, InputError

#: Entries at or below this value are treated as absent from the support.
POSITIVE_TOL = 1e-9
#: Absolute tolerance for equalities in rule hypotheses (``y_v = c``...).
EQ_TOL = 1e-9
#: A cut is reported as violated only when its slack is below ``-VIOLATION_TOL``.
VIOLATION_TOL = 1e-6

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass
class FractionalPoint:
    """An LP point ``(y, x)`` over vertices ``1..n_vertices``.

    Zero entries are dropped on construction; negative entries, loops and
    out-of-range vertex ids raise :class:`InputError`.
    """

    n_vertices: int
    y: dict[int, float]
    x: dict[Edge, float]
    depot: int | None = None
    _adj: dict[int, dict[int, float]] | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_vertices < 0:
            raise InputError("n_vertices must be non-negative")
        y: dict[int, float] = {}
        for v, val in self.y.items():
            self._check_vertex(v)
            val = float(val)
            if val < -POSITIVE_TOL:
                raise InputError(f"negative y value at vertex {v}")
            if val > POSITIVE_TOL:
                y[v] = val
        x: dict[Edge, float] = {}
        for (u, v), val in self.x.items():
            self._check_vertex(u)
            self._check_vertex(v)
            if u == v:
                raise InputError(f"loop edge at vertex {u}")
            key = edge_key(u, v)
            if key in x:
                raise InputError(f"duplicate edge {key}")
            val = float(val)
            if val < -POSITIVE_TOL:
                raise InputError(f"negative x value on edge {key}")
            if val > POSITIVE_TOL:
                x[key] = val
        self.y = dict(sorted(y.items()))
        self.x = dict(sorted(x.items()))
        if self.depot is not None:
            if self.depot == 0:
                self.depot = None
            else:
                self._check_vertex(self.depot)

    def _check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or not 1 <= v <= self.n_vertices:
            raise InputError(f"vertex id {v!r} outside 1..{self.n_vertices}")

    @classmethod
    def from_edges(
        cls,
        n_vertices: int,
        y: Mapping[int, float],
        edges: Iterable[tuple[int, int, float]],
        depot: int | None = None,
    ) -> "FractionalPoint":
        """Build a point from an edge list, rejecting duplicate entries."""
        x: dict[Edge, float] = {}
        for u, v, val in edges:
            if u == v:
                raise InputError(f"loop edge at vertex {u}")
            key = edge_key(u, v)
            if key in x:
                raise InputError(f"duplicate edge {key}")
            x[key] = val
        return cls(n_vertices, dict(y), x, depot)

    @property
    def adjacency(self) -> dict[int, dict[int, float]]:
        if self._adj is None:
            adj: dict[int, dict[int, float]] = {v: {} for v in self.support()}
            for (u, v), val in self.x.items():
                adj[u][v] = val
                adj[v][u] = val
            self._adj = adj
        return self._adj

    def support(self) -> list[int]:
        """Vertices with positive ``y`` or touched by a positive edge, ascending."""
        verts = set(self.y)
        for u, v in self.x:
            verts.add(u)
            verts.add(v)
        return sorted(verts)

    def y_of(self, v: int) -> float:
        return self.y.get(v, 0.0)

    def degree(self, v: int) -> float:
        return sum(self.adjacency.get(v, {}).values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionalPoint):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.depot == other.depot
            and self.y == other.y
            and self.x == other.x
        )


@dataclass(frozen=True)
class SEC:
    """A subcycle elimination constraint ``x(delta(Q)) - 2y_u - 2y_v >= -2``."""

    Q: frozenset[int]
    u: int
    v: int
    slack: float

    def __post_init__(self) -> None:
        if self.u not in self.Q or self.v in self.Q:
            raise DomainError("SEC endpoints must satisfy u in Q and v not in Q")

    @property
    def violated(self) -> bool:
        return self.slack < -VIOLATION_TOL


@dataclass
class Diagnostics:
    degree_violations: list[tuple[int, float]] = field(default_factory=list)
    logical_violations: list[tuple[int, Edge, float]] = field(default_factory=list)
    bound_violations: list[tuple[int, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.degree_violations or self.logical_violations or self.bound_violations)

    def __bool__(self) -> bool:
        # truthy when something is wrong
        return not self.ok


def validate_point(p: FractionalPoint, tol: float = 1e-9) -> Diagnostics:
    """Check degree equations, logical constraints and vertex bounds."""
    diag = Diagnostics()
    adj = p.adjacency
    for v in p.support():
        yv = p.y_of(v)
        residual = sum(adj[v].values()) - 2.0 * yv
        if abs(residual) > tol:
            diag.degree_violations.append((v, residual))
        for w, xe in adj[v].items():
            if xe - yv > tol:
                diag.logical_violations.append((v, edge_key(v, w), xe - yv))
        if yv < 0.0 or yv > 1.0 + tol:
            diag.bound_violations.append((v, yv))
    return diag


class SupportGraph:
    """Mutable support graph of a fractional point with contraction state.

    Live vertices are the original support vertices not yet merged plus the
    fresh ids (``> n_vertices``) created by :meth:`contract`.
    """

    def __init__(self, point: FractionalPoint):
        self.point = point
        self.n_original = point.n_vertices
        self.depot = point.depot
        support = point.support()
        self.universe: frozenset[int] = frozenset(support)
        self.adj: dict[int, dict[int, float]] = {v: {} for v in support}
        for (u, v), val in point.x.items():
            self.adj[u][v] = val
            self.adj[v][u] = val
        self.y: dict[int, float] = {v: point.y_of(v) for v in support}
        self.m: dict[int, float] = dict(self.y)
        self.members: dict[int, list[int]] = {v: [v] for v in support}
        self.next_id = point.n_vertices + 1
        self.heap: list[int] = []
        self.in_heap: set[int] = set()
        self.rule_counters: Counter[str] = Counter()
        self.contractions = 0
        #: when a list, every contraction appends ``(new id, merged ids)``
        self.merge_log: list[tuple[int, list[int]]] | None = None
        self.ones: set[int] = {v for v, mv in self.m.items() if mv >= 1.0 - EQ_TOL}
        self._ytop: list[tuple[float, int]] = [(-yv, v) for v, yv in self.y.items()]
        heapq.heapify(self._ytop)

    # -- basic queries -------------------------------------------------

    def __contains__(self, v: object) -> bool:
        return v in self.adj

    def __len__(self) -> int:
        return len(self.adj)

    def vertices(self) -> list[int]:
        return list(self.adj)

    def neighbors(self, v: int) -> Iterator[int]:
        return iter(self.adj[v])

    def weight(self, u: int, v: int) -> float:
        return self.adj[u].get(v, 0.0)

    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, nb in self.adj.items():
            for v, xe in nb.items():
                if u < v:
                    yield u, v, xe

    def copy(self) -> "SupportGraph":
        return copy.deepcopy(self)

    def cut_value(self, Q: Iterable[int]) -> float:
        Qs = set(Q)
        if not Qs or Qs >= set(self.adj):
            raise DomainError("cut set must be a nonempty proper subset of the live vertices")
        total = 0.0
        for u in Qs:
            if u not in self.adj:
                raise DomainError(f"vertex {u} is not live")
            for v, xe in self.adj[u].items():
                if v not in Qs:
                    total += xe
        return total

    def has_other_at_least(self, c: float, exclude: tuple[int, ...]) -> bool:
        """True if some live vertex outside ``exclude`` has ``y >= c`` (within EQ_TOL)."""
        popped = []
        found = False
        while self._ytop:
            negy, v = self._ytop[0]
            if v not in self.adj or self.y[v] != -negy:
                heapq.heappop(self._ytop)
                continue
            if -negy < c - EQ_TOL:
                break
            if v not in exclude:
                found = True
                break
            popped.append(heapq.heappop(self._ytop))
        for item in popped:
            heapq.heappush(self._ytop, item)
        return found

    # -- heap of vertices pending rule checks --------------------------

    def push(self, v: int) -> None:
        if v in self.in_heap or v not in self.adj:
            return
        if not self.adj[v] and self.y[v] <= POSITIVE_TOL:
            return
        self.in_heap.add(v)
        self.heap.append(v)

    def pop(self) -> int | None:
        while self.heap:
            v = self.heap.pop()
            if v in self.in_heap:
                self.in_heap.discard(v)
                return v
        return None

    # -- contraction ---------------------------------------------------

    def contract(self, S: Iterable[int]) -> int:
        """Shrink the live vertices ``S`` into a fresh vertex and return its id."""
        S = list(dict.fromkeys(S))
        if len(S) < 2:
            raise DomainError("contraction needs at least two vertices")
        Sset = set(S)
        for v in S:
            if v not in self.adj:
                raise DomainError(f"vertex {v} is not live")
        s = self.next_id
        self.next_id += 1
        new_adj: dict[int, float] = {}
        for v in S:
            for w, xe in self.adj[v].items():
                if w in Sset:
                    continue
                new_adj[w] = new_adj.get(w, 0.0) + xe
                del self.adj[w][v]
        for w, xe in new_adj.items():
            self.adj[w][s] = xe
        self.adj[s] = new_adj
        self.y[s] = sum(new_adj.values()) / 2.0
        self.m[s] = max(self.m[v] for v in S)
        merged: list[int] = []
        for v in S:
            merged.extend(self.members.pop(v))
            del self.adj[v]
            del self.y[v]
            del self.m[v]
            self.in_heap.discard(v)
        self.members[s] = merged
        if any(v in self.ones for v in S):
            self.ones.difference_update(S)
            self.ones.add(s)
        heapq.heappush(self._ytop, (-self.y[s], s))
        self.contractions += 1
        if self.merge_log is not None:
            self.merge_log.append((s, S))
        return s

    def expand(self, Q: Iterable[int]) -> set[int]:
        """Map live vertices back to the union of their original preimages."""
        out: set[int] = set()
        for v in Q:
            try:
                out.update(self.members[v])
            except KeyError:
                raise DomainError(f"vertex {v} is not live") from None
        return out

    def to_point(self) -> FractionalPoint:
        """Snapshot of the current (shrunk) vector as a standalone point."""
        n = max(self.adj, default=0)
        return FractionalPoint(
            n,
            {v: yv for v, yv in self.y.items()},
            {(u, v): xe for u, v, xe in self.edges()},
        )


Cuttable = Union[SupportGraph, FractionalPoint]


def cut_value(g: Cuttable, Q: Iterable[int]) -> float:
    """Total ``x`` weight of edges with exactly one endpoint in ``Q``."""
    if isinstance(g, SupportGraph):
        return g.cut_value(Q)
    Qs = set(Q)
    universe = set(g.support())
    if not Qs or Qs >= universe:
        raise DomainError("cut set must be a nonempty proper subset of the support")
    return sum(xe for (u, v), xe in g.x.items() if (u in Qs) != (v in Qs))


def sec_slack(p: Cuttable, Q: Iterable[int], u: int, v: int) -> float:
    """Slack ``x(delta(Q)) - 2y_u - 2y_v + 2`` of the SEC ``<Q, u, v>``."""
    Qs = set(Q)
    if u not in Qs or v in Qs:
        raise DomainError("SEC endpoints must satisfy u in Q and v not in Q")
    if isinstance(p, SupportGraph):
        yu, yv = p.y[u], p.y[v]
    else:
        yu, yv = p.y_of(u), p.y_of(v)
    return cut_value(p, Qs) - 2.0 * yu - 2.0 * yv + 2.0


def contract(g: SupportGraph, S: Iterable[int]) -> int:
    return g.contract(S)


def expand(g: SupportGraph, Q: Iterable[int]) -> set[int]:
    return g.expand(Q)
