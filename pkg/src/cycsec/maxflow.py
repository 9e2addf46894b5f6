"""(s, t)-minimum cuts on undirected support graphs.

Push-relabel (first phase only) with highest-label selection, the gap
heuristic and a global relabel after every ``|V|`` relabel operations.
Every undirected edge becomes an arc pair whose residual capacities share
the edge weight.

Terminals may be vertex classes: every vertex with role ``SOURCE`` starts
saturated and every vertex with role ``SINK`` absorbs flow, which is the
same as solving on the graph with each class shrunk to one vertex.  Labels
start at zero (no initial global relabel), so a solve whose flow finds the
sink nearby only touches that neighbourhood.  An optional threshold stops
the solve as soon as the flow proves the cut is at least that large.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError
from .graph import SupportGraph

EPS = 1e-12
NORMAL, SOURCE, SINK = 0, 1, 2


@numba.njit(cache=True)
def _build_csr(n, eu, ev):
    """Arc ``2k`` runs ``eu[k] -> ev[k]``, arc ``2k + 1`` the reverse."""
    m = eu.shape[0]
    first = np.zeros(n + 1, np.int64)
    for k in range(m):
        first[eu[k] + 1] += 1
        first[ev[k] + 1] += 1
    for v in range(n):
        first[v + 1] += first[v]
    fill = first[:n].copy()
    arcs = np.empty(2 * m, np.int64)
    head = np.empty(2 * m, np.int64)
    for k in range(m):
        a, b = eu[k], ev[k]
        head[2 * k] = b
        head[2 * k + 1] = a
        arcs[fill[a]] = 2 * k
        fill[a] += 1
        arcs[fill[b]] = 2 * k + 1
        fill[b] += 1
    return first, arcs, head


@numba.njit(cache=True)
def _list_add(v, lab, lhead, lnext, lprev):
    h = lhead[lab]
    lnext[v] = h
    lprev[v] = -1
    if h >= 0:
        lprev[h] = v
    lhead[lab] = v


@numba.njit(cache=True)
def _list_remove(v, lab, lhead, lnext, lprev):
    if lprev[v] >= 0:
        lnext[lprev[v]] = lnext[v]
    else:
        lhead[lab] = lnext[v]
    if lnext[v] >= 0:
        lprev[lnext[v]] = lprev[v]


@numba.njit(cache=True)
def _global_relabel(n, first, arcs, head, rescap, role, d, ex, cur, abucket, anext, active, lhead, lnext, lprev):
    """Exact residual distances to the sinks; rebuilds both bucket structures."""
    for lab in range(n + 1):
        abucket[lab] = -1
        lhead[lab] = -1
    queue = np.empty(n, np.int64)
    qt = 0
    for v in range(n):
        active[v] = False
        cur[v] = first[v]
        if role[v] == SINK:
            d[v] = 0
            queue[qt] = v
            qt += 1
        elif role[v] == NORMAL:
            d[v] = n
    qh = 0
    while qh < qt:
        w = queue[qh]
        qh += 1
        for idx in range(first[w], first[w + 1]):
            a = arcs[idx]
            v = head[a]
            if role[v] == NORMAL and d[v] == n and rescap[a ^ 1] > EPS:
                d[v] = d[w] + 1
                queue[qt] = v
                qt += 1
    top = -1
    maxlab = 0
    for v in range(n):
        if role[v] == NORMAL and d[v] < n:
            _list_add(v, d[v], lhead, lnext, lprev)
            if d[v] > maxlab:
                maxlab = d[v]
            if ex[v] > EPS:
                active[v] = True
                anext[v] = abucket[d[v]]
                abucket[d[v]] = v
                if d[v] > top:
                    top = d[v]
    return top, maxlab


@numba.njit(cache=True)
def _preflow(n, first, arcs, head, rescap, role, threshold, init_global):
    """Maximum preflow from the SOURCE vertices into the SINK vertices.

    ``rescap`` is updated in place.  Returns ``(flow, stopped)`` where
    ``stopped`` tells that the flow reached ``threshold`` and the solve
    was cut short.
    """
    d = np.zeros(n, np.int64)
    ex = np.zeros(n)
    cur = first[:n].copy()
    abucket = np.full(n + 1, -1, np.int64)  # active nodes per label (stacks)
    anext = np.empty(n, np.int64)
    active = np.zeros(n, np.bool_)
    lhead = np.full(n + 1, -1, np.int64)  # all normal nodes per label (doubly linked)
    lnext = np.empty(n, np.int64)
    lprev = np.empty(n, np.int64)
    flow = 0.0
    for v in range(n):
        if role[v] == SOURCE:
            d[v] = n
        elif role[v] == NORMAL:
            _list_add(v, 0, lhead, lnext, lprev)
    top = -1
    maxlab = 0
    for v in range(n):
        if role[v] != SOURCE:
            continue
        for idx in range(first[v], first[v + 1]):
            a = arcs[idx]
            w = head[a]
            c = rescap[a]
            if role[w] == SOURCE or c <= EPS:
                continue
            rescap[a] = 0.0
            rescap[a ^ 1] += c
            if role[w] == SINK:
                flow += c
            else:
                ex[w] += c
                if not active[w]:
                    active[w] = True
                    anext[w] = abucket[0]
                    abucket[0] = w
                    top = 0
    if flow >= threshold:
        return flow, True
    if init_global:
        top, maxlab = _global_relabel(n, first, arcs, head, rescap, role, d, ex, cur, abucket, anext, active, lhead, lnext, lprev)
    relabels = 0
    while top >= 0:
        u = abucket[top]
        if u < 0:
            top -= 1
            continue
        abucket[top] = anext[u]
        active[u] = False
        if d[u] != top or ex[u] <= EPS:
            continue
        need_global = False
        while ex[u] > EPS:
            if cur[u] == first[u + 1]:
                old = d[u]
                newd = n
                for idx in range(first[u], first[u + 1]):
                    a = arcs[idx]
                    if rescap[a] > EPS:
                        dv = d[head[a]] + 1
                        if dv < newd:
                            newd = dv
                relabels += 1
                _list_remove(u, old, lhead, lnext, lprev)
                if old >= 1 and lhead[old] < 0:
                    # gap: nothing labelled above ``old`` can reach a sink
                    for lab in range(old + 1, maxlab + 1):
                        w = lhead[lab]
                        while w >= 0:
                            d[w] = n
                            w = lnext[w]
                        lhead[lab] = -1
                    maxlab = old - 1
                    d[u] = n
                    break
                if newd >= n:
                    d[u] = n
                    break
                d[u] = newd
                _list_add(u, newd, lhead, lnext, lprev)
                if newd > maxlab:
                    maxlab = newd
                cur[u] = first[u]
                if relabels % n == 0:
                    need_global = True
                    break
            else:
                a = arcs[cur[u]]
                v = head[a]
                if rescap[a] > EPS and d[u] == d[v] + 1:
                    delta = ex[u] if ex[u] < rescap[a] else rescap[a]
                    rescap[a] -= delta
                    rescap[a ^ 1] += delta
                    ex[u] -= delta
                    if role[v] == SINK:
                        flow += delta
                        if flow >= threshold:
                            return flow, True
                    elif role[v] == NORMAL:
                        ex[v] += delta
                        if not active[v] and d[v] < n:
                            active[v] = True
                            anext[v] = abucket[d[v]]
                            abucket[d[v]] = v
                            if d[v] > top:
                                top = d[v]
                    else:
                        ex[v] += delta
                else:
                    cur[u] += 1
        if need_global:
            top, maxlab = _global_relabel(n, first, arcs, head, rescap, role, d, ex, cur, abucket, anext, active, lhead, lnext, lprev)
        elif ex[u] > EPS and d[u] < n and not active[u]:
            active[u] = True
            anext[u] = abucket[d[u]]
            abucket[d[u]] = u
            if d[u] > top:
                top = d[u]
    return flow, False


@numba.njit(cache=True)
def _sink_side(n, first, arcs, head, rescap, role):
    """Vertices that can still reach a sink: the smallest sink side."""
    reach = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    qt = 0
    for v in range(n):
        if role[v] == SINK:
            reach[v] = True
            queue[qt] = v
            qt += 1
    qh = 0
    while qh < qt:
        w = queue[qh]
        qh += 1
        for idx in range(first[w], first[w + 1]):
            a = arcs[idx]
            v = head[a]
            if not reach[v] and rescap[a ^ 1] > EPS:
                reach[v] = True
                queue[qt] = v
                qt += 1
    return reach


@numba.njit(cache=True)
def _cut_of(side, eu, ev, cap):
    value = 0.0
    for k in range(eu.shape[0]):
        if side[eu[k]] != side[ev[k]]:
            value += cap[k]
    return value


@numba.njit(cache=True)
def _class_cut(n, first, arcs, head, cap, eu, ev, labels, s_label, t_label, threshold, init_global):
    """Cut between the classes ``s_label`` and ``t_label`` of the base graph.

    Vertices of any other class are treated as singletons.  Flow runs from
    the ``t`` class into the ``s`` class.  Returns ``(value, flow, stopped,
    side)``; when the solve stopped at the threshold ``value`` is the flow
    reached so far and ``side`` is empty.
    """
    role = np.zeros(n, np.int8)
    for v in range(n):
        if labels[v] == s_label:
            role[v] = SINK
        elif labels[v] == t_label:
            role[v] = SOURCE
    rescap = np.empty(2 * eu.shape[0])
    for k in range(eu.shape[0]):
        rescap[2 * k] = cap[k]
        rescap[2 * k + 1] = cap[k]
    flow, stopped = _preflow(n, first, arcs, head, rescap, role, threshold, init_global)
    if stopped:
        return flow, flow, True, np.zeros(0, np.bool_)
    side = _sink_side(n, first, arcs, head, rescap, role)
    return _cut_of(side, eu, ev, cap), flow, False, side


@numba.njit(cache=True)
def _quotient_min_cut(n_base, eu, ev, cap, labels, s_base, t_base):
    """Exact minimum cut between the classes of ``s_base`` and ``t_base``.

    Every class of ``labels`` is shrunk to one vertex first.  Returns
    ``(cut value, flow value, side)`` where ``side`` marks the base vertices
    on the smallest ``s`` side.
    """
    max_label = 0
    for i in range(n_base):
        if labels[i] > max_label:
            max_label = labels[i]
    compact = np.full(max_label + 1, -1, np.int64)
    n = 0
    for i in range(n_base):
        lab = labels[i]
        if compact[lab] < 0:
            compact[lab] = n
            n += 1
    m = 0
    for k in range(eu.shape[0]):
        if labels[eu[k]] != labels[ev[k]]:
            m += 1
    qu = np.empty(m, np.int64)
    qv = np.empty(m, np.int64)
    qc = np.empty(m)
    j = 0
    for k in range(eu.shape[0]):
        a = labels[eu[k]]
        b = labels[ev[k]]
        if a != b:
            qu[j] = compact[a]
            qv[j] = compact[b]
            qc[j] = cap[k]
            j += 1
    first, arcs, head = _build_csr(n, qu, qv)
    rescap = np.empty(2 * m)
    for k in range(m):
        rescap[2 * k] = qc[k]
        rescap[2 * k + 1] = qc[k]
    role = np.zeros(n, np.int8)
    role[compact[labels[s_base]]] = SINK
    role[compact[labels[t_base]]] = SOURCE
    flow, _ = _preflow(n, first, arcs, head, rescap, role, np.inf, True)
    reach = _sink_side(n, first, arcs, head, rescap, role)
    value = _cut_of(reach, qu, qv, qc)
    side = np.empty(n_base, np.bool_)
    for i in range(n_base):
        side[i] = reach[compact[labels[i]]]
    return value, flow, side


@dataclass
class CutResult:
    value: float
    source_side: set[int]
    flow_value: float


class FlowNetwork:
    """Fixed base graph for repeated min-cut solves.

    Vertices are ``0..n-1``; ``ids[i]`` keeps the caller's vertex id.
    The solver allocates its scratch space per solve, so one network may
    serve many solves but only one at a time.
    """

    def __init__(self, ids: list[int], eu: np.ndarray, ev: np.ndarray, cap: np.ndarray):
        self.ids = list(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.n = len(self.ids)
        self.eu = np.ascontiguousarray(eu, dtype=np.int64)
        self.ev = np.ascontiguousarray(ev, dtype=np.int64)
        self.cap = np.ascontiguousarray(cap, dtype=np.float64)
        self.first, self.arcs, self.head = _build_csr(self.n, self.eu, self.ev)
        self.identity = np.arange(self.n, dtype=np.int64)
        self.solves = 0

    @classmethod
    def from_graph(cls, g: SupportGraph) -> "FlowNetwork":
        ids = g.vertices()
        index = {v: i for i, v in enumerate(ids)}
        eu, ev, cap = [], [], []
        for u, v, xe in g.edges():
            eu.append(index[u])
            ev.append(index[v])
            cap.append(xe)
        return cls(ids, np.array(eu, np.int64), np.array(ev, np.int64), np.array(cap, np.float64))

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Base neighbours of ``i`` and the weights of the joining edges."""
        a = self.arcs[self.first[i] : self.first[i + 1]]
        return self.head[a], self.cap[a >> 1]

    def min_cut(self, s: int, t: int, labels: np.ndarray | None = None) -> tuple[float, np.ndarray, float]:
        """Cut value, base-vertex mask of the smallest ``s`` side, flow value.

        ``s`` and ``t`` are base indices; with ``labels`` they stand for
        their whole classes, which must differ.
        """
        if labels is None:
            labels = self.identity
        if labels[s] == labels[t]:
            raise DomainError("source and sink coincide")
        self.solves += 1
        value, flow, side = _quotient_min_cut(self.n, self.eu, self.ev, self.cap, labels, s, t)
        return value, side, flow

    def class_cut(
        self,
        labels: np.ndarray,
        s_label: int,
        t_label: int,
        threshold: float = np.inf,
        init_global: bool = False,
    ) -> tuple[float, np.ndarray | None]:
        """Cut between two classes, every other class being a single vertex.

        Returns ``(value, side)``; ``side`` is None when the solve proved the
        cut is at least ``threshold`` (``value`` is then only that bound).
        """
        if s_label == t_label:
            raise DomainError("source and sink coincide")
        self.solves += 1
        value, _, stopped, side = _class_cut(
            self.n, self.first, self.arcs, self.head, self.cap, self.eu, self.ev, labels, s_label, t_label, threshold, init_global
        )
        return value, (None if stopped else side)


def st_min_cut(g: SupportGraph, s: int, t: int) -> CutResult:
    """Minimum ``s``/``t`` cut of the live support graph (smallest source side)."""
    if s == t:
        raise DomainError("source and sink must differ")
    if s not in g or t not in g:
        raise DomainError("source and sink must be live vertices")
    net = FlowNetwork.from_graph(g)
    value, side, flow = net.min_cut(net.index[s], net.index[t])
    return CutResult(value, {v for v, inside in zip(net.ids, side) if inside}, flow)
