"""Exact SEC separation: extended Hong (EH), dynamic Hong (DH), dynamic Hong
with internal shrinking (DHI) and the Gomory-Hu tree scan (EPG).

Every algorithm first applies a shrinking strategy, then works on the
shrunk graph and judges candidate cuts with the max-inequality
``x(delta(Q)) - 2 m(u) - 2 m(v) + 2 < 0``, where ``m`` is the largest
original ``y`` merged into a vertex.  Found sets are expanded back to
original vertex ids before they enter the repository.

Vertices are ranked by ``m``.  Before any S2/S3 contraction ``m = y``, so
this is the usual ranking by ``y``; afterwards it keeps the source of
the dynamic variants at the top (merging never lowers ``m``), which is
what the exactness argument needs.
"""

from __future__ import annotations

import enum
import random
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .gomoryhu import GHTree, build_gh_tree
from .graph import EQ_TOL, VIOLATION_TOL, FractionalPoint, SupportGraph, validate_point
from .maxflow import FlowNetwork
from .repository import QRepository
from .shrink import Strategy, run_strategy, shrink_update

DEGREE_TOL = 1e-6


class Algorithm(str, enum.Enum):
    EH = "EH"
    DH = "DH"
    DHI = "DHI"
    EPG = "EPG"


@dataclass
class SeparationStats:
    algorithm: str
    strategy: str
    supp_v: int = 0
    supp_e: int = 0
    shrunk_v: int = 0
    shrunk_e: int = 0
    min_cut_solves: int = 0
    q_count: int = 0
    preprocess_q: int = 0
    sep_q: int = 0
    preprocess_ms: float = 0.0
    sep_ms: float = 0.0
    extra_contractions: int = 0
    reorders: int = 0
    pair_scan_q: int = 0
    skipped: bool = False
    rule_counts: Counter = field(default_factory=Counter)


def rank_by_m(g: SupportGraph, verts, rng: random.Random | None) -> list[int]:
    """``verts`` ordered by decreasing ``m``; ties in random order."""
    verts = list(verts)
    if rng is not None:
        rng.shuffle(verts)
    verts.sort(key=lambda v: -g.m[v])
    return verts


class _Base:
    """Flow network of the shrunk graph plus the map back to original ids."""

    def __init__(self, g: SupportGraph, repo: QRepository):
        self.net = FlowNetwork.from_graph(g)
        pos = {v: i for i, v in enumerate(repo.order.tolist())}
        to_base = np.empty(len(pos), dtype=np.int64)
        for i, v in enumerate(self.net.ids):
            for o in g.members[v]:
                to_base[pos[o]] = i
        self.to_base = to_base
        self.repo = repo
        self.mvals = np.array([g.m[v] for v in self.net.ids])
        self.yvals = np.array([g.y[v] for v in self.net.ids])

    def save(self, side: np.ndarray, slack: float) -> bool:
        return self.repo.add_mask(side[self.to_base], slack)


def _threshold(m1: float, m2: float) -> float:
    # a flow this large proves the cut is not violated
    return 2.0 * m1 + 2.0 * m2 - 2.0 - VIOLATION_TOL


def _eh(g: SupportGraph, base: _Base, rng) -> None:
    net = base.net
    order = [net.index[v] for v in rank_by_m(g, g.vertices(), rng)]
    labels = net.identity
    mv = base.mvals
    s = order[0]
    for t in order[1:]:
        value, side = net.class_cut(labels, s, t, _threshold(mv[s], mv[t]))
        if side is None:
            continue
        slack = value - 2.0 * mv[s] - 2.0 * mv[t] + 2.0
        if slack < -VIOLATION_TOL:
            base.save(side, slack)


def _dh_plain(g: SupportGraph, base: _Base, rng, stats: SeparationStats) -> None:
    """Dynamic Hong on the fixed base network: merging a sink into the
    source only relabels it, every other class stays a single vertex."""
    net = base.net
    order = [net.index[v] for v in rank_by_m(g, g.vertices(), rng)]
    labels = net.identity.copy()
    mv = base.mvals
    src = order[0]
    for t in order[1:]:
        value, side = net.class_cut(labels, src, t, _threshold(mv[src], mv[t]))
        if side is not None:
            slack = value - 2.0 * mv[src] - 2.0 * mv[t] + 2.0
            if slack < -VIOLATION_TOL:
                base.save(side, slack)
        nb, w = net.neighbors(t)
        if float(w[labels[nb] == src].sum()) > base.yvals[t] + EQ_TOL:
            stats.reorders += 1
        labels[t] = src


def _dh(g: SupportGraph, base: _Base, rng, stats: SeparationStats, internal: Strategy) -> None:
    """Dynamic Hong with internal shrinking (DHI): each source/sink merge goes
    through SHRINK/UPDATE and is followed by the strategy on the heap it left,
    so arbitrary classes appear and every solve shrinks them first."""
    net = base.net
    labels = net.identity.copy()
    live_of = {i: v for i, v in enumerate(net.ids)}  # class label -> live vertex
    label_of = {v: i for i, v in enumerate(net.ids)}
    order = [net.index[v] for v in rank_by_m(g, g.vertices(), rng)]
    src = order[0]
    ptr = 1
    log: list[tuple[int, list[int]]] = []
    g.merge_log = log
    try:
        while len(g) > 1:
            src_label = labels[src]
            while ptr < len(order) and labels[order[ptr]] == src_label:
                ptr += 1
            if ptr == len(order):
                break
            t_base = order[ptr]
            v1 = live_of[src_label]
            v2 = live_of[labels[t_base]]
            value, side, _ = net.min_cut(src, t_base, labels)
            slack = value - 2.0 * g.m[v1] - 2.0 * g.m[v2] + 2.0
            if slack < -VIOLATION_TOL:
                base.save(side, slack)
            if g.weight(v1, v2) > g.y[v2] + EQ_TOL:
                # the merged vertex may drop in the y-order; the m-order is unaffected
                stats.reorders += 1
            shrink_update(g, (v1, v2), base.repo)
            if internal.rules:
                rep = run_strategy(g, internal, base.repo, rng, fill_heap=False)
                stats.extra_contractions += rep.removed_vertices
            for s, S in log:
                keep = label_of.pop(S[0])
                others = [label_of.pop(v) for v in S[1:]]
                labels[np.isin(labels, others)] = keep
                for lab in others:
                    del live_of[lab]
                live_of[keep] = s
                label_of[s] = keep
            log.clear()
    finally:
        g.merge_log = None


def descendant_masks(tree: GHTree, ids: list[int]):
    """Preorder entry/exit times so that ``desc(h)`` is an index interval."""
    tin: dict[int, int] = {}
    tout: dict[int, int] = {}
    clock = 0
    stack = [(tree.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            tout[v] = clock
            continue
        tin[v] = clock
        clock += 1
        stack.append((v, True))
        for c in tree.children(v):
            stack.append((c, False))
    t_arr = np.array([tin[v] for v in ids], dtype=np.int64)
    return tin, tout, t_arr


def _epg(g: SupportGraph, base: _Base, rng, stats: SeparationStats, pair_scan: bool) -> None:
    net = base.net
    tree = build_gh_tree(g, rng, net)
    tin, tout, t_arr = descendant_masks(tree, net.ids)
    mr = g.m[tree.root]
    for tail, head, w, u in tree.arcs():
        slack = w - 2.0 * g.m[u] - 2.0 * mr + 2.0
        if slack < -VIOLATION_TOL:
            base.save((t_arr >= tin[head]) & (t_arr < tout[head]), slack)
    if pair_scan:
        stats.pair_scan_q = _pair_scan(tree, g, base)


def epg_pair_scan(tree: GHTree, g: SupportGraph, repo: QRepository) -> int:
    """Save ``desc(h_a) | desc(h_f)`` for arc pairs whose combined bound is violated.

    ``x(delta(A | F)) <= w_a + w_f`` makes the bound a valid witness; the
    stored slack is recomputed from the exact cut of the union.  Returns the
    number of new sets.
    """
    return _pair_scan(tree, g, _Base(g, repo))


def _pair_scan(tree: GHTree, g: SupportGraph, base: _Base) -> int:
    net = base.net
    arcs = tree.arcs()
    if len(arcs) < 2:
        return 0
    heads = [h for _, h, _, _ in arcs]
    w = np.array([a[2] for a in arcs])
    mu = np.array([g.m[a[3]] for a in arcs])
    mr = g.m[tree.root]
    bound = w[:, None] + w[None, :] - 2.0 * np.maximum(mu[:, None], mu[None, :]) - 2.0 * mr + 2.0
    ii, jj = np.nonzero(np.triu(bound < -VIOLATION_TOL, k=1))
    if ii.size == 0:
        return 0
    tin, tout, t_arr = descendant_masks(tree, net.ids)
    mvals = np.array([g.m[v] for v in net.ids])
    added = 0
    for i, j in zip(ii.tolist(), jj.tolist()):
        a, f = heads[i], heads[j]
        mask = ((t_arr >= tin[a]) & (t_arr < tout[a])) | ((t_arr >= tin[f]) & (t_arr < tout[f]))
        cut = float(net.cap[mask[net.eu] != mask[net.ev]].sum())
        slack = cut - 2.0 * mvals[mask].max() - 2.0 * mvals[~mask].max() + 2.0
        if slack < -VIOLATION_TOL and base.save(mask, slack):
            added += 1
    return added


def separate(
    p: FractionalPoint,
    algo: Algorithm | str,
    strategy: Strategy | str = Strategy.NO,
    k: tuple[int, int] | None = None,
    rng: random.Random | None = None,
    *,
    skip_if_preprocess: bool = False,
    pair_scan: bool = False,
) -> tuple[QRepository, SeparationStats]:
    """Shrink ``p`` with ``strategy`` and run the exact algorithm ``algo``.

    ``k`` is accepted for interface symmetry with cut generation and is not
    used here.  Returns the repository of violated ``Q`` sets (original ids)
    and run statistics.
    """
    algo = Algorithm(algo)
    strategy = Strategy(strategy)
    rng = rng if rng is not None else random.Random(0)
    diag = validate_point(p, DEGREE_TOL)
    if diag.degree_violations:
        v, res = diag.degree_violations[0]
        raise InputError(f"degree equation fails at vertex {v} (residual {res:.3g})")
    g = SupportGraph(p)
    repo = QRepository(g.universe)
    stats = SeparationStats(algo.value, strategy.value, supp_v=len(g), supp_e=g.n_edges())

    t0 = time.perf_counter()
    report = run_strategy(g, strategy, repo, rng)
    stats.preprocess_ms = (time.perf_counter() - t0) * 1000.0
    stats.preprocess_q = len(repo)
    stats.shrunk_v = len(g)
    stats.shrunk_e = g.n_edges()

    t0 = time.perf_counter()
    if skip_if_preprocess and len(repo) > 0:
        stats.skipped = True
    elif len(g) >= 2:
        base = _Base(g, repo)
        if algo is Algorithm.EH:
            _eh(g, base, rng)
        elif algo is Algorithm.DH:
            _dh_plain(g, base, rng, stats)
        elif algo is Algorithm.DHI:
            _dh(g, base, rng, stats, strategy)
        else:
            _epg(g, base, rng, stats, pair_scan)
        stats.min_cut_solves = base.net.solves
    stats.sep_ms = (time.perf_counter() - t0) * 1000.0
    stats.sep_q = len(repo) - stats.preprocess_q
    stats.q_count = len(repo)
    stats.rule_counts = Counter(report.counts)
    return repo, stats
