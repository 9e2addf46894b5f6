"""Safe and subcycle-safe shrinking of support graphs.

Rules (all constants compared with :data:`EQ_TOL`):

``C1``  edge ``uv`` and ``vt`` with ``y_u = y_v = y_t = x_uv = x_vt = c``; shrink ``{u, v}``.
``C2``  as C1 but with ``x_ut + x_vt = c``.
``C3``  ``S = {u, v, w}`` (``v`` next to ``u``, ``w`` next to ``v``) with all
        ``y = c``, ``x(E(S)) = 2c`` and an outside ``t`` next to ``w`` with
        ``y_t = c`` and ``x(t : S) = c``.
``S1``  ``x_uv = y_u = y_v = c`` and some other vertex has ``y >= c``.
``S2``  ``x_uv > max(y_u, y_v)``.

C-rules and S1 keep every vertex value unchanged (``m = y``); S2 lowers
the merged value, so later violation checks use the ``m`` vector, the
largest original ``y`` in each preimage.
"""

from __future__ import annotations

import enum
import random
import time
from collections import Counter
from dataclasses import dataclass, field

from .graph import EQ_TOL, VIOLATION_TOL, SupportGraph
from .repository import QRepository


class ShrinkRule(str, enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    S1 = "S1"
    S2 = "S2"


class Strategy(str, enum.Enum):
    NO = "NO"
    C1 = "C1"
    C1C2 = "C1C2"
    C1C2C3 = "C1C2C3"
    S1 = "S1"
    S1S2 = "S1S2"

    @property
    def rules(self) -> frozenset[ShrinkRule]:
        return _STRATEGY_RULES[self]


R = ShrinkRule
_STRATEGY_RULES = {
    Strategy.NO: frozenset(),
    Strategy.C1: frozenset({R.C1}),
    Strategy.C1C2: frozenset({R.C1, R.C2}),
    Strategy.C1C2C3: frozenset({R.C1, R.C2, R.C3}),
    Strategy.S1: frozenset({R.S1}),
    Strategy.S1S2: frozenset({R.S1, R.S2}),
}

RULE_NAMES = tuple(r.value for r in ShrinkRule)


def _eq(a: float, b: float) -> bool:
    return abs(a - b) <= EQ_TOL


@dataclass
class ShrinkReport:
    n_vertices: int
    n_edges: int
    counts: Counter = field(default_factory=Counter)
    q_sets: list[frozenset[int]] = field(default_factory=list)
    removed_vertices: int = 0
    elapsed_ms: float = 0.0


def _scan(g: SupportGraph, rules: frozenset[ShrinkRule], u: int):
    """First shrinkable set around ``u`` as ``(rule, S, witness)``, or None.

    Neighbours of ``u`` are visited in adjacency order; at every site the
    rules are tried in the order C1, C2, C3 (or S1 then S2).
    """
    c = g.y[u]
    adj_u = g.adj[u]
    c_rules = rules & {R.C1, R.C2, R.C3}
    for v, xuv in adj_u.items():
        yv = g.y[v]
        same = _eq(yv, c)
        tight = same and _eq(xuv, c)
        if same:
            adj_v = g.adj[v]
            if tight and (R.C1 in rules or R.C2 in rules):
                for t, xvt in adj_v.items():
                    if t == u or not _eq(g.y[t], c):
                        continue
                    if R.C1 in rules and _eq(xvt, c):
                        return R.C1, (u, v), t
                    if R.C2 in rules and _eq(adj_u.get(t, 0.0) + xvt, c):
                        return R.C2, (u, v), t
            if R.C3 in rules:
                # only x(E(S)) = 2c is required, so x_uv = c is not a gate here
                for w, xvw in adj_v.items():
                    if w == u or not _eq(g.y[w], c):
                        continue
                    if not _eq(xuv + adj_u.get(w, 0.0) + xvw, 2.0 * c):
                        continue
                    adj_w = g.adj[w]
                    for t, xwt in adj_w.items():
                        if t == u or t == v or not _eq(g.y[t], c):
                            continue
                        if _eq(adj_u.get(t, 0.0) + adj_v.get(t, 0.0) + xwt, c):
                            return R.C3, (u, v, w), t
            if tight and R.S1 in rules and g.has_other_at_least(c, (u, v)):
                return R.S1, (u, v), None
        if not tight and R.S2 in rules and xuv > c + EQ_TOL and xuv > yv + EQ_TOL:
            return R.S2, (u, v), None
    return None


def rule_applicable(g: SupportGraph, rule: ShrinkRule, u: int):
    """``(S, witness)`` for the first site around ``u`` where ``rule`` holds, else None.

    The witness is the vertex ``t`` of the C-rules; S-rules return None.
    """
    hit = _scan(g, frozenset({ShrinkRule(rule)}), u)
    if hit is None:
        return None
    _, S, witness = hit
    return S, witness


def shrink_update(g: SupportGraph, S, repo: QRepository | None) -> int:
    """Contract ``S``, save the ``Q`` sets exposed by the contraction, refill the heap."""
    s = g.contract(S)
    adj_s = g.adj[s]
    deg_s = sum(adj_s.values())
    ms = g.m[s]
    for n in list(adj_s):
        xns = adj_s[n]
        if repo is not None and g.y[n] < xns - EQ_TOL and g.ones:
            r = next((r for r in g.ones if r != s and r != n), None)
            if r is not None:
                cut = deg_s + sum(g.adj[n].values()) - 2.0 * xns
                mr = g.m[r]
                if cut - 2.0 * ms - 2.0 * mr + 2.0 < -VIOLATION_TOL:
                    best = cut - 2.0 * max(ms, g.m[n]) - 2.0 * mr + 2.0
                    repo.add(g.expand((s, n)), best)
        g.push(n)
    g.push(s)
    return s


def _save_s2_sides(g: SupportGraph, S, repo: QRepository) -> None:
    """Record the cut around each side of an S2 pair under the ``m`` values.

    An S2 pair violates the logical bound ``x_uv <= y_u``. Once ``u`` carries
    an ``m`` above its ``y`` the same defect is the cut ``<pi(u), u, v>`` on
    the original point, which the contraction would otherwise hide.
    """
    u, v = S
    n = len(repo.universe)
    for a, b in ((u, v), (v, u)):
        if g.m[a] <= g.y[a] + EQ_TOL:
            continue
        k = len(g.members[a])
        if not 2 <= k <= n - 2:
            continue
        slack = 2.0 * g.y[a] - 2.0 * g.m[a] - 2.0 * g.m[b] + 2.0
        if slack < -VIOLATION_TOL:
            repo.add(g.members[a], slack)


def init_heap(g: SupportGraph, rng: random.Random | None = None) -> None:
    """Fill the heap with every live vertex so the largest ``y`` pops first."""
    verts = g.vertices()
    if rng is not None:
        rng.shuffle(verts)
    verts.sort(key=lambda v: g.y[v])
    for v in verts:
        g.push(v)


def run_strategy(
    g: SupportGraph,
    strategy: Strategy | str,
    repo: QRepository | None = None,
    rng: random.Random | None = None,
    *,
    fill_heap: bool = True,
) -> ShrinkReport:
    """Apply ``strategy`` exhaustively, driven by the vertex heap."""
    strategy = Strategy(strategy)
    start = time.perf_counter()
    n_before = len(repo) if repo is not None else 0
    report = ShrinkReport(0, 0)
    rules = strategy.rules
    if rules:
        if fill_heap:
            init_heap(g, rng)
        while True:
            u = g.pop()
            if u is None:
                break
            hit = _scan(g, rules, u)
            if hit is None:
                continue
            rule, S, _ = hit
            if rule is ShrinkRule.S2 and repo is not None:
                _save_s2_sides(g, S, repo)
            shrink_update(g, S, repo)
            report.counts[rule.value] += 1
            report.removed_vertices += len(S) - 1
    g.rule_counters.update(report.counts)
    report.n_vertices = len(g)
    report.n_edges = g.n_edges()
    if repo is not None:
        report.q_sets = repo.sets()[n_before:]
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report
