"""Directed rooted Gomory-Hu trees with descendant-max annotations.

The tree is built by the classical contraction scheme: a tree node holding
several vertices is split by a minimum cut between two of its members in the
graph where every component of ``T - node`` is shrunk to one vertex.  The
node containing the root always stays on top, so arcs keep pointing away
from the root throughout, and the descendant maximum of ``m`` (``u_a``) is
updated per split for the lower half only; the upper half keeps its
descendant set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DomainError
from .graph import EQ_TOL, SupportGraph
from .maxflow import FlowNetwork, _quotient_min_cut, st_min_cut


@numba.njit(cache=True)
def _gh_kernel(n, eu, ev, cap, mval, root, rand):
    node_of = np.full(n, root, np.int64)
    is_node = np.zeros(n, np.bool_)
    is_node[root] = True
    parent = np.full(n, -1, np.int64)
    weight = np.zeros(n)
    size = np.zeros(n, np.int64)
    size[root] = n
    sub = np.full(n, -1, np.int64)
    best = 0
    for v in range(1, n):
        if mval[v] > mval[best]:
            best = v
    sub[root] = best
    stack = np.empty(2 * n + 1, np.int64)
    sp = 0
    if n >= 2:
        stack[0] = root
        sp = 1
    comp = np.empty(n, np.int64)
    labels = np.empty(n, np.int64)
    members = np.empty(n, np.int64)
    pathbuf = np.empty(n, np.int64)
    children = np.empty(n, np.int64)
    ri = 0
    solves = 0
    while sp > 0:
        sp -= 1
        X = stack[sp]
        if size[X] < 2:
            continue
        k = 0
        for v in range(n):
            if node_of[v] == X:
                members[k] = v
                k += 1
        ia = min(int(rand[ri] * k), k - 1)
        ib = min(int(rand[ri + 1] * (k - 1)), k - 2)
        ri += 2
        if ib >= ia:
            ib += 1
        a = members[ia]
        b = members[ib]
        # every component of T - X becomes a single vertex
        oldpar = parent[X]
        for z in range(n):
            comp[z] = -2
        comp[X] = X
        for z in range(n):
            if not is_node[z] or comp[z] != -2:
                continue
            val = -2
            w = z
            L = 0
            while True:
                if comp[w] != -2:
                    val = comp[w]
                    break
                pathbuf[L] = w
                L += 1
                p = parent[w]
                if p == X:
                    val = w
                    break
                if p == -1:
                    val = oldpar
                    break
                w = p
            for i in range(L):
                comp[pathbuf[i]] = val
        for v in range(n):
            nv = node_of[v]
            labels[v] = v if nv == X else comp[nv]
        value, _, side = _quotient_min_cut(n, eu, ev, cap, labels, a, b)
        solves += 1
        up_flag = side[root] if oldpar == -1 else side[oldpar]
        if side[a] == up_flag:
            pier_up, pier_lo = a, b
        else:
            pier_up, pier_lo = b, a
        rep_up = X if side[X] == up_flag else pier_up
        rep_lo = pier_lo
        nc = 0
        for c in range(n):
            if is_node[c] and c != X and parent[c] == X:
                children[nc] = c
                nc += 1
        oldw = weight[X]
        oldsub = sub[X]
        is_node[X] = False
        is_node[rep_up] = True
        parent[rep_up] = oldpar
        weight[rep_up] = oldw
        sub[rep_up] = oldsub
        is_node[rep_lo] = True
        parent[rep_lo] = rep_up
        weight[rep_lo] = value
        n_up = 0
        lo_best = -1
        for i in range(k):
            v = members[i]
            if side[v] == up_flag:
                node_of[v] = rep_up
                n_up += 1
            else:
                node_of[v] = rep_lo
                if lo_best < 0 or mval[v] > mval[lo_best]:
                    lo_best = v
        for i in range(nc):
            c = children[i]
            if side[c] == up_flag:
                parent[c] = rep_up
            else:
                parent[c] = rep_lo
                if mval[sub[c]] > mval[lo_best]:
                    lo_best = sub[c]
        sub[rep_lo] = lo_best
        size[rep_up] = n_up
        size[rep_lo] = k - n_up
        if size[rep_up] >= 2:
            stack[sp] = rep_up
            sp += 1
        if size[rep_lo] >= 2:
            stack[sp] = rep_lo
            sp += 1
    return parent, weight, sub, solves


@dataclass
class GHTree:
    """Gomory-Hu tree oriented away from ``root``.

    ``parent[h]``, ``weight[h]`` and ``u[h]`` describe the arc entering
    ``h``: its tail, its minimum-cut value ``w_a`` and a vertex of largest
    ``m`` among the descendants of ``h`` (``h`` included).
    """

    root: int
    parent: dict[int, int]
    weight: dict[int, float]
    u: dict[int, int]
    m: dict[int, float]
    solves: int = 0
    _children: dict[int, list[int]] | None = field(default=None, repr=False)

    @property
    def v_value(self) -> float:
        """The ``m`` value of the root, shared by every arc."""
        return self.m[self.root]

    def vertices(self) -> list[int]:
        return list(self.m)

    def arcs(self) -> list[tuple[int, int, float, int]]:
        """``(tail, head, w_a, u_a)`` for every arc."""
        return [(self.parent[h], h, self.weight[h], self.u[h]) for h in self.parent]

    def children(self, v: int) -> list[int]:
        if self._children is None:
            ch: dict[int, list[int]] = {w: [] for w in self.m}
            for h, t in self.parent.items():
                ch[t].append(h)
            self._children = ch
        return self._children[v]

    def descendants(self, v: int) -> set[int]:
        out = {v}
        stack = [v]
        while stack:
            for c in self.children(stack.pop()):
                out.add(c)
                stack.append(c)
        return out

    def path_min(self, a: int, b: int) -> float:
        """Smallest arc weight on the tree path between ``a`` and ``b``."""
        if a == b:
            raise DomainError("path endpoints must differ")
        up_a = [a]
        while up_a[-1] in self.parent:
            up_a.append(self.parent[up_a[-1]])
        seen = {v: i for i, v in enumerate(up_a)}
        best = float("inf")
        w = b
        while w not in seen:
            best = min(best, self.weight[w])
            w = self.parent[w]
        for v in up_a[: seen[w]]:
            best = min(best, self.weight[v])
        return best

    def dump(self) -> str:
        """Indented text: one ``vertex parent w u`` line per vertex, preorder."""
        lines = []
        stack = [(self.root, 0)]
        while stack:
            v, depth = stack.pop()
            if v == self.root:
                lines.append(f"{v} - - {self.root}")
            else:
                lines.append(f"{'  ' * depth}{v} {self.parent[v]} {self.weight[v]:.17g} {self.u[v]}")
            for c in sorted(self.children(v), reverse=True):
                stack.append((c, depth + 1))
        return "\n".join(lines) + "\n"


def choose_root(g: SupportGraph, rng: random.Random | None = None) -> int:
    """A live vertex of largest ``m``; ties are broken by ``rng``."""
    top = max(g.m.values())
    ties = sorted(v for v, mv in g.m.items() if mv >= top - EQ_TOL)
    if rng is None or len(ties) == 1:
        return ties[0]
    return rng.choice(ties)


def build_gh_tree(
    g: SupportGraph,
    rng: random.Random | None = None,
    net: FlowNetwork | None = None,
    root: int | None = None,
) -> GHTree:
    """Directed rooted Gomory-Hu tree of the live graph ``g``."""
    if len(g) < 2:
        raise DomainError("a Gomory-Hu tree needs at least two vertices")
    rng = rng if rng is not None else random.Random(0)
    if net is None:
        net = FlowNetwork.from_graph(g)
    if root is None:
        root = choose_root(g, rng)
    n = net.n
    mval = np.array([g.m[v] for v in net.ids], dtype=np.float64)
    rand = np.array([rng.random() for _ in range(2 * (n - 1))], dtype=np.float64)
    parent, weight, sub, solves = _gh_kernel(n, net.eu, net.ev, net.cap, mval, net.index[root], rand)
    solves = int(solves)
    net.solves += solves
    ids = net.ids
    par: dict[int, int] = {}
    wts: dict[int, float] = {}
    us: dict[int, int] = {}
    for i in range(n):
        if parent[i] >= 0:
            h = ids[i]
            par[h] = ids[parent[i]]
            wts[h] = float(weight[i])
            us[h] = ids[sub[i]]
    return GHTree(root, par, wts, us, {v: g.m[v] for v in ids}, solves)


def verify_gh_tree(g: SupportGraph, tree: GHTree, tol: float = 1e-9) -> bool:
    """Recheck every arc weight by an independent min cut and every ``u_a``."""
    live = set(g.vertices())
    if set(tree.vertices()) != live or len(tree.parent) != len(live) - 1:
        return False
    if tree.root in tree.parent or tree.descendants(tree.root) != live:
        return False
    for tail, head, w, u in tree.arcs():
        if abs(st_min_cut(g, tail, head).value - w) > tol:
            return False
        desc = tree.descendants(head)
        if u not in desc:
            return False
        if g.m[u] < max(g.m[v] for v in desc) - EQ_TOL:
            return False
    return True
