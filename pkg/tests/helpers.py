"""Hand fixtures and random point builders shared by the test modules."""

from __future__ import annotations

import random

from cycsec.graph import FractionalPoint, edge_key
from cycsec.instance import SyntheticParams

ALGOS = ("EH", "DH", "DHI", "EPG")
STRATEGIES = ("NO", "C1", "C1C2", "C1C2C3", "S1", "S1S2")


def T2() -> FractionalPoint:
    """Two disjoint unit triangles."""
    x = {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 1.0, (4, 5): 1.0, (5, 6): 1.0, (4, 6): 1.0}
    return FractionalPoint(6, {v: 1.0 for v in range(1, 7)}, x)


def T3() -> FractionalPoint:
    x = {}
    for base in (0, 3, 6):
        a, b, c = base + 1, base + 2, base + 3
        x.update({(a, b): 1.0, (b, c): 1.0, (a, c): 1.0})
    return FractionalPoint(9, {v: 1.0 for v in range(1, 10)}, x)


def F1() -> FractionalPoint:
    y = dict(zip(range(1, 7), (1.0, 1.0, 1.0, 0.5, 0.5, 0.5)))
    x = {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 0.5, (3, 4): 0.5, (4, 5): 0.5, (5, 6): 0.5, (1, 6): 0.5}
    return FractionalPoint(6, y, x)


def C6() -> FractionalPoint:
    return FractionalPoint(6, {v: 1.0 for v in range(1, 7)}, {edge_key(v, v % 6 + 1): 1.0 for v in range(1, 7)})


def C3() -> FractionalPoint:
    return FractionalPoint(3, {1: 1.0, 2: 1.0, 3: 1.0}, {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 1.0})


def K2() -> FractionalPoint:
    return FractionalPoint(2, {1: 0.35, 2: 0.35}, {(1, 2): 0.7})


def P5() -> FractionalPoint:
    """Half of cycle 1-2-3-4-5 plus half of cycle 1-2-4-3-5."""
    x = {(1, 2): 1.0, (1, 5): 1.0, (2, 3): 0.5, (3, 4): 1.0, (4, 5): 0.5, (2, 4): 0.5, (3, 5): 0.5}
    return FractionalPoint(5, {v: 1.0 for v in range(1, 6)}, x)


def C3_ONLY() -> FractionalPoint:
    """All y = 1; rule C3 fits S = {1,2,3} with t = 7 while no edge reaches 1.

    Built from the three safe-shrinking conditions with
    |S| = 3: x(E(S)) = 2 (three edges of 2/3), x(7 : S) = 1, and the rest of
    the degree filled through a second triangle {4,5,6}.
    """
    a, b = 1.0 / 3.0, 2.0 / 3.0
    x = {
        (1, 2): b, (1, 3): b, (2, 3): b,
        (1, 7): a, (2, 7): a, (3, 7): a,
        (1, 4): a, (2, 5): a, (3, 6): a,
        (4, 7): a, (5, 7): a, (6, 7): a,
        (4, 5): b, (4, 6): b, (5, 6): b,
    }  # fmt: skip
    return FractionalPoint(7, {v: 1.0 for v in range(1, 8)}, x)


def cycle_mix(rng: random.Random, n: int | None = None) -> FractionalPoint:
    """Random sub-convex combination of random simple cycles on ``1..n``.

    The result satisfies the degree equations by construction; a random
    rescaling can push it outside the cycle polytope, so violated SECs show
    up regularly.
    """
    n = n or rng.randint(4, 12)
    verts = list(range(1, n + 1))
    cycles = []
    for _ in range(rng.randint(1, 5)):
        k = rng.randint(3, n)
        cycles.append((rng.sample(verts, k), rng.random()))
    y: dict[int, float] = {}
    x: dict[tuple[int, int], float] = {}
    for cyc, lam in cycles:
        for i, v in enumerate(cyc):
            y[v] = y.get(v, 0.0) + lam
            e = edge_key(v, cyc[(i + 1) % len(cyc)])
            x[e] = x.get(e, 0.0) + lam
    top = max(y.values())
    if rng.random() < 0.5:
        top *= rng.choice([1.0, 1.2, 2.0])
    return FractionalPoint(n, {v: w / top for v, w in y.items()}, {e: w / top for e, w in x.items()})


def small_synthetic(i: int) -> SyntheticParams:
    """The ``i``-th member of a seeded family of generator inputs with n <= 12."""
    rng = random.Random(10_000 + i)
    clusters = rng.choice([1, 1, 2, 2, 3])
    n = rng.randint(max(4, 3 * clusters), 12)
    return SyntheticParams(
        n=n,
        clusters=clusters,
        cycles_per_cluster=rng.randint(1, 4),
        mix=rng.choice(["uniform", "equal"]),
        perturbation=rng.choice([0.0, 0.3, 0.8]),
        drop=rng.choice([0.0, 0.2, 0.4]),
        reversal_rate=rng.choice([0.1, 0.3]),
        seed=i,
    )
