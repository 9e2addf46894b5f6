"""Turn stored ``Q`` sets into explicit violated SECs."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError
from .graph import EQ_TOL, SEC, VIOLATION_TOL, FractionalPoint, cut_value
from .repository import QRepository


@dataclass(frozen=True)
class CutGenPolicy:
    """``k_in`` x ``k_out`` endpoint sampling; ``depot_aware`` enables the depot shortcut."""

    k_in: int = 1
    k_out: int = 1
    depot_aware: bool = False

    def __post_init__(self) -> None:
        if self.k_in < 1 or self.k_out < 1:
            raise ConfigError("k_in and k_out must be positive")


def _top(verts, p: FractionalPoint) -> list[int]:
    best = max(p.y_of(v) for v in verts)
    return sorted(v for v in verts if p.y_of(v) >= best - EQ_TOL)


def _sample(rng: random.Random, pool: list[int], k: int) -> list[int]:
    # asking for more than the pool holds returns the whole pool
    return list(pool) if k >= len(pool) else rng.sample(pool, k)


def generate_cuts(
    repo: QRepository,
    p: FractionalPoint,
    depot: int | None = None,
    policy: CutGenPolicy = CutGenPolicy(),
    rng: random.Random | None = None,
) -> list[SEC]:
    """Violated SECs for every ``Q`` in ``repo``, in repository order.

    Inside endpoints are drawn from the largest-``y`` vertices of ``Q``,
    and for each of them a fresh sample of outside endpoints is drawn from
    the largest-``y`` vertices outside.  A depot (explicit, or the point's
    own when the policy is depot-aware) replaces the sample on its side.
    """
    rng = rng if rng is not None else random.Random(0)
    if depot is None and policy.depot_aware:
        depot = p.depot
    universe = repo.universe
    cuts: list[SEC] = []
    for Q in repo:
        out = universe - Q
        if depot is not None and depot in Q:
            s_in = [depot]
        else:
            s_in = _sample(rng, _top(Q, p), policy.k_in)
        fixed_out = [depot] if depot is not None and depot in out else None
        m_out = _top(out, p) if fixed_out is None else []
        cut = cut_value(p, Q)
        seen: set[tuple[int, int]] = set()
        for u in s_in:
            s_out = fixed_out if fixed_out is not None else _sample(rng, m_out, policy.k_out)
            for v in s_out:
                if (u, v) in seen:
                    continue
                seen.add((u, v))
                slack = cut - 2.0 * p.y_of(u) - 2.0 * p.y_of(v) + 2.0
                if slack < -VIOLATION_TOL:
                    cuts.append(SEC(Q, u, v, slack))
    return cuts
