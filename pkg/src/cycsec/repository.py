"""Deduplicated store of vertex sets defining violated cuts."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError


class QRepository:
    """Canonical ``Q`` sets over a fixed vertex universe, each saved once.

    The canonical representative of a cut is its smaller side; when both
    sides have the same size, the side holding the smallest vertex id wins.
    Each set carries the most negative slack seen for it.
    """

    def __init__(self, universe: Iterable[int]):
        self.universe = frozenset(universe)
        self._order = np.array(sorted(self.universe), dtype=np.int64)
        self._min = int(self._order[0]) if len(self._order) else 0
        self._slack: dict[frozenset[int], float] = {}
        self._by_key: dict[bytes, frozenset[int]] = {}

    def canonical(self, Q: Iterable[int]) -> frozenset[int]:
        Qs = frozenset(Q)
        if not Qs <= self.universe:
            raise DomainError("Q contains vertices outside the support")
        n = len(self.universe)
        k = len(Qs)
        if 2 * k > n or (2 * k == n and self._min not in Qs):
            return self.universe - Qs
        return Qs

    def _check_size(self, k: int) -> None:
        n = len(self.universe)
        if not 2 <= k <= n - 2:
            raise DomainError(f"Q of size {k} outside [2, {n - 2}]")

    def add(self, Q: Iterable[int], slack: float) -> bool:
        """Insert ``Q`` (any side of the cut); True when it was not stored before."""
        key = self.canonical(Q)
        self._check_size(len(key))
        if key in self._slack:
            if slack < self._slack[key]:
                self._slack[key] = slack
            return False
        self._slack[key] = slack
        return True

    def add_mask(self, mask: np.ndarray, slack: float) -> bool:
        """Like :meth:`add` for a boolean mask over the ascending universe."""
        n = len(self._order)
        k = int(np.count_nonzero(mask))
        if 2 * k > n or (2 * k == n and not mask[0]):
            mask = ~mask
            k = n - k
        key = np.packbits(mask).tobytes()
        Q = self._by_key.get(key)
        if Q is None:
            self._check_size(k)
            Q = frozenset(self._order[mask].tolist())
            self._by_key[key] = Q
            if Q in self._slack:
                self._slack[Q] = min(self._slack[Q], slack)
                return False
            self._slack[Q] = slack
            return True
        if slack < self._slack[Q]:
            self._slack[Q] = slack
        return False

    @property
    def order(self) -> np.ndarray:
        """Ascending universe ids; position ``i`` matches mask index ``i``."""
        return self._order

    def slack(self, Q: Iterable[int]) -> float:
        return self._slack[self.canonical(Q)]

    def best_slack(self) -> float | None:
        return min(self._slack.values(), default=None)

    def items(self) -> Iterator[tuple[frozenset[int], float]]:
        return iter(self._slack.items())

    def sets(self) -> list[frozenset[int]]:
        return list(self._slack)

    def __contains__(self, Q: object) -> bool:
        try:
            return self.canonical(Q) in self._slack  # type: ignore[arg-type]
        except (DomainError, TypeError):
            return False

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self._slack)

    def __len__(self) -> int:
        return len(self._slack)

    def __repr__(self) -> str:
        shown = [sorted(q) for q in self._slack]
        return f"QRepository({shown})"
