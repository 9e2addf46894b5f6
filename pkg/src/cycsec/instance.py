"""CYCSEC text format and the synthetic instance generator.

Format (UTF-8, LF line endings, ``#`` starts a comment)::

    CYCSEC 1
    VERTICES <n>
    DEPOT <d or 0>
    Y <count>
    <vertex> <y>
    ...
    EDGES <count>
    <u> <v> <x>
    ...

Values are written with Python's shortest round-trip representation
(at most 17 significant digits), so ``parse(write(p)) == p`` exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, InputError, ParseError
from .graph import FractionalPoint, edge_key

FORMAT_VERSION = 1


def _fmt(val: float) -> str:
    return repr(float(val))


def write_instance(p: FractionalPoint) -> str:
    lines = [
        f"CYCSEC {FORMAT_VERSION}",
        f"VERTICES {p.n_vertices}",
        f"DEPOT {p.depot or 0}",
        f"Y {len(p.y)}",
    ]
    lines += [f"{v} {_fmt(val)}" for v, val in sorted(p.y.items())]
    lines.append(f"EDGES {len(p.x)}")
    lines += [f"{u} {v} {_fmt(val)}" for (u, v), val in sorted(p.x.items())]
    return "\n".join(lines) + "\n"


def _records(text: str):
    for lineno, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


class _Reader:
    def __init__(self, text: str, path: str | None):
        self.it = _records(text)
        self.path = path
        self.last = 0

    def error(self, msg: str, line: int | None = None) -> ParseError:
        return ParseError(msg, self.last if line is None else line, self.path)

    def next(self, what: str):
        try:
            self.last, fields = next(self.it)
        except StopIteration:
            raise ParseError(f"unexpected end of input, expected {what}", self.last + 1, self.path) from None
        return fields

    def keyword(self, key: str, nargs: int = 1) -> list[str]:
        fields = self.next(key)
        if fields[0] != key or len(fields) != nargs + 1:
            raise self.error(f"expected '{key}' with {nargs} value(s), got {' '.join(fields)!r}")
        return fields[1:]

    def integer(self, tok: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise self.error(f"expected an integer, got {tok!r}") from None

    def number(self, tok: str) -> float:
        try:
            val = float(tok)
        except ValueError:
            raise self.error(f"expected a number, got {tok!r}") from None
        if not math.isfinite(val):
            raise self.error(f"non-finite value {tok!r}")
        return val


def parse_instance(text: str, path: str | None = None) -> FractionalPoint:
    """Parse CYCSEC text; every error carries the offending line number."""
    r = _Reader(text, path)
    header = r.next("header")
    if len(header) != 2 or header[0] != "CYCSEC":
        raise r.error("missing 'CYCSEC <version>' header")
    if r.integer(header[1]) != FORMAT_VERSION:
        raise r.error(f"unsupported format version {header[1]} (expected {FORMAT_VERSION})")
    n = r.integer(r.keyword("VERTICES")[0])
    if n < 0:
        raise r.error("negative vertex count")
    depot = r.integer(r.keyword("DEPOT")[0])
    if not 0 <= depot <= n:
        raise r.error(f"depot {depot} outside 0..{n}")

    def vertex(tok: str) -> int:
        v = r.integer(tok)
        if not 1 <= v <= n:
            raise r.error(f"vertex id {v} outside 1..{n}")
        return v

    def count(key: str) -> int:
        c = r.integer(r.keyword(key)[0])
        if c < 0:
            raise r.error(f"negative {key} count")
        return c

    y: dict[int, float] = {}
    for _ in range(count("Y")):
        fields = r.next("a Y record")
        if len(fields) != 2:
            raise r.error("Y record needs '<vertex> <value>' (count mismatch?)")
        v = vertex(fields[0])
        if v in y:
            raise r.error(f"duplicate Y record for vertex {v}")
        y[v] = r.number(fields[1])
    x: dict[tuple[int, int], float] = {}
    for _ in range(count("EDGES")):
        fields = r.next("an EDGES record")
        if len(fields) != 3:
            raise r.error("EDGES record needs '<u> <v> <value>' (count mismatch?)")
        u, v = vertex(fields[0]), vertex(fields[1])
        if u == v:
            raise r.error(f"loop edge at vertex {u}")
        key = edge_key(u, v)
        if key in x:
            raise r.error(f"duplicate edge {key}")
        x[key] = r.number(fields[2])
    extra = next(r.it, None)
    if extra is not None:
        raise ParseError("unexpected content after the EDGES block (count mismatch?)", extra[0], path)
    try:
        return FractionalPoint(n, y, x, depot or None)
    except InputError as exc:
        raise ParseError(str(exc), r.last, path) from exc


def load_instance(path: str | Path) -> FractionalPoint:
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), str(path))


def save_instance(path: str | Path, p: FractionalPoint) -> None:
    Path(path).write_text(write_instance(p), encoding="utf-8", newline="\n")


def convert_records(
    n: int,
    y: Mapping[int, float],
    edges: Iterable[tuple[int, int, float]],
    depot: int | None = None,
) -> FractionalPoint:
    """Map externally released LP points (vertex and edge records) to a point.

    This is the documented entry for converters of third-party files: a
    reader only has to produce 1-based vertex ids, the ``y`` values and the
    ``(u, v, x)`` edge records.  No reader for a specific external layout is
    bundled.
    """
    return FractionalPoint.from_edges(n, y, edges, depot)


# -- synthetic instances --------------------------------------------------


@dataclass(frozen=True)
class SyntheticParams:
    """Geometric convex combinations of cycles, one group of cycles per cluster.

    ``drop`` is the chance that a vertex is skipped by a non-base cycle and
    ``reversal_rate`` the number of short segment reversals per cycle vertex;
    ``perturbation`` shrinks each cycle weight by a random factor in
    ``[1 - perturbation, 1]`` so weights stay a sub-convex combination.
    """

    n: int
    clusters: int = 1
    cycles_per_cluster: int = 2
    mix: str = "uniform"
    perturbation: float = 0.0
    drop: float = 0.3
    seed: int = 0
    reversal_rate: float = 0.125

    def check(self) -> None:
        if self.clusters < 1 or self.cycles_per_cluster < 1:
            raise DomainError("clusters and cycles_per_cluster must be at least 1")
        if self.n < 3 * self.clusters:
            raise DomainError(f"n={self.n} too small for {self.clusters} clusters of at least 3 vertices")
        if self.mix not in ("uniform", "equal"):
            raise DomainError(f"unknown mix policy {self.mix!r}")
        if not 0.0 <= self.perturbation <= 1.0:
            raise DomainError("perturbation must lie in [0, 1]")
        if not 0.0 <= self.drop < 1.0:
            raise DomainError("drop must lie in [0, 1)")
        if not 0.0 <= self.reversal_rate <= 1.0:
            raise DomainError("reversal_rate must lie in [0, 1]")


def _base_tour(ids: list[int], pts: np.ndarray) -> list[int]:
    """Nearest-neighbour tour through ``ids``."""
    left = np.array(ids[1:], dtype=np.int64)
    tour = [ids[0]]
    while left.size:
        d = np.sum((pts[left] - pts[tour[-1]]) ** 2, axis=1)
        i = int(np.argmin(d))
        tour.append(int(left[i]))
        left = np.delete(left, i)
    return tour


def _variant(tour: list[int], rng: random.Random, drop: float, rate: float) -> list[int]:
    cyc = list(tour)
    k = len(cyc)
    # short 2-opt style reversals keep edges short
    for _ in range(max(1, int(k * rate))):
        i = rng.randrange(k)
        j = min(k, i + rng.randint(2, 5))
        cyc[i:j] = reversed(cyc[i:j])
    kept = [v for v in cyc if rng.random() >= drop]
    if len(kept) < 3:
        kept = cyc[:3]
    return kept


def generate_synthetic(params: SyntheticParams) -> FractionalPoint:
    """Deterministic point built from ``params`` (see :class:`SyntheticParams`)."""
    params.check()
    rng = random.Random(params.seed)
    nprng = np.random.default_rng(params.seed)
    n = params.n
    pts = np.vstack([np.zeros((1, 2)), nprng.random((n, 2))])  # row 0 unused
    by_x = sorted(range(1, n + 1), key=lambda v: (pts[v, 0], v))
    groups = [list(map(int, g)) for g in np.array_split(np.array(by_x), params.clusters)]
    y: dict[int, float] = {}
    x: dict[tuple[int, int], float] = {}
    for ids in groups:
        ids = sorted(ids)
        base = _base_tour(ids, pts)
        cycles = [base] + [_variant(base, rng, params.drop, params.reversal_rate) for _ in range(params.cycles_per_cluster - 1)]
        k = len(cycles)
        if params.mix == "uniform":
            lam = nprng.dirichlet(np.ones(k))
        else:
            lam = np.full(k, 1.0 / k)
        if params.perturbation > 0.0:
            lam = lam * (1.0 - params.perturbation * nprng.random(k))
        for cyc, w in zip(cycles, lam.tolist()):
            for i, v in enumerate(cyc):
                y[v] = y.get(v, 0.0) + w
                e = edge_key(v, cyc[(i + 1) % len(cyc)])
                x[e] = x.get(e, 0.0) + w
    return FractionalPoint(n, y, x)
