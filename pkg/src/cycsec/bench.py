"""Benchmark grids over (instance, strategy, algorithm, repetition).

One CSV row per combination, an aggregate table of means and speedups
against the (EH, NO) baseline, and a report on whether the final shrunk
graph depends on the random heap order.
"""

from __future__ import annotations

import csv
import io
import os
import random
import statistics
import tempfile
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from .cutgen import CutGenPolicy, generate_cuts
from .errors import ConfigError
from .graph import EQ_TOL, FractionalPoint
from .instance import SyntheticParams, generate_synthetic, load_instance
from .oracle import best_endpoint_slack, oracle_pairwise
from .separation import Algorithm, separate
from .shrink import RULE_NAMES, Strategy

COLUMNS = (
    "instance", "size_class", "strategy", "algorithm", "rep", "seed",
    "supp_V", "supp_E", "shrunk_V", "shrunk_E",
    "preprocess_Q", "preprocess_ms", "sep_Q", "sep_ms",
    "cuts_1x1", "cuts_kxk", "cutgen_ms",
    *RULE_NAMES, "extra", "verified",
)  # fmt: skip

AGG_COLUMNS = (
    "size_class", "strategy", "algorithm", "runs", "shrunk_pct",
    "preprocess_Q", "sep_Q", "preprocess_ms", "sep_ms", "total_ms",
    "speedup_sep", "speedup_total",
)  # fmt: skip

TIMING_COLUMNS = ("preprocess_ms", "sep_ms", "cutgen_ms")


@dataclass(frozen=True)
class InstanceSpec:
    """A CYCSEC file or a synthetic recipe, plus an optional size-class tag."""

    name: str
    path: str | None = None
    synthetic: SyntheticParams | None = None
    size_class: str = ""

    @classmethod
    def from_path(cls, path: str | Path, size_class: str = "") -> "InstanceSpec":
        return cls(Path(path).stem, path=str(path), size_class=size_class)

    @classmethod
    def from_synthetic(cls, params: SyntheticParams, size_class: str = "") -> "InstanceSpec":
        name = f"syn-{params.n}-{params.clusters}-{params.cycles_per_cluster}-s{params.seed}"
        return cls(name, synthetic=params, size_class=size_class)

    def load(self) -> FractionalPoint:
        if self.synthetic is not None:
            return generate_synthetic(self.synthetic)
        if self.path is None:
            raise ConfigError(f"instance {self.name!r} has neither a path nor synthetic parameters")
        return load_instance(self.path)


def parse_synthetic(text: str) -> SyntheticParams:
    """``n,clusters,cycles`` followed by optional ``key=value`` overrides."""
    parts = [t.strip() for t in text.split(",") if t.strip()]
    if len(parts) < 3:
        raise ConfigError(f"synthetic spec {text!r} needs n,clusters,cycles")
    try:
        kw: dict = {"n": int(parts[0]), "clusters": int(parts[1]), "cycles_per_cluster": int(parts[2])}
    except ValueError:
        raise ConfigError(f"synthetic spec {text!r}: n, clusters and cycles must be integers") from None
    types = {f.name: f.type for f in fields(SyntheticParams)}
    for extra in parts[3:]:
        key, sep, val = extra.partition("=")
        if not sep or key not in types:
            raise ConfigError(f"synthetic spec {text!r}: unknown override {extra!r}")
        try:
            kw[key] = val if key == "mix" else int(val) if types[key] == "int" else float(val)
        except ValueError:
            raise ConfigError(f"synthetic spec {text!r}: bad value in {extra!r}") from None
    return SyntheticParams(**kw)


@dataclass(frozen=True)
class BenchConfig:
    instances: tuple[InstanceSpec, ...]
    strategies: tuple[Strategy, ...] = tuple(Strategy)
    algorithms: tuple[Algorithm, ...] = tuple(Algorithm)
    reps: int = 10
    seed: int = 0
    k_in: int = 1
    k_out: int = 1
    depot_aware: bool = False
    skip_if_preprocess: bool = False
    pair_scan: bool = False
    verify: bool = False
    timings: bool = True
    jobs: int = 1

    def check(self) -> None:
        if not self.instances:
            raise ConfigError("at least one instance is required")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not self.strategies or not self.algorithms:
            raise ConfigError("strategy and algorithm lists must be nonempty")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        names = [s.name for s in self.instances]
        if len(set(names)) != len(names):
            raise ConfigError("instance names must be unique")
        CutGenPolicy(self.k_in, self.k_out)


@dataclass
class BenchReport:
    rows: list[dict]
    aggregate: list[dict]
    divergences: list[str] = field(default_factory=list)
    mismatches: int = 0

    def rows_csv(self) -> str:
        return _to_csv(COLUMNS, self.rows)

    def aggregate_csv(self) -> str:
        return _to_csv(AGG_COLUMNS, self.aggregate)

    def summary(self) -> str:
        lines = [f"{len(self.rows)} runs"]
        for a in self.aggregate:
            lines.append(
                f"  [{a['size_class'] or '-'}] {a['strategy']:<7} {a['algorithm']:<4}"
                f" shrunk {a['shrunk_pct']}%  total_ms {a.get('total_ms') or '-'}"
                f"  speedup {a.get('speedup_total') or '-'}"
            )
        if self.divergences:
            lines.append("shrunk-graph divergence across seeds:")
            lines += [f"  {d}" for d in self.divergences]
        else:
            lines.append("shrunk graph identical across seeds for every (instance, strategy)")
        if self.mismatches:
            lines.append(f"VERIFY: {self.mismatches} mismatches against the pairwise oracle")
        return "\n".join(lines) + "\n"


def _to_csv(columns: Sequence[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _ms(val: float) -> str:
    return f"{val:.1f}"


def _run_one(cfg: BenchConfig, spec: InstanceSpec, p: FractionalPoint, rep: int, oracle_best: float | None) -> list[dict]:
    seed = cfg.seed + rep
    rows = []
    for strategy in cfg.strategies:
        for algo in cfg.algorithms:
            repo, st = separate(
                p, algo, strategy, rng=random.Random(seed),
                skip_if_preprocess=cfg.skip_if_preprocess, pair_scan=cfg.pair_scan,
            )  # fmt: skip
            one = generate_cuts(repo, p, policy=CutGenPolicy(1, 1, cfg.depot_aware), rng=random.Random(seed))
            t0 = time.perf_counter()
            many = generate_cuts(
                repo, p, policy=CutGenPolicy(cfg.k_in, cfg.k_out, cfg.depot_aware), rng=random.Random(seed)
            )
            cutgen_ms = (time.perf_counter() - t0) * 1000.0
            row = {
                "instance": spec.name,
                "size_class": spec.size_class,
                "strategy": strategy.value,
                "algorithm": algo.value,
                "rep": rep,
                "seed": seed,
                "supp_V": st.supp_v,
                "supp_E": st.supp_e,
                "shrunk_V": st.shrunk_v,
                "shrunk_E": st.shrunk_e,
                "preprocess_Q": st.preprocess_q,
                "preprocess_ms": _ms(st.preprocess_ms),
                "sep_Q": st.sep_q,
                "sep_ms": _ms(st.sep_ms),
                "cuts_1x1": len(one),
                "cuts_kxk": len(many),
                "cutgen_ms": _ms(cutgen_ms),
                "extra": st.extra_contractions,
                "verified": "",
            }
            for r in RULE_NAMES:
                row[r] = st.rule_counts.get(r, 0)
            if oracle_best is not None:
                row["verified"] = "ok" if _agrees(p, repo, oracle_best) else "MISMATCH"
            if not cfg.timings:
                for c in TIMING_COLUMNS:
                    row[c] = ""
            rows.append(row)
    return rows


def _agrees(p: FractionalPoint, repo, oracle_best: float) -> bool:
    best = min((best_endpoint_slack(p, Q) for Q in repo), default=0.0)
    found = max(0.0, -best)
    return (len(repo) > 0) == (oracle_best > 0.0) and abs(found - oracle_best) <= EQ_TOL


def _task(args) -> list[dict]:
    cfg, spec, rep, oracle_best = args
    return _run_one(cfg, spec, spec.load(), rep, oracle_best)


def _aggregate(cfg: BenchConfig, rows: list[dict]) -> list[dict]:
    groups: dict[tuple[str, str, str], list[dict]] = defaultdict(list)
    for r in rows:
        groups[(r["size_class"], r["strategy"], r["algorithm"])].append(r)

    def mean(rs, key):
        return statistics.fmean(float(r[key]) for r in rs)

    out = []
    for (cls, strat, algo), rs in sorted(groups.items(), key=lambda kv: _group_order(cfg, kv[0])):
        base = groups.get((cls, Strategy.NO.value, Algorithm.EH.value))
        rec = {
            "size_class": cls,
            "strategy": strat,
            "algorithm": algo,
            "runs": len(rs),
            "shrunk_pct": f"{100.0 * mean(rs, 'shrunk_V') / max(mean(rs, 'supp_V'), 1.0):.1f}",
            "preprocess_Q": f"{mean(rs, 'preprocess_Q'):.2f}",
            "sep_Q": f"{mean(rs, 'sep_Q'):.2f}",
        }
        if cfg.timings:
            pre, sep = mean(rs, "preprocess_ms"), mean(rs, "sep_ms")
            rec.update(preprocess_ms=_ms(pre), sep_ms=_ms(sep), total_ms=_ms(pre + sep))
            if base is not None:
                b_sep = mean(base, "sep_ms")
                b_total = b_sep + mean(base, "preprocess_ms")
                rec["speedup_sep"] = f"{b_sep / sep:.2f}" if sep > 0 else "inf"
                rec["speedup_total"] = f"{b_total / (pre + sep):.2f}" if pre + sep > 0 else "inf"
        out.append(rec)
    return out


def _group_order(cfg: BenchConfig, key: tuple[str, str, str]):
    cls, strat, algo = key
    return (cls, [s.value for s in cfg.strategies].index(strat), [a.value for a in cfg.algorithms].index(algo))


def shrink_divergences(rows: list[dict]) -> list[str]:
    """(instance, strategy) pairs whose final shrunk size differs between seeds."""
    seen: dict[tuple[str, str], set[tuple[int, int]]] = defaultdict(set)
    for r in rows:
        seen[(r["instance"], r["strategy"])].add((int(r["shrunk_V"]), int(r["shrunk_E"])))
    return [
        f"{inst} {strat}: " + ", ".join(f"({v},{e})" for v, e in sorted(sizes))
        for (inst, strat), sizes in sorted(seen.items())
        if len(sizes) > 1
    ]


def run_bench(cfg: BenchConfig) -> BenchReport:
    """Run the whole grid; rows come out in a fixed order whatever ``jobs`` is."""
    cfg.check()
    points = [spec.load() for spec in cfg.instances]  # parse errors abort before any run
    oracle_best: list[float | None] = [oracle_pairwise(p).max_violation if cfg.verify else None for p in points]
    tasks = [(cfg, spec, rep, oracle_best[i]) for i, spec in enumerate(cfg.instances) for rep in range(cfg.reps)]
    if cfg.jobs == 1:
        results = [_run_one(cfg, spec, points[i // cfg.reps], rep, ob) for i, (_, spec, rep, ob) in enumerate(tasks)]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_task, tasks))
    # reorder as instance, strategy, algorithm, rep
    by_key = {}
    for rows in results:
        for r in rows:
            by_key[(r["instance"], r["strategy"], r["algorithm"], r["rep"])] = r
    rows = [
        by_key[(spec.name, s.value, a.value, rep)]
        for spec in cfg.instances
        for s in cfg.strategies
        for a in cfg.algorithms
        for rep in range(cfg.reps)
    ]
    mismatches = sum(r["verified"] == "MISMATCH" for r in rows)
    return BenchReport(rows, _aggregate(cfg, rows), shrink_divergences(rows), mismatches)


def write_atomic(path: str | Path, text: str) -> None:
    """Write through a temporary file so a failed run never leaves half a CSV."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def aggregate_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".aggregate" + (out.suffix or ".csv"))
