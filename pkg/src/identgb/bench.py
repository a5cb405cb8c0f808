"""Benchmark harness: one row per (model, ordering) with F4 work counters."""

from __future__ import annotations

import csv
import io
import json
import time
from functools import lru_cache
from dataclasses import asdict, dataclass, field

from .builtin import get_model, jason210
from .generator import generate
from .groebner import GBTimeout, f4
from .groebner.field import DEFAULT_PRIME
from .groebner.ordering import degrevlex
from .groebner.poly import FpPolynomial, PolyRing
from .identifiability import model_weights
from .weights import WeightMap

ORDERINGS = ("sian-legacy", "diff-degrevlex", "weighted", "inverted")
CSV_COLUMNS = ("model", "polys", "vars", "ordering", "time_ms", "max_pairs", "zero_reductions", "completed", "speedup")


@dataclass
class BenchRow:
    model: str
    polys: int
    vars: int
    ordering: str
    time_ms: float
    max_pairs: int
    zero_reductions: int
    completed: bool
    speedup: float | None = None
    error: str | None = None
    stats: dict = field(default_factory=dict)

    def csv_record(self) -> list[str]:
        sp = "" if self.speedup is None else f"{self.speedup:.3f}"
        return [
            self.model,
            str(self.polys),
            str(self.vars),
            self.ordering,
            f"{self.time_ms:.1f}",
            str(self.max_pairs),
            str(self.zero_reductions),
            "true" if self.completed else "false",
            sp,
        ]


def _system_and_ordering(name: str, label: str, prime: int, seed, strategy: str):
    if name in ("jason210", "jason-210"):
        S = jason210(prime)
        if label in ("weighted", "inverted"):
            S = S.substitute_weights(WeightMap({"x8": 2}))
        return S, S.ordering("degrevlex")
    m = get_model(name)
    ss = generate(m, prime=prime, seed=seed)
    S = ss.system
    if label == "sian-legacy":
        return S, S.ordering("sian_legacy")
    if label == "diff-degrevlex":
        return S, S.ordering()
    w = model_weights(m, "standard" if label == "weighted" else "inverted", ss.local)
    if strategy == "native":
        return S, S.ordering("weighted", S.variable_weights(w))
    S = S.substitute_weights(w)
    return S, S.ordering()


@lru_cache(maxsize=None)
def _warm_kernels(prime: int) -> None:
    """Load the compiled F4 kernels once so the first timed row does not pay for it."""
    ring = PolyRing(degrevlex(("x", "y")), prime)
    f4([FpPolynomial.from_terms(ring, {(2, 0): 1, (0, 1): 1}), FpPolynomial.from_terms(ring, {(1, 1): 1, (0, 0): 1})], ring)


def run_one(name: str, label: str, timeout=None, prime=DEFAULT_PRIME, seed=0, strategy="substitute") -> BenchRow:
    if label not in ORDERINGS:
        raise ValueError(f"unknown ordering label {label!r}")
    try:
        S, o = _system_and_ordering(name, label, prime, seed, strategy)
    except Exception as exc:  # recorded in the row, the batch goes on
        return BenchRow(name, 0, 0, label, 0.0, 0, 0, False, error=f"{type(exc).__name__}: {exc}")
    _warm_kernels(prime)
    t0 = time.perf_counter()
    try:
        _, stats = f4(S.to_fp(o), timeout=timeout)
        done = True
    except GBTimeout as exc:
        stats = exc.stats
        done = False
    ms = (time.perf_counter() - t0) * 1000
    return BenchRow(
        name, S.num_polys, S.num_vars, label, ms, stats.max_pairs_selected, stats.zero_reductions, done,
        stats=stats.to_json(),
    )


def run_bench(models, configs=("diff-degrevlex", "weighted"), timeout=None, prime=DEFAULT_PRIME, seed=0,
              strategy="substitute", on_row=None) -> list[BenchRow]:
    """Run every ordering label on every model; the first label is the speedup baseline.

    ``on_row`` is called with each row as soon as it is measured.
    """
    rows: list[BenchRow] = []
    for name in models:
        base = None
        for label in configs:
            row = run_one(name, label, timeout, prime, seed, strategy)
            if base is None:
                base = row
            elif base.completed and row.completed and row.time_ms > 0:
                row.speedup = base.time_ms / row.time_ms
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return rows


def emit_report(rows, fmt: str = "csv") -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in rows:
            wr.writerow(r.csv_record())
        return buf.getvalue().encode()
    if fmt == "json":
        return (json.dumps([asdict(r) for r in rows], indent=2) + "\n").encode()
    if fmt == "text":
        head = ["model", "polys", "vars", "ordering", "time (ms)", "max pairs", "zero red.", "done", "speedup"]
        body = [r.csv_record() for r in rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(head)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines.extend("  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body)
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_csv(data: bytes) -> list[BenchRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(data.decode())):
        rows.append(
            BenchRow(
                rec["model"],
                int(rec["polys"]),
                int(rec["vars"]),
                rec["ordering"],
                float(rec["time_ms"]),
                int(rec["max_pairs"]),
                int(rec["zero_reductions"]),
                rec["completed"] == "true",
                float(rec["speedup"]) if rec["speedup"] else None,
            )
        )
    return rows
