"""Seeded Monte Carlo runs with Wilson intervals and mergeable statistics.

Trial i always draws its coins from the stream (seed, i), so any split of
the trial range across workers reproduces the sequential result exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
import os
from dataclasses import asdict, dataclass, fields

from scipy.stats import norm

from .core import MachineSpec
from .engines import ACCEPT, CUTOFF, REJECT, TrialOutcome, run_trial

WORKERS_ENV = "IPSIM_WORKERS"

CSV_COLUMNS = (
    "label", "trials", "accept", "reject", "cutoff", "accept_rate", "accept_low", "accept_high",
    "confidence", "runtime_mean", "runtime_var", "runtime_max", "private_mean", "private_var",
    "public_mean", "public_var",
)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if not 0 <= successes <= trials or trials < 1:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else min(p, centre - half)
    high = 1.0 if successes == trials else max(p, centre + half)
    return low, high


@dataclass
class SimulationStats:
    """Counts plus running sums; moments are over halting trials only."""

    trials: int = 0
    accept: int = 0
    reject: int = 0
    cutoff: int = 0
    confidence: float = 0.999
    steps_sum: int = 0
    steps_sq: int = 0
    steps_max: int = 0
    private_sum: int = 0
    private_sq: int = 0
    public_sum: int = 0
    public_sq: int = 0
    label: str = ""

    def add(self, verdict: str, steps: int, private: int = 0, public: int = 0) -> None:
        self.trials += 1
        if verdict == CUTOFF:
            self.cutoff += 1
            return
        if verdict == ACCEPT:
            self.accept += 1
        elif verdict == REJECT:
            self.reject += 1
        else:
            raise ValueError(f"unknown verdict {verdict!r}")
        self.steps_sum += steps
        self.steps_sq += steps * steps
        self.steps_max = max(self.steps_max, steps)
        self.private_sum += private
        self.private_sq += private * private
        self.public_sum += public
        self.public_sq += public * public

    def add_outcome(self, o: TrialOutcome) -> None:
        self.add(o.verdict, o.steps, o.private_coins_used, o.public_coins_used)

    def merge(self, other: "SimulationStats") -> "SimulationStats":
        out = SimulationStats(confidence=self.confidence, label=self.label)
        for f in ("trials", "accept", "reject", "cutoff", "steps_sum", "steps_sq", "private_sum",
                  "private_sq", "public_sum", "public_sq"):
            setattr(out, f, getattr(self, f) + getattr(other, f))
        out.steps_max = max(self.steps_max, other.steps_max)
        return out

    @property
    def halted(self) -> int:
        return self.accept + self.reject

    def _moments(self, total: int, sq: int) -> tuple[float, float]:
        h = self.halted
        if h == 0:
            return math.nan, math.nan
        mean = total / h
        var = (sq - total * total / h) / (h - 1) if h > 1 else 0.0
        return mean, var

    @property
    def accept_rate(self) -> float:
        return self.accept / self.trials

    def accept_interval(self) -> tuple[float, float]:
        return wilson_interval(self.accept, self.trials, self.confidence)

    def error(self, member: bool) -> tuple[float, tuple[float, float]]:
        """Estimated error with interval: non-acceptance for members, acceptance otherwise."""
        bad = self.trials - self.accept if member else self.accept
        return bad / self.trials, wilson_interval(bad, self.trials, self.confidence)

    def row(self) -> dict:
        lo, hi = self.accept_interval()
        rm, rv = self._moments(self.steps_sum, self.steps_sq)
        pm, pv = self._moments(self.private_sum, self.private_sq)
        qm, qv = self._moments(self.public_sum, self.public_sq)
        return dict(zip(CSV_COLUMNS, (
            self.label, self.trials, self.accept, self.reject, self.cutoff, self.accept_rate, lo, hi,
            self.confidence, rm, rv, self.steps_max, pm, pv, qm, qv)))

    def to_json(self) -> str:
        return json.dumps({**self.row(), "raw": asdict(self)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SimulationStats":
        raw = json.loads(text)["raw"]
        return cls(**{f.name: raw[f.name] for f in fields(cls)})


def stats_to_csv(stats: list[SimulationStats]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for s in stats:
        writer.writerow(s.row())
    return buf.getvalue()


# -- running -----------------------------------------------------------------

def _fast_capable(target) -> bool:
    if not isinstance(target, MachineSpec) or target.pub or target.com:
        return False
    blank = target.work_blank
    return all(m.work == blank and m.d_work == 0 for m in target.delta.values())


def _run_range(target, prover, w, cutoff, seed, start, stop, confidence, fast) -> SimulationStats:
    stats = SimulationStats(confidence=confidence)
    if fast:
        from .fastpfa import run_fast

        batch = run_fast(target, w, seed, stop - start, cutoff, trial0=start)
        for i in range(stop - start):
            stats.add(batch.verdict(i), int(batch.steps[i]), int(batch.private_coins[i]), 0)
        return stats
    for i in range(start, stop):
        if isinstance(target, MachineSpec):
            o = run_trial(target, prover, w, seed, cutoff, trial=i, record=False)
        else:
            o = target.run_trial(prover, w, seed, cutoff=cutoff, trial=i)
        stats.add_outcome(o)
    return stats


_JOB: tuple | None = None


def _worker(bounds):
    return _run_range(*_JOB[:5], *bounds, *_JOB[5:])


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def monte_carlo(target, prover, w: str, trials: int, cutoff: int, seed: int,
                confidence: float = 0.999, workers: int | None = None,
                fast: bool | None = None, label: str = "") -> SimulationStats:
    """Run trials 0..trials-1; ``target`` is a MachineSpec or a composite with run_trial."""
    global _JOB
    if trials < 1:
        raise ValueError("trials must be at least 1")
    fast = _fast_capable(target) if fast is None else fast
    workers = default_workers() if workers is None else workers
    if workers <= 1 or fast or trials < 2 * workers:
        stats = _run_range(target, prover, w, cutoff, seed, 0, trials, confidence, fast)
    else:
        edges = [trials * k // workers for k in range(workers + 1)]
        _JOB = (target, prover, w, cutoff, seed, confidence, fast)
        try:
            with mp.get_context("fork").Pool(workers) as pool:
                parts = pool.map(_worker, list(zip(edges[:-1], edges[1:])))
        finally:
            _JOB = None
        stats = parts[0]
        for p in parts[1:]:
            stats = stats.merge(p)
    stats.label = label
    return stats
