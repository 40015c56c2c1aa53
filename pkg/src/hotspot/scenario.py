"""Ground-truth scenario generation.

Two labeled snapshot sources: an SI contagion grown to a target size and
then observed through a noisy reporting overlay (false negatives with
probability 1-q, plus round(f*|true reporters|) uniform extra reporters),
and the matched null where every node reports independently with a fixed
probability. All functions are pure given their rng_seed.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .seeds import derive_seed

logger = logging.getLogger(__name__)

EPIDEMIC = "epidemic"
UNIFORM = "uniform"


@dataclass(frozen=True)
class ScenarioParams:
    """Contagion-plus-reporting parameters.

    alpha: fraction of nodes ultimately infected, in (0, 1].
    q: probability an infected node truly reports.
    f: extra (uniformly placed) reporters per true reporter, >= 0.
    num_seeds: initially infected node count.
    """

    alpha: float
    q: float
    f: float
    num_seeds: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must be in [0, 1]")
        if self.f < 0.0:
            raise ValueError("f must be >= 0")
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be >= 1")

    def target_size(self, n: int) -> int:
        return math.ceil(self.alpha * n)

    def validate_for(self, n: int) -> None:
        if self.target_size(n) < self.num_seeds:
            raise ValueError(
                f"target infection size {self.target_size(n)} smaller than "
                f"num_seeds={self.num_seeds}")
        if (self.f + 1.0) * self.q * self.alpha > 1.0:
            raise ValueError(
                "(f+1)*q*alpha > 1: matched null reporting probability "
                "would not be a probability")


@dataclass
class EpidemicOutcome:
    """An SI realization: seeds, infected nodes in infection order."""

    seeds: list[int]
    infected: list[int]
    truncated: bool = False

    @property
    def infection_order(self) -> dict[int, int]:
        return {node: rank for rank, node in enumerate(self.infected)}


@dataclass
class ReportSnapshot:
    """One observed snapshot plus the ground truth the harness scores against."""

    n: int
    reporting: set[int]
    truth: str
    true_reporters: set[int] = field(default_factory=set)
    infected: set[int] = field(default_factory=set)

    def to_text(self) -> str:
        lines = [f"truth={self.truth} n={self.n}"]
        lines.extend(str(i) for i in sorted(self.reporting))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ReportSnapshot":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("truth="):
            raise ValueError("snapshot must start with 'truth=<label> n=<N>'")
        head = dict(part.split("=", 1) for part in lines[0].split())
        try:
            n = int(head["n"])
            truth = head["truth"]
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed snapshot header: {lines[0]!r}") from exc
        reporting = set()
        for ln in lines[1:]:
            if not ln.isdigit():
                raise ValueError(f"malformed snapshot line: {ln!r}")
            node = int(ln)
            if node >= n:
                raise ValueError(f"reporting node {node} out of range for n={n}")
            reporting.add(node)
        return cls(n=n, reporting=reporting, truth=truth)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "ReportSnapshot":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def pick_seeds(g: Graph, num_seeds: int, rng_seed: int) -> list[int]:
    """Uniform sample of initially infected nodes, without replacement."""
    if not 1 <= num_seeds <= g.n:
        raise ValueError("num_seeds must be in [1, n]")
    rng = np.random.default_rng(rng_seed)
    return sorted(rng.choice(g.n, size=num_seeds, replace=False).tolist())


def simulate_si(g: Graph, seeds, target_size: int, rng_seed: int) -> EpidemicOutcome:
    """Grow an SI contagion from ``seeds`` until ``target_size`` nodes are infected.

    Every infected-susceptible edge carries an independent Exp(1) clock;
    the next infection is the minimum clock, i.e. first-passage percolation
    from the seed set. If the seed components hold fewer than target_size
    nodes the outcome is truncated (flagged, not an error).
    """
    seeds = list(seeds)
    if not seeds or len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be nonempty and distinct")
    if target_size < len(seeds):
        raise ValueError("target_size must be >= number of seeds")
    rng = np.random.default_rng(rng_seed)
    infected_set = set(seeds)
    infected = list(seeds)
    heap: list[tuple[float, int]] = []
    for s in seeds:
        if s < 0 or s >= g.n:
            raise ValueError(f"seed {s} out of range")
        for w in g.neighbors(s).tolist():
            if w not in infected_set:
                heapq.heappush(heap, (rng.exponential(), w))
    while len(infected) < target_size and heap:
        t, v = heapq.heappop(heap)
        if v in infected_set:
            continue
        infected_set.add(v)
        infected.append(v)
        if len(infected) >= target_size:
            break
        for w in g.neighbors(v).tolist():
            if w not in infected_set:
                heapq.heappush(heap, (t + rng.exponential(), w))
    truncated = len(infected) < target_size
    if truncated:
        logger.debug("contagion exhausted seed components at %d/%d nodes",
                     len(infected), target_size)
    return EpidemicOutcome(seeds=seeds, infected=infected, truncated=truncated)


def _sample_outside(n: int, count: int, excluded: set[int], rng) -> list[int]:
    """count distinct uniform draws from {0..n-1} minus excluded."""
    available = n - len(excluded)
    if count > available:
        raise ValueError("not enough nodes outside the excluded set")
    if n <= 100_000 or count > available // 2:
        pool = np.setdiff1d(np.arange(n, dtype=np.int64),
                            np.fromiter(excluded, dtype=np.int64, count=len(excluded)))
        return rng.choice(pool, size=count, replace=False).tolist()
    # rejection sampling; excluded and count are small relative to n here
    chosen: set[int] = set()
    while len(chosen) < count:
        draw = rng.integers(0, n, size=2 * (count - len(chosen)) + 8).tolist()
        for v in draw:
            if v not in excluded and v not in chosen:
                chosen.add(v)
                if len(chosen) == count:
                    break
    return sorted(chosen)


def apply_reporting(outcome: EpidemicOutcome, g: Graph, q: float, f: float,
                    rng_seed: int) -> ReportSnapshot:
    """Observe an epidemic through the noisy reporting channel.

    Each infected node reports with probability q (the true reporters);
    then round(f * |true reporters|) additional nodes, drawn uniformly
    without replacement from everyone else, also report. Rounding is
    round-half-to-even. If the request exceeds the remaining pool it is
    clamped with a warning.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be in [0, 1]")
    if f < 0.0:
        raise ValueError("f must be >= 0")
    rng = np.random.default_rng(rng_seed)
    infected = np.asarray(outcome.infected, dtype=np.int64)
    mask = rng.random(infected.size) < q
    true_reporters = set(infected[mask].tolist())
    extras_wanted = round(f * len(true_reporters))
    available = g.n - len(true_reporters)
    if extras_wanted > available:
        logger.warning("clamping %d extra reporters to the %d remaining nodes",
                       extras_wanted, available)
        extras_wanted = available
    extras = _sample_outside(g.n, extras_wanted, true_reporters, rng) if extras_wanted else []
    return ReportSnapshot(
        n=g.n,
        reporting=true_reporters | set(extras),
        truth=EPIDEMIC,
        true_reporters=true_reporters,
        infected=set(outcome.infected),
    )


def generate_uniform_null(g: Graph, p: float, rng_seed: int) -> ReportSnapshot:
    """Every node reports independently with probability p (the null)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = np.random.default_rng(rng_seed)
    mask = rng.random(g.n) < p
    return ReportSnapshot(
        n=g.n,
        reporting=set(np.flatnonzero(mask).tolist()),
        truth=UNIFORM,
    )


def make_epidemic_snapshot(g: Graph, params: ScenarioParams, rng_seed: int,
                           ) -> tuple[ReportSnapshot, EpidemicOutcome]:
    """Seeds -> SI growth to ceil(alpha*n) -> reporting overlay, one call."""
    params.validate_for(g.n)
    seeds = pick_seeds(g, params.num_seeds, derive_seed(rng_seed, "seeds"))
    outcome = simulate_si(g, seeds, params.target_size(g.n), derive_seed(rng_seed, "si"))
    snap = apply_reporting(outcome, g, params.q, params.f, derive_seed(rng_seed, "report"))
    return snap, outcome
