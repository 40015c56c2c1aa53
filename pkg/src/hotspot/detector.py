"""The snapshot classifier and its parameter-selection rules.

A reporting node is a *hotspot* when at least s of its surrounding nodes
(the K nearest, or everything within ball radius l) are also reporting.
The classifier sums the hotspot indicators over all reporting nodes and
declares a contagion when the sum strictly exceeds the decision threshold
t. Runtime is linear in the number of reporting nodes times neighborhood
size; non-reporting nodes are touched only as BFS frontier.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

from .scenario import EPIDEMIC, UNIFORM

logger = logging.getLogger(__name__)

NN = "nn"
BALL = "ball"

VERDICT_CSV_HEADER = "truth,label,hotspot_count,threshold,k,mode"

# per-node indicator maps are dropped by default above this node count
_INDICATOR_RETENTION_LIMIT = 1_000_000


@dataclass(frozen=True)
class DetectorConfig:
    """Neighborhood mode ("nn" or "ball"), its size, the hotspot count
    threshold s, and the decision threshold t (strict >)."""

    mode: str
    k_or_l: int
    s: int
    t: float
    note: str = ""

    def __post_init__(self):
        if self.mode not in (NN, BALL):
            raise ValueError(f"mode must be '{NN}' or '{BALL}'")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.k_or_l < 0:
            raise ValueError("k_or_l must be >= 0")

    @classmethod
    def nn(cls, k: int, t: float, s: int | None = None, note: str = "") -> "DetectorConfig":
        return cls(mode=NN, k_or_l=k, s=k if s is None else s, t=t, note=note)

    @classmethod
    def ball_mode(cls, l: int, s: int, t: float, note: str = "") -> "DetectorConfig":
        return cls(mode=BALL, k_or_l=l, s=s, t=t, note=note)

    def with_threshold(self, t: float) -> "DetectorConfig":
        return replace(self, t=t)


@dataclass
class Verdict:
    """Classifier output; label is EPIDEMIC iff hotspot_count > threshold."""

    label: str
    hotspot_count: int
    threshold: float
    mode: str
    k_or_l: int
    per_node: dict[int, bool] | None = None
    note: str = ""

    def csv_row(self, truth: str | None = None) -> str:
        return (f"{truth or ''},{self.label},{self.hotspot_count},"
                f"{self.threshold:.10g},{self.k_or_l},{self.mode}")


def _members(view, i: int, cfg: DetectorConfig) -> list[int]:
    if cfg.mode == NN:
        return view.nn_members(i, cfg.k_or_l)
    return view.ball_members(i, cfg.k_or_l)


def reporter_count(view, i: int, cfg: DetectorConfig, reporting) -> int:
    """Number of reporting nodes in i's neighborhood (i itself not counted)."""
    return sum(1 for v in _members(view, i, cfg) if v in reporting)


def hotspot_indicator(view, i: int, cfg: DetectorConfig, reporting) -> bool:
    """True iff at least cfg.s neighborhood members of i are reporting.

    Meant to be evaluated at reporting nodes i; the center's own report is
    never counted.
    """
    return reporter_count(view, i, cfg, reporting) >= cfg.s


def classify(view, reporting, cfg: DetectorConfig,
             keep_indicators: bool | None = None) -> Verdict:
    """Run the hotspot count test over a reporting snapshot.

    ``view`` is a Graph or any object exposing n / nn_members / ball_members
    (e.g. the harness's noisy-distance view). ``keep_indicators=None`` keeps
    the per-node map only for graphs up to a million nodes.
    """
    reporting = reporting if isinstance(reporting, (set, frozenset)) else set(reporting)
    if keep_indicators is None:
        keep_indicators = view.n <= _INDICATOR_RETENTION_LIMIT
    per_node: dict[int, bool] | None = {} if keep_indicators else None
    count = 0
    for i in sorted(reporting):
        fired = hotspot_indicator(view, i, cfg, reporting)
        count += fired
        if per_node is not None:
            per_node[i] = fired
    label = EPIDEMIC if count > cfg.t else UNIFORM
    return Verdict(label=label, hotspot_count=count, threshold=cfg.t,
                   mode=cfg.mode, k_or_l=cfg.k_or_l, per_node=per_node,
                   note=cfg.note)


def reporting_prefix_length(view, i: int, k_max: int, reporting) -> int:
    """Length of the all-reporting prefix of i's nearest-neighbor order.

    Equals the largest K <= k_max such that all of i's K nearest neighbors
    report (0 if the closest one does not). Lets one BFS serve every K in
    a multi-K test.
    """
    length = 0
    for v in view.nn_members(i, k_max):
        if v in reporting:
            length += 1
        else:
            break
    return length


def multi_k_test(view, reporting, k_range, null_expectations: dict[int, float],
                 deviation_factor: float) -> Verdict:
    """Deviation test against the null's expected hotspot counts.

    For each K in k_range the canonical indicator (s=K over the K nearest
    neighbors) is summed over reporting nodes; the snapshot is declared a
    contagion iff any count deviates from its supplied null expectation by
    more than deviation_factor * sqrt(expectation). One BFS per reporting
    node serves all K.
    """
    k_range = sorted(set(int(k) for k in k_range))
    if not k_range:
        raise ValueError("k_range must be nonempty")
    k_cap = max(1, math.ceil(math.log(max(view.n, 2))))
    if k_range[0] < 1 or k_range[-1] > k_cap:
        raise ValueError(f"k_range must lie within [1, {k_cap}] for n={view.n}")
    missing = [k for k in k_range if k not in null_expectations]
    if missing:
        raise ValueError(f"null_expectations missing K values {missing}")
    reporting = reporting if isinstance(reporting, (set, frozenset)) else set(reporting)
    k_max = k_range[-1]
    counts = {k: 0 for k in k_range}
    for i in sorted(reporting):
        length = reporting_prefix_length(view, i, k_max, reporting)
        for k in k_range:
            if length >= k:
                counts[k] += 1
    worst_k, worst_excess = k_range[0], float("-inf")
    fired = False
    details = []
    for k in k_range:
        expected = float(null_expectations[k])
        band = deviation_factor * math.sqrt(expected)
        excess = abs(counts[k] - expected) - band
        details.append(f"K={k}:count={counts[k]},expected={expected:.6g}")
        if excess > 0:
            fired = True
        if excess > worst_excess:
            worst_excess, worst_k = excess, k
    label = EPIDEMIC if fired else UNIFORM
    return Verdict(label=label, hotspot_count=counts[worst_k],
                   threshold=float(null_expectations[worst_k]),
                   mode=NN, k_or_l=worst_k,
                   note="multi-k " + " ".join(details))


# -- parameter selection -------------------------------------------------------


def select_params_dense(gamma: float, f: float, p_in: float, p: float,
                        n_reporting: int, topology: str = "general",
                        log_base: float | None = None) -> DetectorConfig:
    """Dense-regime K and T prescription.

    K = ceil(log(gamma^-1 (f+1))) with the log base configurable (natural
    by default), clamped to K >= 1, and T = (n_reporting/2) *
    (gamma p_in^K/(f+1) + p^K). ``topology`` picks the specialized forms:
    "grid" uses K = ceil(log(f+1)) with gamma dropped from T; "tree" solves
    K >= log(K(f+1)) and folds gamma = 1/K into T.
    """
    if gamma <= 0.0:
        raise ValueError("gamma = 0: boundary covers the infection; "
                         "dense-regime prescription inapplicable")
    if gamma > 1.0:
        raise ValueError("gamma must be in (0, 1]")
    if not p_in > p > 0.0:
        raise ValueError("need p_in > p > 0 for the dense-regime prescription")
    base = math.e if log_base is None else float(log_base)
    if base <= 1.0:
        raise ValueError("log base must exceed 1")

    def logb(x: float) -> float:
        return math.log(x) / math.log(base)

    if topology == "grid":
        k = max(1, math.ceil(logb(f + 1.0)))
        t = (n_reporting / 2.0) * (p_in ** k / (f + 1.0) + p ** k)
        note = f"dense grid rule, log base {base:.6g}"
    elif topology == "tree":
        k = 1
        while k < 64 and k < logb(k * (f + 1.0)):
            k += 1
        t = (n_reporting / 2.0) * (p_in ** k / (k * (f + 1.0)) + p ** k)
        note = f"dense tree rule, log base {base:.6g}"
    elif topology == "general":
        k = max(1, math.ceil(logb((f + 1.0) / gamma)))
        t = (n_reporting / 2.0) * (gamma * p_in ** k / (f + 1.0) + p ** k)
        note = f"dense rule, log base {base:.6g}"
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return DetectorConfig.nn(k=k, t=t, note=note)


@dataclass(frozen=True)
class SmallRegimeParams:
    """Small-infection exponents: reporting count N^(1-beta), true-reporter
    count N^rho, true-reporting probability N^(-mu)."""

    beta: float
    rho: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")

    @property
    def k(self) -> int:
        return max(1, math.ceil(1.0 / self.beta) - 1)

    @property
    def feasible(self) -> bool | None:
        """Whether the sufficient condition K*mu <= rho holds (None if unknown)."""
        if self.rho is None or self.mu is None:
            return None
        return self.k * self.mu <= self.rho


def select_params_small(params: SmallRegimeParams) -> DetectorConfig:
    """Small-infection prescription: K = max(1, ceil(1/beta) - 1).

    The rule declares a contagion on the presence of any hotspot, i.e.
    count >= 1, encoded as threshold t = 0.5 under the strict-> decision.
    """
    feas = params.feasible
    feas_txt = "unknown" if feas is None else str(feas).lower()
    note = (f"small-regime rule: fires on any hotspot (count >= 1); "
            f"feasible(K*mu<=rho)={feas_txt}")
    if feas is False:
        logger.warning("small-regime sufficient condition K*mu <= rho violated "
                       "(K=%d, mu=%s, rho=%s)", params.k, params.mu, params.rho)
    return DetectorConfig.nn(k=params.k, t=0.5, note=note)
