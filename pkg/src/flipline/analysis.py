"""Energy function, drift checks, martingale bound, and Monte Carlo stats.

The energy of a configuration is taken relative to a context frozen
from a reference configuration c0: the level H0 = h_max(c0) and the
index class Border+ of sites that can reach that level.  While the
running maximum stays at H0 the energy 2|Top+| + |Down+| + |Up+|
counts maximal sites weighted by whether their +-per neighbours are
maximal too; it hits 0 exactly when the maximum drops below H0.
Expected one-step drift is computed in exact rational arithmetic.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    CHAIN,
    CYCLE,
    Configuration,
    LineParams,
    flip,
    height_profile,
    target_christoffel,
)
from .dynamics import StopCondition, canonical_start, derive_seed, new_process, run
from .rule import LocalRule, RuleParams, is_active, standard_rule


@dataclass(frozen=True)
class EnergyContext:
    """Reference level H0 = h_max(c0) and the Border+ index set, fixed
    from the initial configuration.  Valid only when H0 >= per."""

    h0: int
    border_plus: frozenset[int]
    params: LineParams
    topology: str = CHAIN


def energy_context(c0: Configuration) -> EnergyContext:
    params = c0.params
    profile = height_profile(c0)
    h0 = max(profile)
    if h0 < params.per:
        raise ValueError(f"energy context needs h_max(c0) >= per ({params.per}), got {h0}")
    tot, per = params.tot, params.per
    i0 = next(i for i in range(1, tot) if profile[i] == h0)
    border = frozenset(i for i in range(1, tot) if i % per == i0 % per)
    return EnergyContext(h0, border, params, c0.topology)


def top_down_up(config: Configuration, ctx: EnergyContext) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    """The index sets Top+, Down+, Up+ of `config` under the context.

    Top+ collects interior sites at height H0; Down+ (resp. Up+) those
    whose +per (resp. -per) neighbour index is in range but not in Top+.
    """
    if config.params != ctx.params:
        raise ValueError("configuration and context instances differ")
    tot, per = ctx.params.tot, ctx.params.per
    profile = height_profile(config)
    top = frozenset(i for i in range(1, tot) if profile[i] == ctx.h0)
    down = frozenset(i for i in top if i + per <= tot and i + per not in top)
    up = frozenset(i for i in top if i - per >= 0 and i - per not in top)
    return top, down, up


def energy(config: Configuration, ctx: EnergyContext) -> int:
    """0 when h_max differs from H0, else 2|Top+| + |Down+| + |Up+|.

    The cyclic variant adds 2 when Top+ fills all of Border+.  Heights
    are those of the rooted representative.
    """
    profile = height_profile(config)
    if max(profile) != ctx.h0:
        return 0
    top, down, up = top_down_up(config, ctx)
    value = 2 * len(top) + len(down) + len(up)
    if ctx.topology == CYCLE and top == ctx.border_plus:
        value += 2
    return value


def expected_drift(
    config: Configuration,
    ctx: EnergyContext,
    rule_params: RuleParams | LocalRule,
) -> Fraction:
    """Exact E[E(next) - E(now)] over one uniform scheduler pick.

    Defined only for configurations with positive energy.  In cycle
    topology index 0 is selectable and its flip re-roots the word; the
    energy of the successor is evaluated on the re-rooted heights.
    """
    rule = standard_rule(rule_params) if isinstance(rule_params, RuleParams) else rule_params
    e_now = energy(config, ctx)
    if e_now <= 0:
        raise ValueError("expected_drift needs a configuration with positive energy")
    tot = config.params.tot
    indices = range(0, tot) if config.topology == CYCLE else range(1, tot)
    total = 0
    for i in indices:
        if is_active(config, i, rule):
            total += energy(flip(config, i), ctx) - e_now
    return Fraction(total, len(indices))


def energy_change_indices(
    config: Configuration,
    ctx: EnergyContext,
    rule_params: RuleParams | LocalRule,
) -> set[int]:
    """Scheduler picks whose flip changes the energy; nonempty means
    Prob{|dE| >= 1} >= 1/N."""
    rule = standard_rule(rule_params) if isinstance(rule_params, RuleParams) else rule_params
    e_now = energy(config, ctx)
    tot = config.params.tot
    indices = range(0, tot) if config.topology == CYCLE else range(1, tot)
    out = set()
    for i in indices:
        if is_active(config, i, rule) and energy(flip(config, i), ctx) != e_now:
            out.add(i)
    return out


def martingale_bound(k: int, e0: int, eps: Fraction) -> Fraction:
    """The supermartingale hitting-time bound k * E0 / eps.

    Requires k >= E0 >= 1 and 0 < eps <= 1 (the bounded-energy,
    positive-start, minimum-jump-probability hypotheses).
    """
    eps = Fraction(eps)
    if not k >= e0 >= 1:
        raise ValueError(f"need k >= E0 >= 1, got k={k}, E0={e0}")
    if not 0 < eps <= 1:
        raise ValueError(f"need 0 < eps <= 1, got {eps}")
    return Fraction(k * e0, 1) / eps


def coalescence_bound(params: LineParams) -> int:
    """The proven mean-coalescence bound (2n-1)^3 * (tot-1)."""
    return (2 * params.n - 1) ** 3 * (params.tot - 1)


@dataclass
class TrialResult:
    trial: int
    seed: int
    steps: int
    terminal_word: str
    reached: bool


@dataclass
class ExperimentReport:
    """Per-trial coalescence times for one instance, with summary stats
    and the proven bound; times count scheduler picks."""

    params: LineParams
    sight: int
    topology: str
    start_kind: str
    stop_kind: str
    cap: int
    master_seed: int
    trials: list[TrialResult]
    exponent: Optional[float] = None

    @property
    def times(self) -> list[int]:
        return [t.steps for t in self.trials]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.times)

    @property
    def median(self) -> float:
        return statistics.median(self.times)

    @property
    def max(self) -> int:
        return max(self.times)

    @property
    def bound(self) -> int:
        return coalescence_bound(self.params)

    @property
    def capped(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.reached]

    def summary(self) -> dict:
        return {
            "ta": self.params.ta,
            "tb": self.params.tb,
            "n": self.params.n,
            "tot": self.params.tot,
            "sight": self.sight,
            "topology": self.topology,
            "start": self.start_kind,
            "stop": self.stop_kind,
            "cap": self.cap,
            "seed": self.master_seed,
            "trials": len(self.trials),
            "mean": self.mean,
            "median": self.median,
            "max": self.max,
            "bound": self.bound,
            "capped": len(self.capped),
        }


def coalescence_experiment(
    params: LineParams,
    rule_params: RuleParams,
    start_kind: str,
    trials: int,
    seed: int,
    stop_kind: str = "target",
    cap: Optional[int] = None,
    topology: str = CHAIN,
    start_word: Optional[str] = None,
) -> ExperimentReport:
    """Run independent seeded trials and collect coalescence times.

    Trial t uses the substream derived from (seed, t): one derived seed
    for the random start (when the start kind is random) and one for the
    run itself.  Trials that exhaust the cap are reported with
    reached=False, never dropped.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if cap is None:
        cap = 10 * coalescence_bound(params)
    rule = standard_rule(rule_params)
    stop = StopCondition(stop_kind, cap)
    results = []
    for t in range(trials):
        run_seed = derive_seed(seed, 2 * t)
        if start_word is not None:
            config = Configuration(start_word, params, topology)
        else:
            config = canonical_start(params, start_kind, derive_seed(seed, 2 * t + 1), topology)
        state = new_process(config, rule, run_seed)
        trace = run(state, stop, record_events=False)
        results.append(
            TrialResult(t, run_seed, trace.steps, trace.terminal_word, trace.reason == "stop")
        )
    return ExperimentReport(
        params=params,
        sight=rule.sight,
        topology=topology,
        start_kind=start_kind if start_word is None else f"word:{start_word}",
        stop_kind=stop_kind,
        cap=cap,
        master_seed=seed,
        trials=results,
    )


def fit_scaling_exponent(reports: list[ExperimentReport]) -> float:
    """Least-squares slope of log(mean T) against log(tot)."""
    if len(reports) < 2:
        raise ValueError("need at least two instance sizes to fit an exponent")
    xs = [math.log(r.params.tot) for r in reports]
    ys = [math.log(r.mean) for r in reports]
    slope, _ = statistics.linear_regression(xs, ys)
    return slope


def scaling_sweep(
    ta: int,
    tb: int,
    ns: list[int],
    rule_params: RuleParams,
    trials_per_n: dict[int, int] | int,
    seed: int,
    start_kind: str = "max_nonneg",
    stop_kind: str = "target",
    cap_factor: int = 10,
) -> tuple[list[ExperimentReport], float]:
    """Coalescence experiments across sizes plus the fitted exponent.

    Each size runs under its own derived master seed so the sweep is
    reproducible and order-independent.
    """
    reports = []
    for n in ns:
        params = LineParams(ta, tb, n)
        trials = trials_per_n if isinstance(trials_per_n, int) else trials_per_n[n]
        reports.append(
            coalescence_experiment(
                params,
                rule_params,
                start_kind,
                trials,
                derive_seed(seed, n),
                stop_kind=stop_kind,
                cap=cap_factor * coalescence_bound(params),
            )
        )
    exponent = fit_scaling_exponent(reports)
    for report in reports:
        report.exponent = exponent
    return reports, exponent


def trials_csv_lines(report: ExperimentReport):
    """CSV rows, one per trial: trial, seed, steps, terminal word."""
    yield "trial,seed,steps,terminal"
    for t in report.trials:
        yield f"{t.trial},{t.seed},{t.steps},{t.terminal_word}"
