"""Brute-force ground truth on small instances.

Enumerates every configuration of an instance, builds the exact Markov
chain of the random-scan process, and answers questions no simulation
can settle: expected hitting times (exact rationals), reachability,
recurrence structure, and exhaustive verification of the monotonicity,
stability, no-isolated-extremum, activity, and drift properties the
convergence argument rests on.  Also builds the two counterexample
families: the boundary-stuck word and the low-sight family pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .analysis import (
    energy,
    energy_change_indices,
    energy_context,
    expected_drift,
    top_down_up,
)
from .core import (
    CHAIN,
    CYCLE,
    Configuration,
    LineParams,
    flip,
    height_profile,
    target_christoffel,
)
from .rule import LocalRule, RuleParams, active_sites, local_words, standard_rule

DEFAULT_STATE_CAP = 10**6
EXACT_SOLVE_LIMIT = 3000  # states; beyond this fall back to value iteration
ITERATIVE_TOL = Fraction(1, 10**10)


def state_count(params: LineParams) -> int:
    return math.comb(params.tot, params.B)


def enumerate_words(params: LineParams, cap: int = DEFAULT_STATE_CAP) -> list[str]:
    """All words with letter counts (A, B), in ascending lexicographic
    order ('a' < 'b')."""
    count = state_count(params)
    if count > cap:
        raise ValueError(f"instance has {count} states, above the cap {cap}")
    tot, B = params.tot, params.B
    out = []
    from itertools import combinations

    for positions in combinations(range(tot), B):
        chars = ["a"] * tot
        for p in positions:
            chars[p] = "b"
        out.append("".join(chars))
    out.reverse()  # combinations ascend => words descend; flip to ascend
    return out


def rank_word(word: str, params: LineParams) -> int:
    """Lexicographic rank of a word among words with the same letter
    counts (combinatorial number system); inverse of unrank_word."""
    rank = 0
    b_left = params.B
    tot = params.tot
    for pos, ch in enumerate(word):
        remaining = tot - pos - 1
        if ch == "b":
            rank += math.comb(remaining, b_left)
            b_left -= 1
    return rank


def unrank_word(rank: int, params: LineParams) -> str:
    tot, B = params.tot, params.B
    chars = []
    b_left = B
    for pos in range(tot):
        remaining = tot - pos - 1
        with_a = math.comb(remaining, b_left)
        if rank < with_a:
            chars.append("a")
        else:
            rank -= with_a
            chars.append("b")
            b_left -= 1
    return "".join(chars)


@dataclass
class TransitionGraph:
    """The exact chain: states in lexicographic order; succ[x][k] is the
    state reached when pick k fires in state x (x itself when the picked
    site is inactive).  Every row has the full out-degree N with uniform
    probability 1/N."""

    params: LineParams
    sight: int
    topology: str
    words: list[str]
    succ: list[list[int]]

    @property
    def pick_count(self) -> int:
        return len(self.succ[0]) if self.succ else 0

    def index(self, word: str) -> int:
        return rank_word(word, self.params)

    def successors(self, x: int) -> set[int]:
        """Distinct non-self successors."""
        return {y for y in self.succ[x] if y != x}

    def is_absorbing(self, x: int) -> bool:
        return all(y == x for y in self.succ[x])


def build_graph(
    params: LineParams,
    rule_params: RuleParams | LocalRule,
    topology: str = CHAIN,
    cap: int = DEFAULT_STATE_CAP,
) -> TransitionGraph:
    rule = standard_rule(rule_params) if isinstance(rule_params, RuleParams) else rule_params
    words = enumerate_words(params, cap)
    tot = params.tot
    cycle = topology == CYCLE
    picks = range(0, tot) if cycle else range(1, tot)
    decide = rule.decide
    s = rule.sight
    succ = []
    for x, word in enumerate(words):
        row = []
        for i in picks:
            if word[(i - 1) % tot] != word[i % tot]:
                left, right = local_words(word, i, s, topology)
                if decide(left, right):
                    if i == 0:
                        flipped = word[-1] + word[1:-1] + word[0]
                    else:
                        flipped = word[: i - 1] + word[i] + word[i - 1] + word[i + 1 :]
                    row.append(rank_word(flipped, params))
                    continue
            row.append(x)
        succ.append(row)
    return TransitionGraph(params, s, topology, words, succ)


def reachable_set(graph: TransitionGraph, start: str | int) -> set[int]:
    """Transitive closure of the non-self-loop edges from a state."""
    x = graph.index(start) if isinstance(start, str) else start
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for u in graph.successors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def strongly_connected_components(
    graph: TransitionGraph, restrict: Optional[set[int]] = None
) -> list[list[int]]:
    """Tarjan SCCs (iterative) over the non-self-loop edges, optionally
    restricted to a state subset; returned in reverse topological order
    (every edge leaves a later component toward an earlier one)."""
    if restrict is None:
        nodes = range(len(graph.words))
        allowed = None
    else:
        nodes = sorted(restrict)
        allowed = restrict
    succ_of = {}
    for v in nodes:
        outs = graph.successors(v)
        if allowed is not None:
            outs &= allowed
        succ_of[v] = sorted(outs)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            outs = succ_of[v]
            while pi < len(outs):
                u = outs[pi]
                pi += 1
                if u not in index:
                    work[-1] = (v, pi)
                    work.append((u, 0))
                    advanced = True
                    break
                if u in on_stack:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    comp.append(u)
                    if u == v:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return sccs


def bottom_classes(
    graph: TransitionGraph, restrict: Optional[set[int]] = None
) -> list[list[int]]:
    """Closed recurrent classes: SCCs with no edge leaving them."""
    sccs = strongly_connected_components(graph, restrict)
    comp_of = {}
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    out = []
    for ci, comp in enumerate(sccs):
        closed = True
        for v in comp:
            for u in graph.successors(v):
                if comp_of.get(u, ci) != ci:
                    closed = False
                    break
            if not closed:
                break
        if closed:
            out.append(sorted(comp))
    return out


@dataclass
class HittingTime:
    """Expected number of scheduler picks to reach the target set;
    value is math.inf when a reachable closed class avoids the target."""

    value: Fraction | float
    method: str  # "exact" or "iterative"
    residual: Optional[float] = None

    @property
    def is_infinite(self) -> bool:
        return self.value == math.inf


def exact_hitting_time(
    graph: TransitionGraph,
    start: str | int,
    target: Iterable[str | int],
) -> HittingTime:
    """Expected picks from `start` until the chain first sits in
    `target`.  Solved exactly per SCC in topological order with Fraction
    arithmetic; instances whose reachable part is very large fall back
    to value iteration with a certified residual."""
    start_idx = graph.index(start) if isinstance(start, str) else start
    target_idx = {graph.index(t) if isinstance(t, str) else t for t in target}
    if not target_idx:
        raise ValueError("target set must be nonempty")
    if start_idx in target_idx:
        return HittingTime(Fraction(0), "exact")

    # restrict to states reachable without passing through the target
    reach = {start_idx}
    stack = [start_idx]
    while stack:
        v = stack.pop()
        if v in target_idx:
            continue
        for u in graph.successors(v):
            if u not in reach:
                reach.add(u)
                stack.append(u)

    # infinite iff some target-free closed class is reachable
    interior = reach - target_idx
    sccs = strongly_connected_components(graph, interior)
    comp_of = {}
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    # a component is doomed when no edge leaves it at all (edges into the
    # target count as leaving); from inside it the target is unreachable
    doomed: set[int] = set()
    for ci, comp in enumerate(sccs):
        closed = True
        for v in comp:
            for u in graph.successors(v):
                if u in target_idx or comp_of.get(u, -1) != ci:
                    closed = False
                    break
            if not closed:
                break
        if closed:
            doomed.add(ci)
    # propagate: any component that can reach a doomed one is infinite
    # (sccs are in reverse topological order: edges go to earlier entries)
    inf_comp: set[int] = set(doomed)
    for ci, comp in enumerate(sccs):
        if ci in inf_comp:
            continue
        for v in comp:
            for u in graph.successors(v):
                cu = comp_of.get(u)
                if cu is not None and cu in inf_comp:
                    inf_comp.add(ci)
                    break
            if ci in inf_comp:
                break
    if comp_of.get(start_idx) in inf_comp:
        return HittingTime(math.inf, "exact")

    solve_states = [v for ci, comp in enumerate(sccs) if ci not in inf_comp for v in comp]
    if len(solve_states) > EXACT_SOLVE_LIMIT:
        return _iterative_hitting_time(graph, start_idx, target_idx, interior)

    N = graph.pick_count
    values: dict[int, Fraction] = {t: Fraction(0) for t in target_idx}
    # sccs arrive in reverse topological order, so successors of a
    # component are solved before the component itself
    for ci, comp in enumerate(sccs):
        if ci in inf_comp:
            continue
        comp_pos = {v: k for k, v in enumerate(comp)}
        m = len(comp)
        # N*e_v - sum_{u in comp} m_vu e_u = N + sum_{u outside} m_vu e_u
        aug = [[Fraction(0)] * (m + 1) for _ in range(m)]
        for v in comp:
            r = comp_pos[v]
            aug[r][r] = Fraction(N)
            rhs = Fraction(N)
            for u in graph.succ[v]:
                if u in comp_pos:
                    aug[r][comp_pos[u]] -= 1
                else:
                    rhs += values[u]
            aug[r][m] = rhs
        _gauss_solve(aug)
        for v in comp:
            values[v] = aug[comp_pos[v]][m]
    return HittingTime(values[start_idx], "exact")


def _gauss_solve(aug: list[list[Fraction]]) -> None:
    """In-place Gaussian elimination on an augmented [A | b] system;
    leaves the solution in the last column."""
    m = len(aug)
    for col in range(m):
        pivot = next(r for r in range(col, m) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]


def _iterative_hitting_time(
    graph: TransitionGraph, start_idx: int, target_idx: set[int], interior: set[int]
) -> HittingTime:
    N = graph.pick_count
    vals = {v: 0.0 for v in interior}
    tol = float(ITERATIVE_TOL)
    for _ in range(10**7):
        delta = 0.0
        for v in interior:
            total = 0.0
            for u in graph.succ[v]:
                if u in target_idx:
                    continue
                total += vals[u] if u != v else vals[v]
            new = 1.0 + total / N
            d = abs(new - vals[v])
            if d > delta:
                delta = d
            vals[v] = new
        if delta < tol:
            return HittingTime(vals[start_idx], "iterative", residual=delta)
    raise RuntimeError("value iteration failed to certify the residual")


# ---------------------------------------------------------------------------
# exhaustive verification


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"check": self.name, "status": self.status}
        if self.detail:
            out["counterexample" if self.status == "fail" else "note"] = self.detail
        return out


@dataclass
class VerifyReport:
    params: LineParams
    sight: int
    topology: str
    visible: bool
    states: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {
            "instance": {"ta": self.params.ta, "tb": self.params.tb, "n": self.params.n},
            "sight": self.sight,
            "topology": self.topology,
            "visible": self.visible,
            "states": self.states,
            "passed": self.all_passed,
            "checks": [c.to_json() for c in self.checks],
        }

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_corpus(
    params: LineParams,
    rule_params: RuleParams,
    topology: str = CHAIN,
    cap: int = DEFAULT_STATE_CAP,
) -> VerifyReport:
    """Exhaustively check the process properties on one instance.

    Checks gated on visibility (per <= sight) are skipped and flagged
    (not failed) when the hypothesis is violated, since they may then
    legitimately not hold.  Failures carry the first counterexample.
    """
    rule = standard_rule(rule_params)
    s = rule.sight
    per, tot = params.per, params.tot
    visible = per <= s
    words = enumerate_words(params, cap)
    report = VerifyReport(params, s, topology, visible, len(words))
    cycle = topology == CYCLE

    def skipped(name):
        report.checks.append(
            CheckResult(name, "skipped", {"reason": f"hypothesis violated: per {per} > sight {s}"})
        )

    thick_fail = None
    congruence_fail = None
    residue_table: dict[int, int] = {}
    mono_fail = None
    stab_fail = None
    lemma2_fail = None
    lemma4_fail = None

    for word in words:
        config = Configuration(word, params, topology)
        profile = height_profile(config)
        hmin, hmax = min(profile), max(profile)

        if thick_fail is None and hmax - hmin < per - 1:
            thick_fail = {"word": word, "thickness": hmax - hmin}
        if congruence_fail is None:
            for i, h in enumerate(profile):
                want = residue_table.setdefault(i % per, h % per)
                if h % per != want:
                    congruence_fail = {"word": word, "site": i}
                    break

        act = active_sites(config, rule)

        if visible and stab_fail is None and hmax - hmin == per - 1 and act:
            stab_fail = {"word": word, "active": sorted(act)}

        if visible and (mono_fail is None or lemma2_fail is None):
            for i in sorted(act):
                flipped = flip(config, i)
                fp = height_profile(flipped)
                if mono_fail is None:
                    if cycle:
                        if max(fp) - min(fp) > hmax - hmin:
                            mono_fail = {"word": word, "site": i, "kind": "thickness"}
                    elif min(fp) < hmin or max(fp) > hmax:
                        mono_fail = {"word": word, "site": i, "kind": "h_min/h_max"}
                if lemma2_fail is None and not cycle:
                    increasing = word[i - 1] == "a"
                    new_h = profile[i] + (per if increasing else -per)
                    extreme = hmax if increasing else hmin
                    if new_h == extreme:
                        near = []
                        if i + per <= tot:
                            near.append(profile[i + per])
                        if i - per >= 0:
                            near.append(profile[i - per])
                        if extreme not in near:
                            lemma2_fail = {"word": word, "site": i}

        if visible and lemma4_fail is None and not cycle:
            for i in range(1, tot):
                if i > tot - s:
                    continue  # no full right sight; activity not guaranteed
                jrange = range(1, min(per, i) + 1)
                if profile[i] == hmin and any(profile[i - j] - per >= hmin for j in jrange):
                    if i not in act:
                        lemma4_fail = {"word": word, "site": i, "side": "min"}
                        break
                if profile[i] == hmax and any(profile[i - j] + per <= hmax for j in jrange):
                    if i not in act:
                        lemma4_fail = {"word": word, "site": i, "side": "max"}
                        break

    def record(name, fail, gated=False):
        if gated and not visible:
            skipped(name)
        elif fail is None:
            report.checks.append(CheckResult(name, "pass"))
        else:
            report.checks.append(CheckResult(name, "fail", fail))

    record("thickness_lower_bound", thick_fail)
    record("height_congruence", congruence_fail)
    record("monotonicity", mono_fail, gated=True)
    record("christoffel_stability", stab_fail, gated=True)
    record("no_isolated_extremum", lemma2_fail, gated=True)
    record("extremum_activity", lemma4_fail, gated=True)

    # supermartingale drift, chain topology only: the cyclic energy is
    # defined on rooted heights, which index-0 flips re-root
    if cycle:
        report.checks.append(
            CheckResult("energy_drift", "skipped", {"reason": "chain-topology check"})
        )
    elif not visible:
        skipped("energy_drift")
    else:
        drift_fail = None
        seen_h0: set[int] = set()
        for word in words:
            c0 = Configuration(word, params, topology)
            h0 = max(height_profile(c0))
            if h0 < per or h0 in seen_h0:
                continue
            seen_h0.add(h0)
            ctx = energy_context(c0)
            for other in words:
                c = Configuration(other, params, topology)
                e = energy(c, ctx)
                if e <= 0:
                    continue
                top, _, _ = top_down_up(c, ctx)
                if not top <= ctx.border_plus:
                    drift_fail = {"word": other, "h0": h0, "kind": "top_outside_border"}
                    break
                drift = expected_drift(c, ctx, rule)
                if drift > 0:
                    drift_fail = {"word": other, "h0": h0, "drift": str(drift)}
                    break
                if not energy_change_indices(c, ctx, rule):
                    drift_fail = {"word": other, "h0": h0, "kind": "no_energy_change"}
                    break
            if drift_fail:
                break
        record("energy_drift", drift_fail)

    return report


@dataclass
class TheoremReport:
    params: LineParams
    sight: int
    target_word: str
    nonneg_count: int
    nonneg_absorbing: list[str]
    nonneg_bottoms: list[list[str]]
    all_bottoms: list[list[str]]
    strip_violations: list[str]

    @property
    def unique_nonneg_absorber(self) -> bool:
        return self.nonneg_absorbing == [self.target_word] and self.nonneg_bottoms == [
            [self.target_word]
        ]

    @property
    def strip_ok(self) -> bool:
        return not self.strip_violations

    def to_json(self) -> dict:
        return {
            "instance": {"ta": self.params.ta, "tb": self.params.tb, "n": self.params.n},
            "sight": self.sight,
            "target": self.target_word,
            "nonnegative_states": self.nonneg_count,
            "nonneg_absorbing": self.nonneg_absorbing,
            "nonneg_recurrent_classes": self.nonneg_bottoms,
            "unique_nonneg_absorber": self.unique_nonneg_absorber,
            "recurrent_classes": len(self.all_bottoms),
            "strip_ok": self.strip_ok,
            "strip_violations": self.strip_violations[:5],
        }


def theorem1_check(params: LineParams, rule_params: RuleParams, cap: int = DEFAULT_STATE_CAP) -> TheoremReport:
    """Recurrence structure of the chain-topology process.

    From nonnegative starts the unique reachable absorbing state and the
    unique closed recurrent class must both be the band-[0, per-1]
    configuration; over all starts every closed recurrent class must sit
    inside the strip -per+1 <= h_min <= h_max <= per-1.  Requires
    sight >= per (below that the convergence hypotheses fail).
    """
    rule = standard_rule(rule_params)
    if rule.sight < params.per:
        raise ValueError("theorem checks need sight >= per")
    graph = build_graph(params, rule, CHAIN, cap)
    target = target_christoffel(params).word

    nonneg_idx = set()
    for x, word in enumerate(graph.words):
        config = Configuration(word, params, CHAIN)
        if min(height_profile(config)) >= 0:
            nonneg_idx.add(x)
    reach: set[int] = set()
    stack = list(nonneg_idx)
    reach |= nonneg_idx
    while stack:
        v = stack.pop()
        for u in graph.successors(v):
            if u not in reach:
                reach.add(u)
                stack.append(u)
    absorbing = sorted(graph.words[x] for x in reach if graph.is_absorbing(x))
    nonneg_bottoms = [sorted(graph.words[x] for x in c) for c in bottom_classes(graph, reach)]

    all_bottoms = [sorted(graph.words[x] for x in c) for c in bottom_classes(graph)]
    per = params.per
    violations = []
    for comp in all_bottoms:
        for word in comp:
            profile = height_profile(Configuration(word, params, CHAIN))
            if min(profile) < -per + 1 or max(profile) > per - 1:
                violations.append(word)
    return TheoremReport(
        params,
        rule.sight,
        target,
        len(nonneg_idx),
        absorbing,
        sorted(nonneg_bottoms),
        sorted(all_bottoms),
        violations,
    )


# ---------------------------------------------------------------------------
# counterexample families


def stuck_config(n: int) -> Configuration:
    """The boundary-stuck word (b a a b a)^{n-1} (b a a a b) on the
    (3, 2, n) instance: h(c_1) = 3 and h(c_{tot-1}) = -3 persist under
    every reachable flip (at sight 5), so the thickness never reaches
    per - 1."""
    if n < 2:
        raise ValueError("stuck configuration needs n >= 2")
    word = "baaba" * (n - 1) + "baaab"
    return Configuration(word, LineParams(3, 2, n))


def impossibility_family(s: int, k: int) -> tuple[Configuration, Configuration]:
    """The low-sight family on the (s+1, 1, 2k) instance.

    c is the Christoffel word (a^{s+1} b)^{2k}; c' mixes runs of s+2 and
    s a's so that every junction shows the same sight-s views as c while
    the path drifts k levels away from the line.  Any sight-s rule that
    leaves c's junction views inactive therefore cannot tell c' from c.
    """
    if s < 2:
        raise ValueError("family needs sight >= 2")
    if k < 2:
        raise ValueError("family needs k >= 2")
    params = LineParams(s + 1, 1, 2 * k)
    w = "a" * (s + 1) + "b"
    w_short = "a" * s + "b"
    w_long = "a" * (s + 2) + "b"
    c = Configuration(w * (2 * k), params)
    c_prime = Configuration(w + w_long * (k - 1) + w_short * (k - 1) + w, params)
    return c, c_prime


def rule_stability_probe(rule: LocalRule, config: Configuration) -> bool:
    """True iff no site of the configuration is active under the given
    rule (which may be any candidate rule, not just the packaged one)."""
    return not active_sites(config, rule)
