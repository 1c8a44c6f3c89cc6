"""Sequential random-scan dynamics: pick a site uniformly, flip if active.

One time unit is one scheduler pick, whether or not a flip happens.
Randomness comes from `random.Random` (Mersenne Twister) seeded with a
64-bit integer; independent trials use substreams derived from the
master seed with splitmix64, so every run is reproducible from
(configuration, sight, seed, topology) alone.  Index sampling uses
`Random.randrange`, which is rejection-based and exactly uniform.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .core import CHAIN, CYCLE, Configuration, LineParams, target_christoffel
from .rule import LocalRule, RuleParams, local_words, standard_rule

MASK64 = (1 << 64) - 1

STOP_KINDS = ("stable", "christoffel", "strip", "target", "step_limit")
START_KINDS = ("max_nonneg", "min_nonpos", "random", "random_nonnegative")


def splitmix64(x: int) -> int:
    """One splitmix64 step; used only to derive substream seeds."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, stream: int) -> int:
    """Substream seed for trial `stream` of a master seed."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (stream & MASK64))


class StepEvent(NamedTuple):
    step: int
    index: int
    flipped: bool
    h_max: int
    h_min: int


@dataclass(frozen=True)
class StopCondition:
    """When a run ends: a predicate kind plus a step cap.

    Only `step_limit` may omit nothing: every other kind is not a priori
    guaranteed to occur, so a cap is mandatory.
    """

    kind: str
    cap: int

    def __post_init__(self) -> None:
        if self.kind not in STOP_KINDS:
            raise ValueError(f"stop kind must be one of {STOP_KINDS}, got {self.kind!r}")
        if not isinstance(self.cap, int) or self.cap < 0:
            raise ValueError(f"step cap must be a nonnegative integer, got {self.cap!r}")

    @classmethod
    def step_limit(cls, steps: int) -> "StopCondition":
        return cls("step_limit", steps)


@dataclass
class Trace:
    header: dict
    events: list[StepEvent]
    snapshots: list[tuple[int, str]]
    terminal_word: str
    reason: str  # "stop" when the condition fired, "cap" when exhausted
    steps: int
    flips: int


class ProcessState:
    """Mutable simulation state owned by one execution stream.

    Maintains the word, the rooted height profile, running h_min/h_max
    (via a height multiset) and optionally the set of active sites.
    In cycle topology a flip at index 0 re-roots the path at (0, 0);
    that shifts every rooted height by -+per, so only the shift-invariant
    thickness is monotone across such steps.
    """

    def __init__(
        self,
        config: Configuration,
        rule: RuleParams | LocalRule,
        seed: int,
        track_active: bool = False,
        check_invariants: bool = False,
    ):
        if isinstance(rule, RuleParams):
            rule = standard_rule(rule)
        self.params = config.params
        self.topology = config.topology
        self.rule = rule
        self.word = config.word
        self.seed = seed
        self.rng = random.Random(seed)
        self.steps = 0
        self.flips = 0
        self.check_invariants = check_invariants
        self._tot = self.params.tot
        self._per = self.params.per
        self._cycle = self.topology == CYCLE
        if self._cycle and rule.sight > self._tot:
            raise ValueError("cycle topology needs sight <= tot")
        self._recompute_heights()
        self.active: Optional[set[int]] = None
        if track_active:
            self.active = self._scan_active()

    # -- derived views ------------------------------------------------

    @property
    def config(self) -> Configuration:
        return Configuration(self.word, self.params, self.topology)

    @property
    def h_max(self) -> int:
        return self._hmax

    @property
    def h_min(self) -> int:
        return self._hmin

    @property
    def thickness(self) -> int:
        return self._hmax - self._hmin

    # -- internals ----------------------------------------------------

    def _recompute_heights(self) -> None:
        ta, tb = self.params.ta, self.params.tb
        h = 0
        heights = [0]
        for ch in self.word:
            h += ta if ch == "b" else -tb
            heights.append(h)
        self.heights = heights
        freq: dict[int, int] = {}
        for h in heights:
            freq[h] = freq.get(h, 0) + 1
        self._freq = freq
        self._hmin = min(freq)
        self._hmax = max(freq)

    def _scan_active(self) -> set[int]:
        word, tot, cyc = self.word, self._tot, self._cycle
        s = self.rule.sight
        decide = self.rule.decide
        topo = self.topology
        out = set()
        for i in range(0, tot) if cyc else range(1, tot):
            if word[(i - 1) % tot] != word[i % tot]:
                left, right = local_words(word, i, s, topo)
                if decide(left, right):
                    out.add(i)
        return out

    def _is_active_now(self, i: int) -> bool:
        word = self.word
        tot = self._tot
        if word[(i - 1) % tot] == word[i % tot]:
            return False
        left, right = local_words(word, i, self.rule.sight, self.topology)
        return self.rule.decide(left, right)

    def _apply_flip(self, i: int) -> None:
        word = self.word
        tot = self._tot
        per = self._per
        old_hmin, old_hmax = self._hmin, self._hmax
        if i == 0:
            # cycle only: swap w_tot and w_1, then re-root at (0, 0)
            self.word = word[-1] + word[1:-1] + word[0]
            self._recompute_heights()
        else:
            increasing = word[i - 1] == "a"
            self.word = word[: i - 1] + word[i] + word[i - 1] + word[i + 1 :]
            old = self.heights[i]
            new = old + per if increasing else old - per
            self.heights[i] = new
            freq = self._freq
            cnt = freq[old] - 1
            if cnt:
                freq[old] = cnt
            else:
                del freq[old]
            freq[new] = freq.get(new, 0) + 1
            if new > self._hmax:
                self._hmax = new
            elif old == self._hmax and old not in freq:
                self._hmax = max(freq)
            if new < self._hmin:
                self._hmin = new
            elif old == self._hmin and old not in freq:
                self._hmin = min(freq)
        self.flips += 1
        if self.active is not None:
            self._refresh_active(i)
        if self.check_invariants:
            if self._hmax - self._hmin > old_hmax - old_hmin:
                raise AssertionError(f"thickness increased by flip at {i}")
            if i != 0 and (self._hmin < old_hmin or self._hmax > old_hmax):
                raise AssertionError(f"h_min/h_max monotonicity broken by flip at {i}")

    def _refresh_active(self, i: int) -> None:
        # a flip at i changes letters w_i, w_{i+1}; only views within
        # sight distance of those letters can change
        s = self.rule.sight
        tot = self._tot
        active = self.active
        if self._cycle:
            for k in range(i - s, i + s + 2):
                j = k % tot
                if self._is_active_now(j):
                    active.add(j)
                else:
                    active.discard(j)
        else:
            for j in range(max(1, i - s), min(tot - 1, i + s + 1) + 1):
                if self._is_active_now(j):
                    active.add(j)
                else:
                    active.discard(j)

    # -- stepping -----------------------------------------------------

    def step(self) -> StepEvent:
        """One scheduler pick; flips iff the picked site is active."""
        tot = self._tot
        i = self.rng.randrange(tot) if self._cycle else self.rng.randrange(1, tot)
        if self.active is not None:
            flipped = i in self.active
        else:
            flipped = self._is_active_now(i)
        if flipped:
            self._apply_flip(i)
        self.steps += 1
        return StepEvent(self.steps, i, flipped, self._hmax, self._hmin)


def new_process(
    config: Configuration,
    rule_params: RuleParams | LocalRule,
    seed: int,
    track_active: bool = False,
    check_invariants: bool = False,
) -> ProcessState:
    return ProcessState(config, rule_params, seed, track_active, check_invariants)


def _stop_reached(state: ProcessState, stop: StopCondition, target_word: Optional[str]) -> bool:
    kind = stop.kind
    if kind == "step_limit":
        return False  # handled by the cap
    if kind == "stable":
        return not state.active
    if kind == "christoffel":
        return state.thickness == state.params.per - 1
    if kind == "strip":
        per = state.params.per
        return state.h_min >= -per + 1 and state.h_max <= per - 1
    return state.word == target_word  # "target"


def run(
    state: ProcessState,
    stop: StopCondition,
    snapshot_every: Optional[int] = None,
    record_events: bool = True,
    header_extra: Optional[dict] = None,
) -> Trace:
    """Iterate `step` until the stop condition holds or the cap runs out.

    The trace reason distinguishes condition satisfaction ("stop") from
    cap exhaustion ("cap"); `step_limit` runs report "stop" when the
    requested number of steps completes.
    """
    if stop.kind == "stable" and state.active is None:
        state.active = state._scan_active()
    target_word = None
    if stop.kind == "target":
        target_word = target_christoffel(state.params).word
    header = {
        "ta": state.params.ta,
        "tb": state.params.tb,
        "n": state.params.n,
        "sight": state.rule.sight,
        "seed": state.seed,
        "topology": state.topology,
        "stop": stop.kind,
        "cap": stop.cap,
        "start_word": state.word,
    }
    if header_extra:
        header.update(header_extra)
    events: list[StepEvent] = []
    snapshots: list[tuple[int, str]] = []
    if snapshot_every is not None:
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        snapshots.append((state.steps, state.word))

    reason = "cap"
    if stop.kind != "step_limit" and _stop_reached(state, stop, target_word):
        reason = "stop"
    else:
        while state.steps < stop.cap:
            event = state.step()
            if record_events:
                events.append(event)
            if snapshot_every is not None and state.steps % snapshot_every == 0:
                snapshots.append((state.steps, state.word))
            if stop.kind != "step_limit" and _stop_reached(state, stop, target_word):
                reason = "stop"
                break
        else:
            reason = "stop" if stop.kind == "step_limit" else "cap"

    return Trace(
        header=header,
        events=events,
        snapshots=snapshots,
        terminal_word=state.word,
        reason=reason,
        steps=state.steps,
        flips=state.flips,
    )


def canonical_start(
    params: LineParams,
    kind: str,
    seed: int = 0,
    topology: str = CHAIN,
) -> Configuration:
    """Standard initial configurations.

    max_nonneg is b^B a^A (the highest nonnegative word), min_nonpos its
    reflection a^A b^B; random is uniform over all words with the right
    letter counts; random_nonnegative rejection-samples against the
    nonnegativity test.
    """
    if kind not in START_KINDS:
        raise ValueError(f"start kind must be one of {START_KINDS}, got {kind!r}")
    A, B = params.A, params.B
    if kind == "max_nonneg":
        return Configuration("b" * B + "a" * A, params, topology)
    if kind == "min_nonpos":
        return Configuration("a" * A + "b" * B, params, topology)
    rng = random.Random(seed)
    while True:
        letters = ["a"] * A + ["b"] * B
        rng.shuffle(letters)
        config = Configuration("".join(letters), params, topology)
        if kind == "random":
            return config
        ta, tb = params.ta, params.tb
        h = 0
        ok = True
        for ch in config.word:
            h += ta if ch == "b" else -tb
            if h < 0:
                ok = False
                break
        if ok:
            return config


def trace_lines(trace: Trace):
    """The JSON-lines serialization: header, then events and snapshots
    in step order, then the terminal record."""
    yield json.dumps({"type": "header", **trace.header}, sort_keys=True)
    snap_iter = iter(trace.snapshots)
    pending = next(snap_iter, None)
    if pending is not None and pending[0] == 0:
        yield json.dumps({"type": "snapshot", "step": 0, "word": pending[1]})
        pending = next(snap_iter, None)
    for ev in trace.events:
        yield json.dumps(
            {
                "type": "event",
                "step": ev.step,
                "i": ev.index,
                "flipped": ev.flipped,
                "h_max": ev.h_max,
                "h_min": ev.h_min,
            }
        )
        while pending is not None and pending[0] <= ev.step:
            yield json.dumps({"type": "snapshot", "step": pending[0], "word": pending[1]})
            pending = next(snap_iter, None)
    while pending is not None:
        yield json.dumps({"type": "snapshot", "step": pending[0], "word": pending[1]})
        pending = next(snap_iter, None)
    yield json.dumps(
        {
            "type": "terminal",
            "step": trace.steps,
            "word": trace.terminal_word,
            "reason": trace.reason,
            "flips": trace.flips,
        }
    )


def write_trace(trace: Trace, path: str) -> None:
    """Write the trace atomically (temp file + rename)."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        for line in trace_lines(trace):
            fh.write(line)
            fh.write("\n")
    os.replace(tmp, path)


def read_trace_words(path: str) -> tuple[dict, dict[int, str]]:
    """Load a trace file's header and its snapshots as {step: word}."""
    header: dict = {}
    snaps: dict[int, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            if record.get("type") == "header":
                header = record
            elif record.get("type") == "snapshot":
                snaps[record["step"]] = record["word"]
            elif record.get("type") == "terminal":
                snaps.setdefault(record["step"], record["word"])
    return header, snaps
