"""The sight-limited, totally symmetric local flip rule.

A site looks at most `s` letters outward on each side and decides from
those two words alone whether it wants to flip.  Nothing in this module
may import the rest of the package: the decision function must never
see the instance parameters, the site index, or absolute coordinates,
and keeping the module dependency-free makes that structural.

The one-sided rule fires on (left, right) when

  * the two words start with different letters (else flipping is moot),
  * after letter-swap normalization so the right word starts with 'b',
    the right side is fully visible (len(right) == s),
  * the strong thickness constraint holds: some left prefix reaches at
    least per-estimate distance above the line of the estimated slope
    (r_a, r_b) through the flipped site, with a primitivity condition
    in the boundary-equality case.

The full rule is the symmetric closure: delta(w, w') = delta_r(w, w')
or delta_r(w', w).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, NamedTuple

_SWAP = str.maketrans("ab", "ba")


@dataclass(frozen=True)
class RuleParams:
    """Sight s >= 2.  With s = 1 no constraint can ever fire, so the
    process would be frozen; such a rule is rejected outright."""

    s: int

    def __post_init__(self) -> None:
        if not isinstance(self.s, int) or self.s < 2:
            raise ValueError(f"sight must be an integer >= 2, got {self.s!r}")


class SlopeEstimate(NamedTuple):
    ra: int
    rb: int


def prefix_counts(word: str) -> list[tuple[int, int]]:
    """Running (count of a, count of b) over the prefixes of a word."""
    if not word:
        raise ValueError("prefix_counts needs a nonempty word")
    a = b = 0
    out = []
    for ch in word:
        if ch == "a":
            a += 1
        elif ch == "b":
            b += 1
        else:
            raise ValueError(f"invalid letter {ch!r}")
        out.append((a, b))
    return out


def slope_estimate(right_word: str) -> SlopeEstimate:
    """The prefix count pair (r_a, r_b) of the right word minimizing
    r_b / r_a, with r/0 = +infinity and ties broken by shortest prefix.

    Comparison is exact cross-multiplication; no floating point.  For an
    all-b word every prefix ties at +infinity and the shortest wins,
    giving (0, 1).
    """
    best_a = best_b = 0
    a = b = 0
    for ch in right_word:
        if ch == "a":
            a += 1
        else:
            b += 1
        if (best_a, best_b) == (0, 0) or b * best_a < best_b * a:
            best_a, best_b = a, b
    if (best_a, best_b) == (0, 0):
        raise ValueError("slope_estimate needs a nonempty word")
    return SlopeEstimate(best_a, best_b)


def weak_thickness(left_word: str, est: SlopeEstimate) -> bool:
    """Some left prefix (a_j, b_j) satisfies r_b*a_j - r_a*b_j >= r_a + r_b,
    i.e. some visible site on the left lies on or above the estimated
    line through the flipped site."""
    ra, rb = est
    bound = ra + rb
    a = b = 0
    for ch in left_word:
        if ch == "a":
            a += 1
        else:
            b += 1
        if rb * a - ra * b >= bound:
            return True
    return False


def strong_thickness(left_word: str, est: SlopeEstimate) -> bool:
    """Weak thickness sharpened: a strictly-above witness, or an
    on-the-line witness whose displacement vector (a_j - 1, b_j + 1)
    is primitive.  Implies weak_thickness."""
    ra, rb = est
    bound = ra + rb
    a = b = 0
    for ch in left_word:
        if ch == "a":
            a += 1
        else:
            b += 1
        v = rb * a - ra * b
        if v > bound:
            return True
        if v == bound and gcd(a - 1, b + 1) == 1:
            return True
    return False


def delta_r(left_word: str, right_word: str, params: RuleParams) -> bool:
    """The one-sided decision: sight constraint plus strong thickness,
    evaluated after normalizing the right word to start with 'b'."""
    if not left_word or not right_word:
        raise ValueError("delta_r needs nonempty words")
    if left_word[0] == right_word[0]:
        return False
    if right_word[0] == "a":
        left_word = left_word.translate(_SWAP)
        right_word = right_word.translate(_SWAP)
    if len(right_word) != params.s:
        return False
    return strong_thickness(left_word, slope_estimate(right_word))


def delta(left_word: str, right_word: str, params: RuleParams) -> bool:
    """The full rule: max of the two one-sided decisions.  Symmetric in
    its arguments and invariant under the letter swap by construction."""
    return delta_r(left_word, right_word, params) or delta_r(right_word, left_word, params)


class LocalRule:
    """A sight plus a pure decision function on (left word, right word).

    Used wherever an arbitrary candidate rule must be evaluated (e.g.
    the impossibility probe); the packaged rule is `standard_rule`.
    """

    def __init__(self, sight: int, decide: Callable[[str, str], bool]):
        if sight < 1:
            raise ValueError("sight must be >= 1")
        self.sight = sight
        self._decide = decide

    def decide(self, left_word: str, right_word: str) -> bool:
        return bool(self._decide(left_word, right_word))


def standard_rule(params: RuleParams | int) -> LocalRule:
    """The packaged rule as a LocalRule, memoized on the word pair.

    The number of distinct local views is at most (2^(s+1))^2, so the
    cache stays small and makes long simulations cheap.
    """
    if isinstance(params, int):
        params = RuleParams(params)
    cache: dict[tuple[str, str], bool] = {}

    def decide(left: str, right: str) -> bool:
        key = (left, right)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = delta(left, right, params)
        return hit

    return LocalRule(params.s, decide)


def local_words(word: str, i: int, s: int, topology: str = "chain") -> tuple[str, str]:
    """The outward words a site reads: left = w_i w_{i-1} ... and
    right = w_{i+1} w_{i+2} ..., each at most s letters (exactly s in
    cycle topology, wrapping mod tot)."""
    tot = len(word)
    if topology == "cycle":
        if s > tot:
            raise ValueError("cycle topology needs sight <= tot")
        left = word[i - s:i] if i >= s else word[tot - (s - i):] + word[:i]
        right = word[i:i + s] if i + s <= tot else word[i:] + word[:i + s - tot]
        return left[::-1], right
    return word[max(0, i - s):i][::-1], word[i:i + s]


def is_active(config, i: int, rule: LocalRule | RuleParams) -> bool:
    """Whether the scheduler would flip site c_i when picking it.

    `config` only needs `.word` and `.topology`; the rule never sees
    anything global.
    """
    if isinstance(rule, RuleParams):
        rule = standard_rule(rule)
    word = config.word
    tot = len(word)
    cycle = config.topology == "cycle"
    if cycle:
        if not 0 <= i <= tot - 1:
            raise IndexError(f"cycle site index must be in 0..{tot - 1}, got {i}")
    elif not 1 <= i <= tot - 1:
        raise IndexError(f"chain site index must be in 1..{tot - 1}, got {i}")
    if word[(i - 1) % tot] == word[i % tot]:
        return False
    left, right = local_words(word, i, rule.sight, config.topology)
    return rule.decide(left, right)


def active_sites(config, rule: LocalRule | RuleParams) -> set[int]:
    """All site indices the rule would flip; empty iff the configuration
    is stable."""
    if isinstance(rule, RuleParams):
        rule = standard_rule(rule)
    word = config.word
    tot = len(word)
    cycle = config.topology == "cycle"
    indices = range(0, tot) if cycle else range(1, tot)
    out = set()
    for i in indices:
        if word[(i - 1) % tot] == word[i % tot]:
            continue
        left, right = local_words(word, i, rule.sight, config.topology)
        if rule.decide(left, right):
            out.add(i)
    return out
