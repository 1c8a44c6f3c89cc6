"""Lattice-path configurations over the two-letter alphabet {a, b}.

A configuration is a monotone path on the integer grid from (0, 0) to
(A, B), written as a word in which the letter 'a' is a unit step right
and 'b' a unit step up.  The height -tb*x + ta*y of a visited site says
which translate of the ideal line of slope tb/ta the site lies on, and
everything else in this package (thickness, Christoffel words, flips,
energies) is phrased through it.

Conventions: letters are 1-indexed (w_1 .. w_tot) in the documentation,
sites 0-indexed (c_0 .. c_tot).  Words are plain Python strings of 'a'
and 'b'; string position k holds letter w_{k+1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

CHAIN = "chain"
CYCLE = "cycle"
TOPOLOGIES = (CHAIN, CYCLE)

_SWAP = str.maketrans("ab", "ba")


class Site(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class LineParams:
    """Global instance: n periods of the primitive slope vector (ta, tb).

    The ideal line goes from (0, 0) to (A, B) = n * (ta, tb) and has
    slope tb/ta; ta and tb must be coprime positive integers.
    """

    ta: int
    tb: int
    n: int

    def __post_init__(self) -> None:
        for name in ("ta", "tb", "n"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if math.gcd(self.ta, self.tb) != 1:
            raise ValueError(f"ta and tb must be coprime, got ({self.ta}, {self.tb})")

    @property
    def A(self) -> int:
        return self.n * self.ta

    @property
    def B(self) -> int:
        return self.n * self.tb

    @property
    def per(self) -> int:
        return self.ta + self.tb

    @property
    def tot(self) -> int:
        return self.n * (self.ta + self.tb)


def parse_word(text: str) -> str:
    """Validate a word: nonempty, only 'a' and 'b'."""
    if not isinstance(text, str) or not text:
        raise ValueError("word must be a nonempty string of 'a' and 'b'")
    for ch in text:
        if ch not in "ab":
            raise ValueError(f"invalid letter {ch!r} in word")
    return text


def swap_morphism(word: str) -> str:
    """The letter-swap morphism g: a <-> b, applied letterwise."""
    return word.translate(_SWAP)


@dataclass(frozen=True)
class Configuration:
    """A full-length word together with its instance and topology.

    In cycle topology c_0 is identified with c_tot; serialization and
    site coordinates stay rooted at c_0 = (0, 0) (heights of a cyclic
    configuration are those of its rooted representative).
    """

    word: str
    params: LineParams
    topology: str = CHAIN

    def __post_init__(self) -> None:
        parse_word(self.word)
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        p = self.params
        if len(self.word) != p.tot:
            raise ValueError(f"word length {len(self.word)} != tot {p.tot}")
        na = self.word.count("a")
        if na != p.A:
            raise ValueError(f"word has {na} a's, instance needs {p.A}")


def height(site: Site | tuple[int, int], params: LineParams) -> int:
    """Height -tb*x + ta*y of a grid site."""
    x, y = site
    return -params.tb * x + params.ta * y


def sites_of(config: Configuration) -> list[Site]:
    """The tot+1 sites c_0 .. c_tot visited by the path."""
    x = y = 0
    out = [Site(0, 0)]
    for ch in config.word:
        if ch == "a":
            x += 1
        else:
            y += 1
        out.append(Site(x, y))
    return out


def height_profile(config: Configuration) -> list[int]:
    """Heights h(c_0) .. h(c_tot); always starts and ends at 0."""
    ta, tb = config.params.ta, config.params.tb
    h = 0
    out = [0]
    for ch in config.word:
        h += ta if ch == "b" else -tb
        out.append(h)
    return out


def h_min(config: Configuration) -> int:
    return min(height_profile(config))


def h_max(config: Configuration) -> int:
    return max(height_profile(config))


def thickness(config: Configuration) -> int:
    """h_max - h_min; at least per - 1 for every configuration."""
    profile = height_profile(config)
    return max(profile) - min(profile)


def is_christoffel(config: Configuration) -> bool:
    """True iff the configuration has the minimal thickness per - 1."""
    return thickness(config) == config.params.per - 1


def is_nonnegative(config: Configuration) -> bool:
    """True iff every site height is >= 0 (path weakly above the line)."""
    return min(height_profile(config)) >= 0


def target_christoffel(params: LineParams, topology: str = CHAIN) -> Configuration:
    """The unique configuration with heights inside [0, per - 1].

    Built greedily: from height h exactly one of the steps a (h - tb)
    and b (h + ta) stays inside the band.
    """
    per = params.per
    h = 0
    letters = []
    for _ in range(params.tot):
        step_a = h - params.tb
        step_b = h + params.ta
        a_ok = 0 <= step_a <= per - 1
        b_ok = 0 <= step_b <= per - 1
        if a_ok == b_ok:
            raise AssertionError("greedy band step must be unique")
        if a_ok:
            letters.append("a")
            h = step_a
        else:
            letters.append("b")
            h = step_b
    if h != 0:
        raise AssertionError("greedy band walk must close at height 0")
    return Configuration("".join(letters), params, topology)


def mirror_christoffel(params: LineParams, topology: str = CHAIN) -> Configuration:
    """The Christoffel twin with heights inside [-per + 1, 0].

    Obtained by reversing the target word, which negates and reverses
    the height profile.
    """
    return Configuration(target_christoffel(params).word[::-1], params, topology)


def flip(config: Configuration, i: int) -> Configuration:
    """Flip at site index i: swap letters w_i and w_{i+1}.

    Only site c_i moves (diagonally); an increasing flip (a, b) raises
    h(c_i) by per, a decreasing flip (b, a) lowers it by per.  In cycle
    topology i = 0 is allowed and swaps w_tot with w_1; the result is
    re-rooted at (0, 0), which shifts the rooted height profile.
    """
    tot = config.params.tot
    if config.topology == CHAIN:
        if not 1 <= i <= tot - 1:
            raise ValueError(f"chain flip index must be in 1..{tot - 1}, got {i}")
    else:
        if not 0 <= i <= tot - 1:
            raise ValueError(f"cycle flip index must be in 0..{tot - 1}, got {i}")
    word = config.word
    j1 = (i - 1) % tot
    j2 = i % tot
    if word[j1] == word[j2]:
        raise ValueError(f"flip undefined at {i}: letters w_{i} and w_{i + 1} are equal")
    chars = list(word)
    chars[j1], chars[j2] = chars[j2], chars[j1]
    return Configuration("".join(chars), config.params, config.topology)


def flip_sites(config: Configuration) -> range:
    """Site indices the scheduler may pick: 1..tot-1 (chain), 0..tot-1 (cycle)."""
    tot = config.params.tot
    return range(0, tot) if config.topology == CYCLE else range(1, tot)


def config_to_json(config: Configuration) -> dict:
    return {
        "word": config.word,
        "ta": config.params.ta,
        "tb": config.params.tb,
        "n": config.params.n,
        "topology": config.topology,
    }


def config_from_json(data: dict) -> Configuration:
    try:
        params = LineParams(data["ta"], data["tb"], data["n"])
        return Configuration(data["word"], params, data.get("topology", CHAIN))
    except KeyError as exc:
        raise ValueError(f"configuration JSON is missing key {exc}") from exc
