"""Words, heights, flips, Christoffel targets."""

import itertools
import math

import pytest

from flipline.core import (
    CHAIN,
    CYCLE,
    Configuration,
    LineParams,
    Site,
    config_from_json,
    config_to_json,
    flip,
    h_max,
    h_min,
    height,
    height_profile,
    is_christoffel,
    is_nonnegative,
    mirror_christoffel,
    parse_word,
    sites_of,
    swap_morphism,
    target_christoffel,
    thickness,
)


def cfg(word, ta, tb, n, topology=CHAIN):
    return Configuration(word, LineParams(ta, tb, n), topology)


def brute_words(params):
    """Independent enumeration of all words with counts (A, B)."""
    out = []
    for pos in itertools.combinations(range(params.tot), params.B):
        chars = ["a"] * params.tot
        for p in pos:
            chars[p] = "b"
        out.append("".join(chars))
    return out


# -- params and parsing ------------------------------------------------


def test_line_params_derived_quantities():
    p = LineParams(3, 2, 10)
    assert (p.A, p.B, p.per, p.tot) == (30, 20, 5, 50)


@pytest.mark.parametrize("ta,tb,n", [(0, 1, 1), (1, 0, 1), (1, 1, 0), (2, 4, 1), (3, 6, 2)])
def test_line_params_rejects_bad_instances(ta, tb, n):
    with pytest.raises(ValueError):
        LineParams(ta, tb, n)


def test_parse_word_accepts_ab():
    assert parse_word("ab") == "ab"
    assert parse_word("babaa") == "babaa"


@pytest.mark.parametrize("bad", ["abc", "", "aBa", "a b"])
def test_parse_word_rejects(bad):
    with pytest.raises(ValueError):
        parse_word(bad)


def test_configuration_validates_counts_and_length():
    with pytest.raises(ValueError):
        cfg("aab", 1, 1, 2)  # wrong length
    with pytest.raises(ValueError):
        cfg("aaaa", 1, 1, 2)  # wrong counts
    with pytest.raises(ValueError):
        Configuration("ab", LineParams(1, 1, 1), "ring")


# -- sites and heights -------------------------------------------------


def test_sites_of_small_words():
    assert sites_of(cfg("ab", 1, 1, 1)) == [Site(0, 0), Site(1, 0), Site(1, 1)]
    assert sites_of(cfg("ba", 1, 1, 1)) == [Site(0, 0), Site(0, 1), Site(1, 1)]
    assert sites_of(cfg("babaa", 3, 2, 1))[-1] == Site(3, 2)


def test_sites_word_round_trip():
    for word in brute_words(LineParams(3, 2, 1)):
        config = cfg(word, 3, 2, 1)
        sites = sites_of(config)
        rebuilt = "".join(
            "a" if (s2.x - s1.x, s2.y - s1.y) == (1, 0) else "b"
            for s1, s2 in zip(sites, sites[1:])
        )
        assert rebuilt == word


def test_height_values():
    p = LineParams(3, 2, 1)
    assert height(Site(0, 0), p) == 0
    assert height(Site(1, 0), p) == -2  # one 'a' step costs tb
    assert height(Site(3, 2), p) == 0  # multiples of (ta, tb) are level


def test_height_profile_examples():
    assert height_profile(cfg("bbaa", 1, 1, 2)) == [0, 1, 2, 1, 0]
    assert height_profile(cfg("abab", 1, 1, 2)) == [0, -1, 0, -1, 0]
    profile = height_profile(cfg("babaa", 3, 2, 1))
    # independent recomputation through the site-level height op
    assert profile == [height(s, LineParams(3, 2, 1)) for s in sites_of(cfg("babaa", 3, 2, 1))]
    assert profile == [0, 3, 1, 4, 2, 0]
    assert thickness(cfg("babaa", 3, 2, 1)) == 4


def test_thickness_examples():
    assert thickness(cfg("bbaa", 1, 1, 2)) == 2
    assert thickness(cfg("abab", 1, 1, 2)) == 1


@pytest.mark.parametrize("ta,tb,n", [(1, 1, 3), (2, 1, 2), (3, 2, 1)])
def test_thickness_lower_bound_exhaustive(ta, tb, n):
    p = LineParams(ta, tb, n)
    for word in brute_words(p):
        assert thickness(Configuration(word, p)) >= p.per - 1


@pytest.mark.parametrize("ta,tb,n", [(1, 1, 2), (3, 2, 1)])
def test_height_congruence_depends_only_on_index_mod_per(ta, tb, n):
    p = LineParams(ta, tb, n)
    table = {}
    for word in brute_words(p):
        for i, h in enumerate(height_profile(Configuration(word, p))):
            assert table.setdefault(i % p.per, h % p.per) == h % p.per


# -- christoffel -------------------------------------------------------


def test_is_christoffel_examples():
    assert is_christoffel(cfg("abab", 1, 1, 2))
    assert not is_christoffel(cfg("bbaa", 1, 1, 2))
    assert is_christoffel(cfg("babaa", 3, 2, 1))


@pytest.mark.parametrize(
    "ta,tb,n,expected",
    [(1, 1, 1, "ba"), (1, 1, 2, "baba"), (3, 2, 1, "babaa")],
)
def test_target_christoffel_words(ta, tb, n, expected):
    p = LineParams(ta, tb, n)
    got = target_christoffel(p)
    assert got.word == expected
    # brute-force uniqueness: the only word with heights inside [0, per-1]
    inside = [
        w
        for w in brute_words(p)
        if all(0 <= h <= p.per - 1 for h in height_profile(Configuration(w, p)))
    ]
    assert inside == [expected]


@pytest.mark.parametrize("ta,tb,n", [(1, 1, 3), (2, 1, 2), (3, 2, 2), (4, 3, 1), (5, 2, 1)])
def test_target_christoffel_properties(ta, tb, n):
    p = LineParams(ta, tb, n)
    t = target_christoffel(p)
    assert is_christoffel(t)
    assert is_nonnegative(t)
    assert h_min(t) == 0 and h_max(t) == p.per - 1


def test_mirror_christoffel_band():
    p = LineParams(3, 2, 2)
    m = mirror_christoffel(p)
    assert is_christoffel(m)
    assert h_max(m) == 0 and h_min(m) == -(p.per - 1)


# -- flips -------------------------------------------------------------


def test_flip_examples():
    flipped = flip(cfg("aabb", 1, 1, 2), 2)
    assert flipped.word == "abab"
    assert height_profile(cfg("aabb", 1, 1, 2))[2] == -2
    assert height_profile(flipped)[2] == 0  # rose by per

    assert flip(cfg("baba", 1, 1, 2), 1).word == "abba"
    assert height_profile(cfg("baba", 1, 1, 2))[1] == 1
    assert height_profile(flip(cfg("baba", 1, 1, 2), 1))[1] == -1


def test_flip_rejects_equal_letters_and_bad_indices():
    with pytest.raises(ValueError):
        flip(cfg("aabb", 1, 1, 2), 1)
    with pytest.raises(ValueError):
        flip(cfg("aabb", 1, 1, 2), 0)  # chain has no site-0 flip
    with pytest.raises(ValueError):
        flip(cfg("aabb", 1, 1, 2), 4)


def test_flip_moves_only_one_site():
    config = cfg("baaba", 3, 2, 1)
    for i in range(1, 5):
        if config.word[i - 1] == config.word[i]:
            continue
        before = sites_of(config)
        after = sites_of(flip(config, i))
        diffs = [j for j, (x, y) in enumerate(zip(before, after)) if x != y]
        assert diffs == [i]


def test_flip_is_involution():
    config = cfg("baaba", 3, 2, 1)
    for i in range(1, 5):
        if config.word[i - 1] != config.word[i]:
            assert flip(flip(config, i), i).word == config.word


def test_cycle_flip_at_zero_swaps_boundary_letters():
    config = cfg("ab", 1, 1, 1, CYCLE)
    assert flip(config, 0).word == "ba"
    # thickness is preserved under the re-rooted representation
    assert thickness(flip(config, 0)) == thickness(config)


# -- misc --------------------------------------------------------------


def test_swap_morphism():
    assert swap_morphism("ab") == "ba"
    assert swap_morphism("bbb") == "aaa"
    for word in brute_words(LineParams(2, 1, 1)):
        assert swap_morphism(swap_morphism(word)) == word


def test_is_nonnegative_examples():
    assert is_nonnegative(cfg("bbaa", 1, 1, 2))
    assert not is_nonnegative(cfg("abab", 1, 1, 2))


def test_json_round_trip():
    config = cfg("babaa", 3, 2, 1, CHAIN)
    data = config_to_json(config)
    assert data == {"word": "babaa", "ta": 3, "tb": 2, "n": 1, "topology": "chain"}
    assert config_from_json(data) == config
    with pytest.raises(ValueError):
        config_from_json({"word": "ab"})
