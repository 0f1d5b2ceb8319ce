import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsmc import (
    DescriptorElement,
    ResourceLimitError,
    Track,
    build_bk_descriptor,
    clusters,
    descriptor_element,
    descriptor_sequence,
    epsilon,
    rt,
    scan,
    tau,
)
from hsmc.descriptor import configuration_string

from conftest import CONTRACTED_WALK, LONG_WALK
from corpus import random_structure, random_walk


def _element(k, vin, inner, vfin):
    mask = 0
    for name in inner:
        mask |= 1 << k.state_index(name)
    return DescriptorElement(k.state_index(vin), mask, k.state_index(vfin))


def test_descriptor_element_examples(k2, fig4):
    d = descriptor_element(fig4.track("v0 v0 v0 v1 v2"))
    assert d == _element(fig4, "v0", ("v0", "v1"), "v2")
    assert descriptor_element(k2.track("v0 v1")) == _element(k2, "v0", (), "v1")
    d2 = descriptor_element(k2.track("v0 v1 v0"))
    assert d2 == _element(k2, "v0", ("v1",), "v0")
    assert d2.is_type1


def test_descriptor_sequence_of_star_track(fig4):
    seq = descriptor_sequence(fig4.track("v0 v0 v0 v1 v2 v1 v2 v3 v3 v2 v2"))
    assert len(seq) == 10
    gamma = ("v0", "v1", "v2")
    delta = ("v0", "v1", "v2", "v3")
    want = [
        _element(fig4, "v0", (), "v0"),
        _element(fig4, "v0", ("v0",), "v0"),
        _element(fig4, "v0", ("v0",), "v1"),
        _element(fig4, "v0", ("v0", "v1"), "v2"),
        _element(fig4, "v0", gamma, "v1"),
        _element(fig4, "v0", gamma, "v2"),
        _element(fig4, "v0", gamma, "v3"),
        _element(fig4, "v0", delta, "v3"),
        _element(fig4, "v0", delta, "v2"),
        _element(fig4, "v0", delta, "v2"),
    ]
    assert list(seq) == want
    assert len(seq.delm()) == 9


def test_descriptor_sequence_short(k2):
    seq = descriptor_sequence(k2.track("v0 v1"))
    assert list(seq) == [_element(k2, "v0", (), "v1")]


def test_rt_examples(k2, fig4):
    a = _element(k2, "v0", ("v0",), "v1")
    b = _element(k2, "v0", ("v0", "v1"), "v1")
    assert rt(a, b) and not rt(b, a)
    c = _element(fig4, "v0", ("v1", "v2"), "v1")
    d = _element(fig4, "v0", ("v1", "v2"), "v2")
    assert rt(c, d) and rt(d, c)
    assert not rt(a, a)  # Type-1 elements never relate to themselves
    with pytest.raises(ValueError):
        rt(a, _element(k2, "v1", (), "v0"))


def test_rt_transitive(fig4):
    rng = random.Random(3)
    for _ in range(200):
        seq = descriptor_sequence(random_walk(rng, fig4, rng.randint(2, 10)))
        for x, y, z in itertools.product(seq, repeat=3):
            if rt(x, y) and rt(y, z):
                assert rt(x, z)


def test_clusters_of_star_track(fig4):
    seq = descriptor_sequence(fig4.track("v0 v0 v0 v1 v2 v1 v2 v3 v3 v2 v2"))
    got = clusters(seq)
    gamma = ("v0", "v1", "v2")
    delta = ("v0", "v1", "v2", "v3")
    assert [c.span for c in got] == [(1, 1), (4, 5), (7, 9)]
    assert got[0].members == {_element(fig4, "v0", ("v0",), "v0")}
    assert got[1].members == {
        _element(fig4, "v0", gamma, "v1"),
        _element(fig4, "v0", gamma, "v2"),
    }
    assert got[2].members == {
        _element(fig4, "v0", delta, "v3"),
        _element(fig4, "v0", delta, "v2"),
    }


def test_clusters_empty_when_all_type1():
    seq = descriptor_sequence(Track((0, 1, 2)))  # fresh state each step
    assert all(d.is_type1 for d in seq)
    assert clusters(seq) == []


def test_cluster_size_bounded_by_states():
    rng = random.Random(5)
    for _ in range(50):
        k = random_structure(rng)
        seq = descriptor_sequence(random_walk(rng, k, rng.randint(2, 12)))
        for c in clusters(seq):
            assert len(c.members) <= k.n_states
        assert len(seq.delm()) <= 1 + k.n_states**2


def test_long_walk_single_cluster(fig4):
    seq = descriptor_sequence(fig4.track(LONG_WALK))
    got = clusters(seq)
    assert len(got) == 1
    assert got[0].span == (3, 27)
    assert len(got[0].members) == 3


# frozen indistinguishability levels between consecutive occurrences along
# the 29-state walk; 0 marks pairs that are not even 1-indistinguishable
LONG_WALK_LEVELS = [
    ((3, 5), 0),
    ((4, 7), 0),
    ((5, 6), 1),
    ((6, 8), 1),
    ((8, 10), 2),
    ((10, 11), 3),
    ((11, 13), 3),
    ((7, 9), 1),
    ((9, 12), 2),
    ((12, 14), 3),
    ((13, 16), 0),
    ((14, 17), 0),
    ((16, 18), 1),
    ((18, 23), 1),
    ((23, 26), 2),
    ((17, 19), 1),
    ((19, 21), 1),
    ((21, 24), 2),
    ((24, 25), 3),
    ((25, 27), 3),
    ((15, 20), 0),
    ((20, 22), 1),
]

LONG_WALK_CONFIGS = (
    "210000 120000 111000 110100 102000 101100 100200 100110 100101 100020 "
    "100011 100002 030000 021000 012000 011100 010200 003000 002100 001200 "
    "000300 000210 000201 000120 000111"
).split()


def test_long_walk_indistinguishability_levels(fig4):
    seq = descriptor_sequence(fig4.track(LONG_WALK))
    for (i, j), level in LONG_WALK_LEVELS:
        assert seq.elements[i] == seq.elements[j]
        assert seq.exact_level(i, j) == level, (i, j)
    # the three spot checks: 1-indistinguishable, 3-indistinguishable, neither
    assert seq.k_indistinguishable(5, 6, 1)
    assert seq.k_indistinguishable(10, 11, 3)
    assert not seq.k_indistinguishable(3, 5, 1)


def test_scan_long_walk_configurations(fig4):
    seq = descriptor_sequence(fig4.track(LONG_WALK))
    cluster = clusters(seq)[0]
    result = scan(seq, cluster, 3)
    got = [configuration_string(c) for c in result.configurations()]
    assert got == LONG_WALK_CONFIGS
    assert result.case_counts["c"] == 0 and result.case_counts["e"] == 0
    for first, second in zip(result.configurations(), result.configurations()[1:]):
        assert first > second  # strict lexicographic descent


def test_scan_initial_state(fig4):
    seq = descriptor_sequence(fig4.track(LONG_WALK))
    cluster = clusters(seq)[0]
    result = scan(seq, cluster, 2)
    first = result.configurations()[0]
    assert first == (len(cluster.members) - 1, 1, 0, 0, 0)


def test_scan_single_element_cluster(fig4):
    seq = descriptor_sequence(fig4.track("v0 v0 v0 v1 v2 v1 v2 v3 v3 v2 v2"))
    cluster = clusters(seq)[0]
    result = scan(seq, cluster, 1)
    assert result.configurations() == [(0, 1, 0, 0)]


def test_scan_agrees_with_recursive_definition():
    rng = random.Random(42)
    fired = 0
    for _ in range(150):
        k = random_structure(rng, max_states=4)
        seq = descriptor_sequence(random_walk(rng, k, rng.randint(2, 14)))
        for cluster in clusters(seq):
            u, v = cluster.span
            levels = [
                seq.exact_level(seq.prev_occurrence[i], i)
                for i in range(u + 1, v + 1)
                if seq.prev_occurrence[i] is not None and seq.prev_occurrence[i] >= u
            ]
            s = max(3, max(levels, default=1), 1)
            result = scan(seq, cluster, s)
            fired += result.case_counts["c"] + result.case_counts["e"]
            for a, b in zip(result.configurations(), result.configurations()[1:]):
                assert a > b
            for step in result.steps[1:]:
                i = step.position
                d = seq[i]
                prev = seq.prev_occurrence[i]
                if prev is None or prev < u:
                    bucket = -1
                else:
                    level = seq.exact_level(prev, i)
                    bucket = level if level >= 1 else 0
                assert d in step.state.queues[bucket + 2], (i, bucket)
    assert fired == 0


def test_indistinguishability_downward_and_transitive():
    rng = random.Random(43)
    for _ in range(80):
        k = random_structure(rng, max_states=3)
        seq = descriptor_sequence(random_walk(rng, k, rng.randint(3, 12)))
        n = len(seq)
        for k_level in (2, 3):
            for i in range(n):
                for j in range(i + 1, n):
                    if seq.k_indistinguishable(i, j, k_level):
                        assert seq.k_indistinguishable(i, j, k_level - 1)
        occurrences = {}
        for idx, d in enumerate(seq):
            occurrences.setdefault(d, []).append(idx)
        for positions in occurrences.values():
            for i, j, m in itertools.combinations(positions, 3):
                for k_level in (1, 2):
                    if seq.k_indistinguishable(i, j, k_level) and seq.k_indistinguishable(j, m, k_level):
                        assert seq.k_indistinguishable(i, m, k_level)


def test_epsilon_small_values():
    assert epsilon(2, 2) == 3
    assert epsilon(1, 1) == 1
    with pytest.raises(ValueError):
        epsilon(0, 2)


def test_indistinguishability_argument_validation(fig4):
    seq = descriptor_sequence(fig4.track("v0 v0 v0 v1 v2"))
    with pytest.raises(ValueError):
        seq.k_indistinguishable(0, 1, 0)
    with pytest.raises(ValueError):
        seq.k_indistinguishable(2, 1, 1)
    with pytest.raises(ValueError):
        seq.k_indistinguishable(0, 99, 1)


def test_scan_argument_validation(fig4):
    seq = descriptor_sequence(fig4.track("v0 v0 v0 v1 v2 v1 v2 v3 v3 v2 v2"))
    with pytest.raises(ValueError):
        scan(seq, clusters(seq)[0], 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5))
def test_epsilon_matches_enumeration(n, t):
    count = sum(
        1
        for combo in itertools.product(range(n + 1), repeat=t)
        if sum(combo) == n
    )
    assert epsilon(n, t) == count


def test_epsilon_upper_bounds():
    for n in range(1, 11):
        for t in range(1, 11):
            assert epsilon(n, t) <= (n + 1) ** (t - 1)
            assert epsilon(n, t) <= t**n


def test_tau_values_and_monotonicity():
    assert tau(2, 0) == 84
    assert tau(1, 1) == 18
    for w in range(1, 7):
        for k in range(0, 6):
            assert tau(w, k) <= tau(w, k + 1)
    with pytest.raises(ValueError):
        tau(0, 1)


def test_b2_descriptor_of_merging_track(k2):
    d = build_bk_descriptor(k2, k2.track("v0 v1 v0 v0 v0 v0 v1"), 2)
    assert d.element == _element(k2, "v0", ("v0", "v1"), "v1")
    assert len(d.children) == 4


def test_b1_descriptors_of_merged_prefixes_coincide(k2):
    a = build_bk_descriptor(k2, k2.track("v0 v1 v0 v0 v0 v0"), 1)
    b = build_bk_descriptor(k2, k2.track("v0 v1 v0 v0 v0"), 1)
    assert a == b


def test_b0_descriptor_is_root_only(k2):
    d = build_bk_descriptor(k2, k2.track("v0 v1 v0"), 0)
    assert d.children == ()
    assert d.element == _element(k2, "v0", ("v1",), "v0")


def test_descriptor_resource_guard(k2):
    with pytest.raises(ResourceLimitError):
        build_bk_descriptor(k2, k2.track("v0 v1 v0 v0 v0 v0 v1"), 2, max_nodes=3)


def test_indistinguishability_matches_descriptor_equality():
    rng = random.Random(44)
    for _ in range(60):
        k = random_structure(rng, max_states=3)
        track = random_walk(rng, k, rng.randint(2, 12))
        seq = descriptor_sequence(track)
        for depth in (1, 2, 3):
            keys = [
                build_bk_descriptor(k, Track(track.states[: i + 2]), depth).key
                for i in range(len(seq))
            ]
            for i in range(len(seq)):
                for j in range(i + 1, len(seq)):
                    assert seq.k_indistinguishable(i, j, depth) == (
                        keys[i] == keys[j]
                    ), (track.states, i, j, depth)


def test_concatenation_preserves_descriptor_equality():
    # tracks with equal depth-k descriptors stay equal after gluing the same
    # continuations on, and gluing equal pairs gives equal results
    rng = random.Random(45)
    checked = 0
    while checked < 40:
        k = random_structure(rng, max_states=3)
        depth = rng.randint(0, 2)
        tracks = [random_walk(rng, k, rng.randint(2, 7)) for _ in range(12)]
        by_key = {}
        for t in tracks:
            by_key.setdefault(build_bk_descriptor(k, t, depth).key, []).append(t)
        groups = [g for g in by_key.values() if len(g) >= 2]
        if not groups:
            continue
        first, second = groups[0][0], groups[0][1]
        for cont in tracks:
            if not k.has_edge(first.lst, cont.fst) or not k.has_edge(
                second.lst, cont.fst
            ):
                continue
            left = Track(first.states + cont.states)
            right = Track(second.states + cont.states)
            assert (
                build_bk_descriptor(k, left, depth).key
                == build_bk_descriptor(k, right, depth).key
            )
            checked += 1


def test_long_walk_and_contraction_share_b3_descriptor(fig4):
    long_track = fig4.track(LONG_WALK)
    short_track = fig4.track(CONTRACTED_WALK)
    assert (
        build_bk_descriptor(fig4, long_track, 3).key
        == build_bk_descriptor(fig4, short_track, 3).key
    )
