import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modmax.graph import ModularityValue
from modmax.partition import (
    CertificateError,
    Partition,
    PartitionError,
    ami,
    bell_number,
    canonicalize,
    contingency,
    enumerate_partitions,
    from_communities,
    gop,
    is_refinement,
    max_ami_vs_optima,
    merged_blocks,
)

# AMI([0,0,1,1,2,2], [0,0,0,1,1,1]) from a direct summation over the
# hypergeometric support (scipy.stats.hypergeom pmf), arithmetic-mean
# normalisation; computed before the implementation existed.
GOLDEN_AMI = 0.29879245817089


def _stirling2_bell(n):
    # independent of the Bell-triangle code: sum of Stirling numbers of the second kind
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            s[i][k] = k * s[i - 1][k] + s[i - 1][k - 1]
    return sum(s[n])


labels = st.lists(st.integers(0, 5), min_size=1, max_size=30)


def test_canonicalize_examples():
    assert canonicalize([7, 7, 2, 7, 2]).membership == (0, 0, 1, 0, 1)
    assert canonicalize(["b", "a", "b"]).membership == (0, 1, 0)
    assert canonicalize([0, 1, 0, 2]).membership == (0, 1, 0, 2)


def test_canonicalize_rejects_empty():
    with pytest.raises(PartitionError):
        canonicalize([])


def test_partition_requires_restricted_growth():
    with pytest.raises(PartitionError):
        Partition((1, 0))


@given(labels)
def test_canonicalize_idempotent(xs):
    p = canonicalize(xs)
    assert canonicalize(p.membership) == p
    assert p.k == len(set(xs))


def test_enumerate_small_cases():
    assert [p.membership for p in enumerate_partitions(1)] == [(0,)]
    three = [p.membership for p in enumerate_partitions(3)]
    assert three == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]
    assert sum(1 for _ in enumerate_partitions(6)) == 203


def test_enumerate_limit():
    with pytest.raises(PartitionError):
        next(enumerate_partitions(13))


@pytest.mark.parametrize("n", range(1, 11))
def test_enumeration_count_matches_bell(n):
    parts = list(enumerate_partitions(n))
    assert len(parts) == len(set(parts)) == bell_number(n) == _stirling2_bell(n)
    assert [p.membership for p in parts] == sorted(p.membership for p in parts)


def test_contingency_sums():
    t = contingency([0, 0, 1, 1, 2], [0, 1, 1, 1, 0])
    assert t.total == 5
    assert list(t.row_sums) == [2, 2, 1] and list(t.col_sums) == [2, 3]
    assert int(t.counts.sum()) == 5
    assert t.counts.tolist() == [[1, 1], [0, 2], [1, 0]]


def test_ami_examples():
    assert ami([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert ami([0, 1, 2, 0], [0, 1, 2, 0]) == 1.0
    assert ami([0, 0, 1, 1, 2, 2], [0, 0, 0, 1, 1, 1]) == pytest.approx(GOLDEN_AMI, abs=1e-12)


def test_ami_trivial_partitions():
    assert ami([0, 0, 0], [0, 0, 0]) == 1.0
    assert ami([0, 1, 2], [0, 1, 2]) == 1.0
    assert ami([0, 0, 0], [0, 1, 2]) == 0.0


def test_ami_size_mismatch():
    with pytest.raises(PartitionError):
        ami([0, 1], [0, 1, 1])


@settings(max_examples=80)
@given(st.data())
def test_ami_symmetric_relabel_invariant(data):
    n = data.draw(st.integers(2, 25))
    u = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    v = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    a = ami(u, v)
    assert a == pytest.approx(ami(v, u), abs=1e-12)
    assert a == pytest.approx(ami([9 - x for x in u], v), abs=1e-12)
    assert a <= 1.0 + 1e-12


def test_ami_chance_adjustment():
    rng = random.Random(11)
    vals = [ami([rng.randrange(5) for _ in range(50)], [rng.randrange(5) for _ in range(50)])
            for _ in range(200)]
    assert abs(sum(vals) / len(vals)) < 0.02


def test_gop_cases():
    q = ModularityValue(7, 20)
    assert gop(q, q) == 1.0
    assert gop(Fraction(-1, 10), Fraction(1, 2)) == 0.0
    assert gop(Fraction(35, 100), Fraction(70, 100)) == 0.5
    assert gop(0, 0) == 1.0
    assert gop(-1, 0) == 0.0
    with pytest.raises(CertificateError):
        gop(Fraction(3, 4), Fraction(1, 2))


def test_gop_below_one_never_rounds_to_one():
    assert gop(Fraction(10**20 - 1, 10**20), 1) < 1.0


@given(st.integers(0, 1000), st.integers(1, 1000), st.integers(1, 50))
def test_gop_scale_free(a, b, c):
    qh, qs = min(a, b), b
    assert gop(ModularityValue(qh, 997), ModularityValue(qs, 997)) == \
        gop(ModularityValue(qh * c, 997 * c), ModularityValue(qs * c, 997 * c))


def test_max_ami_vs_optima():
    opts = [canonicalize([0, 0, 1, 1]), canonicalize([0, 1, 1, 1])]
    assert max_ami_vs_optima([1, 1, 0, 0], opts) == 1.0
    x = [0, 0, 0, 1]
    assert max_ami_vs_optima(x, opts[:1]) == ami(x, opts[0])
    with pytest.raises(PartitionError):
        max_ami_vs_optima(x, [])


def test_refinement_helpers():
    fine = from_communities([[0], [1], [2, 3], [4]], 5)
    coarse = canonicalize([0, 0, 0, 0, 1])
    assert is_refinement(fine, coarse) and not is_refinement(coarse, fine)
    assert merged_blocks(fine, coarse) == {0: [0, 1, 2], 1: [3]}
