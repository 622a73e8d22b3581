import numpy as np
import pytest
from conftest import seeds
from hypothesis import given
from hypothesis import strategies as st

from qtower import channels, cstarsplit, linalg, lotimes, sampling
from qtower.channels import KrausChannel
from qtower.cstarsplit import Partition
from qtower.errors import (
    AbsorptionFails,
    BadPartition,
    InvalidChannel,
    MatrixFormatError,
    NoKnownPartition,
    ObjectMismatch,
)
from qtower.rigstruct import Dim

partitions = st.lists(st.integers(1, 3), min_size=1, max_size=4).map(lambda b: Partition(tuple(b)))


def block_oracle(rho, blocks):
    """Zero every entry whose row and column fall in different blocks."""
    labels = np.repeat(np.arange(len(blocks)), blocks)
    return np.where(labels[:, None] == labels[None, :], rho, 0)


def depolarizing(n, p):
    ops = [np.sqrt(1 - p + p / n**2) * np.eye(n)]
    for i in range(n):
        for j in range(n):
            if (i, j) != (0, 0):
                u = np.zeros((n, n))
                u[i, j] = 1
                ops.append(np.sqrt(p / n) * u)
    return KrausChannel(n, n, tuple(ops))


@pytest.mark.parametrize("blocks", [(), (0,), (1, -1), (True,)])
def test_bad_partitions(blocks):
    with pytest.raises(BadPartition):
        Partition(blocks)


def test_partition_json():
    p = Partition((1, 2))
    assert cstarsplit.partition_from_json(cstarsplit.partition_to_json(p)) == p
    with pytest.raises(MatrixFormatError):
        cstarsplit.partition_from_json({"sizes": [1]})


def test_measurement_idempotent_examples():
    single = cstarsplit.measurement_idempotent([2])
    assert channels.channel_equal(single.idem, channels.identity_channel(2))
    deph = cstarsplit.measurement_idempotent([1, 1])
    assert channels.channel_equal(deph.idem, KrausChannel(2, 2, (np.diag([1.0, 0]), np.diag([0, 1.0]))))
    rho = np.arange(9).reshape(3, 3) + 1j
    out = cstarsplit.measurement_idempotent([1, 2]).idem(rho)
    expected = np.array(rho)
    expected[0, 1:] = 0
    expected[1:, 0] = 0
    np.testing.assert_array_equal(out, expected)


def test_measurement_idempotent_wrong_ambient():
    with pytest.raises(BadPartition):
        cstarsplit.measurement_idempotent([1, 1], Dim(3))


@given(partitions, seeds)
def test_idempotent_zeroes_off_diagonal_blocks(p, seed):
    s = cstarsplit.measurement_idempotent(p)
    rho = sampling.gaussian(sampling.rng(seed), p.total, p.total)
    np.testing.assert_allclose(s.idem(rho), block_oracle(rho, p.blocks), atol=1e-14)
    assert cstarsplit.is_causal_idempotent(s.idem)


def test_block_helpers_round_trip():
    p = Partition((2, 1))
    rho = np.arange(9, dtype=complex).reshape(3, 3)
    blocks = cstarsplit.extract_blocks(rho, p)
    assert [b.shape for b in blocks] == [(2, 2), (1, 1)]
    np.testing.assert_array_equal(cstarsplit.assemble_blocks(blocks), block_oracle(rho, (2, 1)))


@pytest.mark.parametrize(
    "k, expected",
    [
        (cstarsplit.measurement_idempotent([1, 1]).idem, True),
        (channels.identity_channel(3), True),
        (depolarizing(2, 0.5), False),
        (KrausChannel(2, 2, (np.diag([1.0, 0.0]),)), False),
        (KrausChannel(2, 3, (np.ones((3, 2)) / 3,)), False),
    ],
)
def test_is_causal_idempotent(k, expected):
    assert cstarsplit.is_causal_idempotent(k) is expected


def test_split_object_rejects_non_idempotent():
    with pytest.raises(InvalidChannel):
        cstarsplit.SplitObject(Dim(2), depolarizing(2, 0.5))


def test_split_identities_for_dephasing():
    s = cstarsplit.measurement_idempotent([1, 1])
    m, p = cstarsplit.split_idempotent(s)
    mp = cstarsplit.compose_split(p, m)
    pm = cstarsplit.compose_split(m, p)
    assert channels.channel_distance(mp.f, cstarsplit.identity(s).f) <= 1e-10
    assert mp.src.same_as(s) and mp.dst.same_as(s)
    assert channels.channel_distance(pm.f, s.idem) <= 1e-10
    assert pm.src.same_as(cstarsplit.trivial_object(Dim(2)))


def test_single_block_split_is_identity():
    m, p = cstarsplit.split_idempotent(cstarsplit.measurement_idempotent([3]))
    for f in (m, p):
        assert channels.channel_equal(f.f, channels.identity_channel(3))


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3).filter(lambda b: sum(b) <= 6))
def test_split_identities_random(blocks):
    s = cstarsplit.measurement_idempotent(blocks)
    m, p = cstarsplit.split_idempotent(s)
    assert channels.channel_distance(cstarsplit.compose_split(p, m).f, s.idem) <= 1e-10
    assert channels.channel_distance(cstarsplit.compose_split(m, p).f, s.idem) <= 1e-10


def test_split_needs_partition():
    s = cstarsplit.SplitObject(Dim(2), channels.identity_channel(2))
    with pytest.raises(NoKnownPartition):
        cstarsplit.split_idempotent(s)


def test_absorption():
    a = cstarsplit.measurement_idempotent([1, 1])
    cstarsplit.validate_split_mor(a.idem, a, a)
    b = cstarsplit.measurement_idempotent([2])
    c = cstarsplit.measurement_idempotent([1, 1])
    with pytest.raises(AbsorptionFails):
        cstarsplit.validate_split_mor(channels.identity_channel(2), b, c)
    d = cstarsplit.measurement_idempotent([1, 2])
    e = cstarsplit.measurement_idempotent([2, 1])
    with pytest.raises(AbsorptionFails):
        cstarsplit.validate_split_mor(channels.identity_channel(3), d, e)


@given(partitions, partitions, seeds)
def test_coercion_always_absorbs(p, q, seed):
    src, dst = cstarsplit.measurement_idempotent(p), cstarsplit.measurement_idempotent(q)
    g = channels.random_cptn(p.total, q.total, 2, seed)
    f = cstarsplit.coerce(g, src, dst)
    assert channels.channel_equal(cstarsplit.compose_split(cstarsplit.identity(src), f).f, f.f)
    assert channels.channel_equal(cstarsplit.compose_split(f, cstarsplit.identity(dst)).f, f.f)


def test_compose_split_object_mismatch():
    a = cstarsplit.measurement_idempotent([1, 1])
    b = cstarsplit.trivial_object(Dim(2))
    with pytest.raises(ObjectMismatch):
        cstarsplit.compose_split(cstarsplit.identity(a), cstarsplit.identity(b))


def test_tensor_split():
    a = cstarsplit.identity(cstarsplit.measurement_idempotent([1, 1]))
    b = cstarsplit.identity(cstarsplit.trivial_object(Dim(2)))
    ab = cstarsplit.tensor_split(a, b)
    want = channels.tensor_channels(a.f, b.f)
    assert channels.channel_equal(ab.f, want)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_cotuple_candidate_is_a_measurement(d, gen):
    a = Dim(d)
    cand = lotimes.to_channel(cstarsplit.cotuple_candidate(a, a))
    e = cstarsplit.measurement_idempotent([d, d]).idem
    for _ in range(5):
        rho = linalg.direct_sum(sampling.density(gen, d), sampling.density(gen, d))
        np.testing.assert_allclose(cand(rho), e(rho), atol=1e-12)
    assert channels.channel_equal(cand, e)
    assert channels.channel_distance(cand, channels.identity_channel(2 * d)) > 0.1
