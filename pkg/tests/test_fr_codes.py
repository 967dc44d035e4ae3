# tests/test_fr_codes.py
import itertools

import pytest

from skipless.errors import BlockSizeMismatch, DescriptorError, NoZeroSkipPlan, ParameterOutOfRange
from skipless.finite_field import FieldSpec
from skipless.fr_codes import (
    FRCode,
    PacketStore,
    demo_store,
    outer_decode,
    outer_encode,
    repair_node,
    to_array_code,
)
from skipless.steiner import Design, Finite


@pytest.fixture(scope="module")
def field():
    return FieldSpec.default()


@pytest.fixture
def fr8(sqs8):
    return to_array_code(sqs8)


class TestArrayCode:
    def test_shape(self, fr8):
        assert (fr8.n, fr8.N, fr8.M) == (8, 14, 4)

    def test_replication(self, fr8, sqs10):
        assert set(fr8.replication().values()) == {7}
        assert set(to_array_code(sqs10).replication().values()) == {12}

    def test_block_size_mismatch(self):
        d = Design.from_blocks([(Finite(1), Finite(2), Finite(3))])
        with pytest.raises(BlockSizeMismatch):
            to_array_code(d)

    def test_node_contents_follow_block_order(self, fr8, field):
        store, _ = demo_store(fr8, field, seed=1)
        for node, block in enumerate(fr8.placement):
            assert fr8.node_contents(store, node) == [store[p] for p in block]
        with pytest.raises(ParameterOutOfRange):
            fr8.node_contents(store, 14)

    def test_materialize(self, fr8, field):
        store, _ = demo_store(fr8, field, seed=1)
        grid = fr8.materialize(store)
        assert len(grid) == 4
        assert all(len(row) == 14 for row in grid)
        assert [grid[r][3] for r in range(4)] == fr8.node_contents(store, 3)


class TestOuterCode:
    def test_identity_when_k_equals_n(self, field):
        symbols = [11, 22, 33, 44, 55]
        store = outer_encode(symbols, 5, 5, field)
        assert [store[Finite(j)] for j in range(5)] == symbols

    def test_single_symbol(self, field):
        store = outer_encode([7], 3, 1, field)
        assert [store[Finite(j)] for j in range(3)] == [7, 7, 7]

    def test_any_k_packets_decode(self, field):
        symbols = [3, 1, 4, 1, 5]
        points = [Finite(j) for j in range(8)]
        store = outer_encode(symbols, 8, 5, field)
        assert [store[p] for p in points[:5]] == symbols
        for keep in itertools.combinations(range(8), 5):
            survivors = store.without([points[j] for j in range(8) if j not in keep])
            assert outer_decode(survivors, 5, field, points) == symbols

    def test_too_few_packets(self, field):
        points = [Finite(j) for j in range(8)]
        store = outer_encode([1, 2, 3, 4, 5], 8, 5, field).without(points[:4])
        with pytest.raises(ParameterOutOfRange):
            outer_decode(store, 5, field, points)

    @pytest.mark.parametrize("n,k", [(4, 5), (4, 0)])
    def test_bad_dimensions(self, field, n, k):
        with pytest.raises(ParameterOutOfRange):
            outer_encode([1] * k, n, k, field)

    def test_field_too_small(self):
        with pytest.raises(ParameterOutOfRange):
            outer_encode([1, 2], 8, 2, FieldSpec.default(2))

    def test_wrong_symbol_count(self, field):
        with pytest.raises(ParameterOutOfRange):
            outer_encode([1, 2, 3], 8, 4, field)

    def test_demo_store_default_dimension(self, fr8, field):
        store, file_symbols = demo_store(fr8, field, seed=0)
        assert len(file_symbols) == 4
        assert len(store) == 8
        assert outer_decode(store, 4, field, fr8.points) == file_symbols


class TestBytes:
    def test_round_trip(self, fr8):
        data = b"fractional repetition"
        store = PacketStore.from_bytes(data, fr8.points)
        assert store.chunk_size == 3
        assert store.to_bytes(fr8.points) == data

    def test_does_not_fit(self, fr8):
        with pytest.raises(ParameterOutOfRange):
            PacketStore.from_bytes(bytes(100), fr8.points, chunk_size=2)

    def test_symbols_are_not_bytes(self, fr8, field):
        store, _ = demo_store(fr8, field, seed=0)
        with pytest.raises(ParameterOutOfRange):
            store.to_bytes()


class TestRepair:
    def test_every_node_by_transfer(self, fr8):
        store = PacketStore.from_bytes(bytes(range(64)), fr8.points)
        for node in range(fr8.N):
            packets, metrics = repair_node(fr8, store, node)
            expected = fr8.node_contents(store, node)
            assert packets == expected
            assert all(got is want for got, want in zip(packets, expected))
            assert metrics.locality == 2
            assert metrics.bandwidth == 4
            assert metrics.skip_cost == 0

    def test_sqs14_nodes(self, field):
        from skipless.steiner import sqs14

        code = to_array_code(sqs14())
        store, _ = demo_store(code, field, seed=5)
        for node in range(code.N):
            packets, metrics = repair_node(code, store, node)
            assert packets == code.node_contents(store, node)
            assert metrics.skip_cost == 0

    def test_gapped_node(self, gapped_sqs8, field):
        code = to_array_code(gapped_sqs8)
        store, _ = demo_store(code, field, seed=2)
        with pytest.raises(NoZeroSkipPlan):
            repair_node(code, store, 10)
        packets, metrics = repair_node(code, store, 10, max_skip=None)
        assert packets == code.node_contents(store, 10)
        assert metrics.skip_cost == 2
        assert metrics.max_helper_fraction == 0.5

    def test_single_node_code(self, sqs4, field):
        code = to_array_code(sqs4)
        store, _ = demo_store(code, field, seed=0)
        with pytest.raises(NoZeroSkipPlan):
            repair_node(code, store, 0)


class TestDescriptor:
    def test_round_trip(self, fr8):
        again = FRCode.from_dict(fr8.to_dict())
        assert (again.n, again.N, again.M) == (fr8.n, fr8.N, fr8.M)
        assert again.placement == fr8.placement

    def test_shape_mismatch(self, fr8):
        data = fr8.to_dict()
        data["N"] = 15
        with pytest.raises(DescriptorError):
            FRCode.from_dict(data)

    def test_missing_design(self):
        with pytest.raises(DescriptorError):
            FRCode.from_dict({"kind": "fr-code", "n": 8, "N": 14, "M": 4})
