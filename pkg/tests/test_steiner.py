# tests/test_steiner.py
import pytest

from skipless import steiner
from skipless.errors import (
    DescriptorError,
    DuplicateBlock,
    InfinityInBlock,
    NoZeroSkipPlan,
    NotAnSQS,
    ParameterOutOfRange,
    TooManyTriples,
    UnsupportedOrder,
)
from skipless.steiner import (
    INF,
    BaseBlockTable,
    Design,
    Finite,
    Pair,
    Residue,
    build_sqs,
    certify,
    check_difference_condition,
    check_repeated_adjacent_pairs,
    closure_orders,
    design_stats,
    develop,
    diff_list,
    double,
    load_table,
    plan_block_repair,
    sqs14,
    sqs_from_table,
    triple_minus_two,
    verify_sqs,
)


def lifted(label, level):
    return Pair(Finite(label), level)


def residues(*values):
    return tuple(INF if v == "inf" else Residue(v) for v in values)


@pytest.fixture(scope="module")
def sqs26():
    return sqs_from_table("sqs26")


class TestConstructions:
    def test_trivial(self, sqs4):
        assert sqs4.v == 4
        assert len(sqs4.blocks) == 1
        assert verify_sqs(sqs4)

    def test_double_groups(self, sqs8):
        assert len(sqs8.blocks) == 14
        assert {g: len(ids) for g, ids in sqs8.group_members.items()} == {"B1": 8, "B2": 6}
        assert sqs8.blocks[0] == tuple(lifted(i, 0) for i in range(1, 5))
        assert sqs8.certified

    def test_triple_groups(self, sqs10):
        assert sqs10.v == 10
        assert len(sqs10.blocks) == 30
        sizes = {g: len(ids) for g, ids in sqs10.group_members.items()}
        assert sizes == {"B2_1": 3, "B2_2": 6, "B3": 9, "B4": 9, "B5": 3}
        assert INF in sqs10.points

    def test_triple_of_doubled(self, sqs8):
        d = triple_minus_two(sqs8)
        assert d.v == 22
        assert len(d.blocks) == 385
        assert len(d.group_members["B1"]) == 27 * 7

    def test_repeated_point_rejected(self):
        with pytest.raises(ParameterOutOfRange):
            Design.from_blocks([(Finite(1), Finite(1), Finite(2), Finite(3))])

    def test_double_rejects_non_sqs(self, sqs8):
        broken = Design.from_blocks(sqs8.blocks[1:], sqs8.points)
        with pytest.raises(NotAnSQS):
            double(broken)


class TestTables:
    @pytest.mark.parametrize("name,blocks", [("sqs26", 650), ("sqs34", 1496), ("sqs38", 2109)])
    def test_develop_counts(self, name, blocks):
        d = sqs_from_table(name)
        assert len(d.blocks) == blocks
        assert d.certified
        assert d.point_tag == "residue"

    def test_short_orbit(self):
        t = load_table("sqs34")
        assert t.orbit(0) == 11
        assert t.orbit(1) == 33
        assert t.order == 34

    def test_degenerate_orbit(self):
        t = BaseBlockTable("z4", 4, False, (residues(0, 1, 2, 3),), {0: 1})
        d = develop(t)
        assert len(d.blocks) == 1
        assert verify_sqs(d)

    def test_unmarked_short_orbit_is_a_duplicate(self):
        t = BaseBlockTable("z4", 4, False, (residues(0, 1, 2, 3),))
        with pytest.raises(DuplicateBlock):
            develop(t)

    def test_block_developed_twice(self):
        t = BaseBlockTable("twice", 7, False, (residues(0, 1, 3, 5), residues(1, 2, 4, 6)))
        with pytest.raises(DuplicateBlock):
            develop(t)

    def test_bad_short_orbit_mark(self):
        with pytest.raises(DescriptorError):
            BaseBlockTable("bad", 25, True, (residues(0, 1, 3, "inf"),), {0: 3})

    def test_inf_without_flag(self):
        with pytest.raises(DescriptorError):
            BaseBlockTable("bad", 25, False, (residues(0, 1, 3, "inf"),))

    def test_sqs14(self):
        d = sqs14()
        assert d.v == 14
        assert len(d.blocks) == 91
        assert d.blocks[0] == tuple(Finite(s) for s in "0125")
        assert d.certified

    def test_missing_asset(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SKIPLESS_DATA_DIR", str(tmp_path))
        with pytest.raises(DescriptorError):
            load_table("sqs26")


class TestBuildSqs:
    @pytest.mark.parametrize("v,blocks", [(4, 1), (8, 14), (10, 30), (14, 91), (16, 140), (20, 285), (22, 385)])
    def test_block_counts(self, v, blocks):
        d = build_sqs(v)
        assert d.v == v
        assert len(d.blocks) == blocks == v * (v - 1) * (v - 2) // 24

    def test_trace(self):
        d = build_sqs(20)
        assert d.trace == (
            "sqs(4): trivial",
            "sqs(10): triple_minus_two sqs(4)",
            "sqs(20): double sqs(10)",
        )

    @pytest.mark.parametrize("v", [12, 50, 5])
    def test_unsupported(self, v):
        with pytest.raises(UnsupportedOrder):
            build_sqs(v)

    def test_over_bound(self):
        with pytest.raises(UnsupportedOrder):
            build_sqs(40, bound=32)

    def test_closure_orders(self):
        assert closure_orders(50) == [4, 8, 10, 14, 16, 20, 22, 26, 28, 32, 34, 38, 40, 44, 46]


class TestVerifiers:
    def test_repeated_block(self, sqs8):
        d = Design.from_blocks(sqs8.blocks + sqs8.blocks[:1], sqs8.points)
        verdict = verify_sqs(d)
        assert not verdict
        assert verdict.reason == "triple covered twice"
        assert "covered twice" in verdict.describe()

    def test_missing_block(self, sqs8):
        verdict = verify_sqs(Design.from_blocks(sqs8.blocks[:-1], sqs8.points))
        assert not verdict
        assert verdict.reason == "triple not covered"
        assert set(verdict.witness) <= set(sqs8.blocks[-1])

    def test_short_block(self, sqs4):
        d = Design.from_blocks([sqs4.blocks[0][:3]], sqs4.points)
        assert verify_sqs(d).reason == "block of size 3"

    def test_triple_guard(self, sqs8, monkeypatch):
        monkeypatch.setattr(steiner, "MAX_TRIPLES", 10)
        with pytest.raises(TooManyTriples):
            verify_sqs(sqs8)

    def test_certify_rejects(self, sqs8):
        with pytest.raises(NotAnSQS):
            certify(Design.from_blocks(sqs8.blocks[:-1], sqs8.points))

    def test_design_stats(self, sqs10):
        stats = design_stats(sqs10)
        assert stats.replication_min == stats.replication_max == 12
        assert stats.pair_min == stats.pair_max == 4
        assert stats.is_sqs_regular()

    def test_design_stats_irregular(self, sqs8):
        assert not design_stats(Design.from_blocks(sqs8.blocks[:-1], sqs8.points)).is_sqs_regular()


class TestDifferences:
    def test_diff_list(self):
        assert diff_list(residues(0, 1, 2, 5), 25) == (1, 1, 3)
        assert diff_list(residues(0, 1, 2, 3), 7) == (1, 1, 1)
        assert diff_list(residues(0, 20, 2, 5), 25) == (5, 7, 3)

    def test_diff_list_rejects_inf(self):
        with pytest.raises(InfinityInBlock):
            diff_list(residues(0, 11, 22, "inf"), 33)

    def test_sqs26_condition(self):
        report = check_difference_condition(load_table("sqs26"))
        assert report.ok, report.reason
        assert report.contributors[1].count(4) == 2
        assert {13, 25} <= set(report.contributors[5])
        assert report.orbit_total == report.expected_total == 650
        assert report.infinity_blocks == 4

    @pytest.mark.parametrize("name", ["sqs34", "sqs38"])
    def test_other_tables(self, name):
        assert check_difference_condition(load_table(name))

    def test_dropped_base_block(self):
        t = load_table("sqs26")
        t = BaseBlockTable(t.name, t.group_order, t.has_infinity, t.base_blocks[:-1])
        report = check_difference_condition(t)
        assert not report
        assert "625 blocks" in report.reason

    def test_empty_table(self):
        report = check_difference_condition(BaseBlockTable("empty", 25, True, ()))
        assert not report
        assert set(report.counts.values()) == {0}
        assert report.missing == tuple(range(1, 13))


class TestAdjacency:
    def test_tables_repeat_every_pair(self, sqs26):
        assert check_repeated_adjacent_pairs(sqs26)
        assert check_repeated_adjacent_pairs(sqs_from_table("sqs38"))

    def test_single_block(self, sqs4):
        verdict = check_repeated_adjacent_pairs(sqs4)
        assert not verdict
        assert verdict.occurrences == 1

    def test_sqs14_does_not(self):
        assert not check_repeated_adjacent_pairs(sqs14())


class TestBlockRepair:
    def test_doubled_lift(self, sqs8):
        """(1_0,2_0,3_0,4_0): first half from (1_0,2_0,3_1,4_1), second from (1_1,2_1,3_0,4_0)."""
        plan = plan_block_repair(sqs8, 0)
        assert plan.scheme == "double"
        assert [(r.helper, r.positions) for r in plan.reads] == [(1, (0, 1)), (6, (2, 3))]
        assert plan.skip_cost == 0
        assert plan.bandwidth == 4

    def test_doubled_pair_block(self, sqs8):
        failed = sqs8.blocks.index((lifted(1, 0), lifted(1, 1), lifted(2, 0), lifted(2, 1)))
        plan = plan_block_repair(sqs8, failed)
        helpers = [sqs8.blocks[r.helper] for r in plan.reads]
        assert helpers == [
            (lifted(1, 0), lifted(1, 1), lifted(3, 0), lifted(3, 1)),
            (lifted(2, 0), lifted(2, 1), lifted(3, 0), lifted(3, 1)),
        ]
        assert [r.positions for r in plan.reads] == [(0, 1), (0, 1)]

    @pytest.mark.parametrize("make", [
        lambda: triple_minus_two(steiner.sqs_trivial()),
        lambda: double(triple_minus_two(steiner.sqs_trivial())),
        lambda: triple_minus_two(double(steiner.sqs_trivial())),
    ])
    def test_explicit_schemes_cover_every_block(self, make):
        d = make()
        for failed in range(len(d.blocks)):
            plan = plan_block_repair(d, failed)
            assert plan.scheme == d.construction
            assert plan.locality == 2
            assert plan.skip_cost == 0
            assert sorted(plan.points_read(d), key=steiner.point_key) == \
                sorted(d.blocks[failed], key=steiner.point_key)

    def test_sqs14_search(self):
        d = sqs14()
        for failed in range(len(d.blocks)):
            plan = plan_block_repair(d, failed)
            assert plan.scheme == "search"
            assert plan.skip_cost == 0
            assert plan.locality == 2
            assert set(plan.points_read(d)) == set(d.blocks[failed])

    @pytest.mark.slow
    def test_sqs26_search(self, sqs26):
        for failed in range(len(sqs26.blocks)):
            assert plan_block_repair(sqs26, failed).skip_cost == 0

    def test_gapped_block(self, gapped_sqs8):
        plan = plan_block_repair(gapped_sqs8, 3, max_skip=None)
        assert plan.skip_cost == 2
        assert [(r.helper, r.positions) for r in plan.reads] == [(0, (0, 2)), (7, (0, 2))]
        with pytest.raises(NoZeroSkipPlan):
            plan_block_repair(gapped_sqs8, 10)
        plan = plan_block_repair(gapped_sqs8, 10, max_skip=None)
        assert plan.skip_cost == 2
        assert [(r.helper, r.positions) for r in plan.reads] == [(0, (1, 3)), (4, (1, 3))]

    def test_single_block_design(self, sqs4):
        with pytest.raises(NoZeroSkipPlan):
            plan_block_repair(sqs4, 0)

    def test_block_out_of_range(self, sqs8):
        with pytest.raises(ParameterOutOfRange):
            plan_block_repair(sqs8, 14)

    def test_plan_dump(self, sqs8):
        dumped = plan_block_repair(sqs8, 0).to_dict(sqs8)
        assert dumped["points"] == ["1_0", "2_0", "3_0", "4_0"]
        assert dumped["skip_cost"] == 0


class TestDescriptor:
    @pytest.mark.parametrize("make", [
        lambda: triple_minus_two(steiner.sqs_trivial()),
        lambda: sqs_from_table("sqs26"),
        lambda: sqs14(),
    ])
    def test_round_trip(self, make):
        d = make()
        again = Design.from_dict(d.to_dict())
        assert again.blocks == d.blocks
        assert again.points == d.points
        assert again.groups == d.groups
        assert again.certified

    def test_false_certificate(self, sqs8):
        data = sqs8.to_dict()
        data["blocks"] = data["blocks"][:-1]
        with pytest.raises(DescriptorError):
            Design.from_dict(data)

    def test_wrong_v(self, sqs8):
        data = sqs8.to_dict()
        data["v"] = 9
        with pytest.raises(DescriptorError):
            Design.from_dict(data)
