# skipless/steiner.py
"""
Steiner quadruple systems with ordered blocks.

Each block is an ordered 4-tuple of points; the order is the packet order
on the storage node built from that block, so it decides which helper
reads are contiguous. Constructions here keep the exact orderings that
give locality-2, zero-skip block repair:

  double            SQS(v) -> SQS(2v) on V x {0,1}
  triple_minus_two  SQS(v) -> SQS(3v-2) on {inf} u [v-1] x {0,1,2}
  develop           cyclic development of a base-block table over Z_g (u {inf})
  sqs14             the embedded 91-block SQS(14)

build_sqs(v) walks the closure of these from SQS(4) and the tables.
"""
from __future__ import annotations

import itertools
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field as dc_field, replace
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .data_loader import read_asset
from .errors import (
    DescriptorError,
    DuplicateBlock,
    InfinityInBlock,
    NoZeroSkipPlan,
    NotAnSQS,
    ParameterOutOfRange,
    TooManyTriples,
    UnsupportedOrder,
)

logger = logging.getLogger(__name__)

# Config
CHECKER_VERSION = 1
MAX_TRIPLES = 10 ** 7
DEFAULT_SQS_BOUND = 100
TABLE_ORDERS = {14: "sqs14", 26: "sqs26", 34: "sqs34", 38: "sqs38"}
CLOSURE_RESIDUES_36 = (4, 8, 10, 16, 20, 22, 28, 32)


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True)
class Finite:
    label: Union[int, str]


@dataclass(frozen=True)
class Residue:
    value: int


@dataclass(frozen=True)
class Infinity:
    pass


@dataclass(frozen=True)
class Pair:
    base: "Point"
    level: int


Point = Union[Finite, Residue, Infinity, Pair]
OrderedBlock = Tuple[Point, ...]
INF = Infinity()


def point_key(p: Point) -> tuple:
    if isinstance(p, Finite):
        return (0, (0, p.label) if isinstance(p.label, int) else (1, str(p.label)))
    if isinstance(p, Residue):
        return (1, p.value)
    if isinstance(p, Pair):
        return (2, point_key(p.base), p.level)
    return (3,)


def point_label(p: Point) -> str:
    if isinstance(p, Infinity):
        return "inf"
    if isinstance(p, Pair):
        return f"{point_label(p.base)}_{p.level}"
    if isinstance(p, Residue):
        return str(p.value)
    return str(p.label)


def block_label(block: Sequence[Point]) -> str:
    return "(" + ",".join(point_label(p) for p in block) + ")"


def encode_point(p: Point):
    if isinstance(p, Infinity):
        return "inf"
    if isinstance(p, Pair):
        return [encode_point(p.base), p.level]
    if isinstance(p, Residue):
        return p.value
    return p.label


def decode_point(raw, root_tag: str) -> Point:
    if raw == "inf":
        return INF
    if isinstance(raw, list):
        if len(raw) != 2:
            raise DescriptorError(f"bad lifted point {raw!r}")
        return Pair(decode_point(raw[0], root_tag), int(raw[1]))
    if root_tag == "residue":
        return Residue(int(raw))
    return Finite(raw)


def _leaf(p: Point) -> Point:
    while isinstance(p, Pair):
        p = p.base
    return p


# ---------------------------------------------------------------------------
# designs

@dataclass(frozen=True, eq=False)
class Design:
    points: Tuple[Point, ...]
    blocks: Tuple[OrderedBlock, ...]
    groups: Tuple[str, ...] = ()
    construction: str = "blocks"
    trace: Tuple[str, ...] = ()
    table: Optional[str] = None
    certified: bool = False

    @classmethod
    def from_blocks(cls, blocks: Iterable[Sequence[Point]], points: Optional[Iterable[Point]] = None,
                    **kwargs) -> "Design":
        blocks = tuple(tuple(b) for b in blocks)
        for b in blocks:
            if len(set(b)) != len(b):
                raise ParameterOutOfRange(f"block {block_label(b)} repeats a point")
        if points is None:
            points = {p for b in blocks for p in b}
        return cls(tuple(sorted(set(points), key=point_key)), blocks, **kwargs)

    @property
    def v(self) -> int:
        return len(self.points)

    @property
    def point_tag(self) -> str:
        if any(isinstance(p, Pair) for p in self.points):
            return "lifted"
        if any(isinstance(p, Residue) for p in self.points):
            return "residue"
        return "finite"

    @property
    def root_tag(self) -> str:
        return "residue" if any(isinstance(_leaf(p), Residue) for p in self.points) else "finite"

    @cached_property
    def point_blocks(self) -> Dict[Point, Tuple[int, ...]]:
        index: Dict[Point, List[int]] = defaultdict(list)
        for i, b in enumerate(self.blocks):
            for p in b:
                index[p].append(i)
        return {p: tuple(ids) for p, ids in index.items()}

    @cached_property
    def block_index(self) -> Dict[OrderedBlock, int]:
        """Ordered block -> first index holding exactly that tuple."""
        index: Dict[OrderedBlock, int] = {}
        for i, b in enumerate(self.blocks):
            index.setdefault(b, i)
        return index

    @cached_property
    def group_members(self) -> Dict[str, Tuple[int, ...]]:
        members: Dict[str, List[int]] = defaultdict(list)
        for i, g in enumerate(self.groups):
            members[g].append(i)
        return {g: tuple(ids) for g, ids in members.items()}

    @cached_property
    def lifted_bases(self) -> Tuple[Point, ...]:
        return tuple(sorted({p.base for p in self.points if isinstance(p, Pair)}, key=point_key))

    def to_dict(self) -> dict:
        return {
            "kind": "design",
            "v": self.v,
            "point_tag": self.point_tag,
            "root_tag": self.root_tag,
            "points": [encode_point(p) for p in self.points],
            "blocks": [[encode_point(p) for p in b] for b in self.blocks],
            "groups": list(self.groups) if self.groups else None,
            "construction": self.construction,
            "trace": list(self.trace),
            "table": self.table,
            "certificate": {"verified": self.certified, "checker_version": CHECKER_VERSION},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Design":
        try:
            root_tag = data.get("root_tag") or data["point_tag"]
            blocks = [[decode_point(p, root_tag) for p in b] for b in data["blocks"]]
            points = [decode_point(p, root_tag) for p in data["points"]] if data.get("points") else None
            groups = tuple(data.get("groups") or ())
            certificate = data.get("certificate") or {}
            design = cls.from_blocks(
                blocks, points,
                groups=groups,
                construction=data.get("construction", "blocks"),
                trace=tuple(data.get("trace") or ()),
                table=data.get("table"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DescriptorError(f"bad design descriptor: {exc}") from exc
        if groups and len(groups) != len(design.blocks):
            raise DescriptorError("group labels do not line up with blocks")
        if int(data.get("v", design.v)) != design.v:
            raise DescriptorError(f"descriptor claims v={data.get('v')} but lists {design.v} points")
        if certificate.get("verified"):
            try:
                return certify(design)
            except NotAnSQS as exc:
                raise DescriptorError(f"descriptor claims an SQS certificate it does not hold: {exc}") from exc
        return design


def sqs_block_count(v: int) -> int:
    return v * (v - 1) * (v - 2) // 24


# ---------------------------------------------------------------------------
# verifiers

@dataclass(frozen=True)
class SqsVerdict:
    ok: bool
    witness: Optional[Tuple[Point, ...]] = None
    reason: str = ""
    triples_checked: int = 0

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"SQS verified ({self.triples_checked} triples)"
        where = f" {block_label(self.witness)}" if self.witness else ""
        return f"{self.reason}{where}"


def verify_sqs(d: Design) -> SqsVerdict:
    """Every 3-subset of the point set in exactly one block."""
    total = math.comb(d.v, 3)
    if total > MAX_TRIPLES:
        raise TooManyTriples(f"C({d.v},3) = {total} exceeds the {MAX_TRIPLES} triple guard")
    known = set(d.points)
    covered: Counter = Counter()
    for b in d.blocks:
        if len(b) != 4:
            return SqsVerdict(False, tuple(b), f"block of size {len(b)}")
        stray = [p for p in b if p not in known]
        if stray:
            return SqsVerdict(False, (stray[0],), "point outside the design")
        for triple in itertools.combinations(b, 3):
            key = frozenset(triple)
            covered[key] += 1
            if covered[key] > 1:
                return SqsVerdict(False, tuple(sorted(triple, key=point_key)), "triple covered twice",
                                  len(covered))
    if len(covered) != total:
        for triple in itertools.combinations(d.points, 3):
            if frozenset(triple) not in covered:
                return SqsVerdict(False, triple, "triple not covered", total)
    return SqsVerdict(True, None, "", total)


def certify(d: Design) -> Design:
    verdict = verify_sqs(d)
    if not verdict:
        raise NotAnSQS(f"{d.construction} design on {d.v} points is not an SQS: {verdict.describe()}")
    return replace(d, certified=True)


def _require_sqs(d: Design) -> Design:
    return d if d.certified else certify(d)


@dataclass(frozen=True)
class AdjacencyVerdict:
    ok: bool
    witness: Optional[Tuple[Point, Point]] = None
    occurrences: int = 0

    def __bool__(self) -> bool:
        return self.ok


def adjacent_pair_counts(d: Design) -> Dict[FrozenSet[Point], int]:
    """Unordered pair -> number of distinct blocks holding it in adjacent positions."""
    holders: Dict[FrozenSet[Point], set] = defaultdict(set)
    for i, b in enumerate(d.blocks):
        for x, y in zip(b, b[1:]):
            holders[frozenset((x, y))].add(i)
    return {pair: len(ids) for pair, ids in holders.items()}


def check_repeated_adjacent_pairs(d: Design) -> AdjacencyVerdict:
    counts = adjacent_pair_counts(d)
    for x, y in itertools.combinations(d.points, 2):
        seen = counts.get(frozenset((x, y)), 0)
        if seen < 2:
            return AdjacencyVerdict(False, (x, y), seen)
    return AdjacencyVerdict(True)


@dataclass(frozen=True)
class DesignStats:
    v: int
    blocks: int
    replication_min: int
    replication_max: int
    pair_min: int
    pair_max: int

    def is_sqs_regular(self) -> bool:
        return (self.replication_min == self.replication_max == (self.v - 1) * (self.v - 2) // 6
                and self.pair_min == self.pair_max == (self.v - 2) // 2)


def design_stats(d: Design) -> DesignStats:
    replication = [len(d.point_blocks.get(p, ())) for p in d.points]
    pairs: Counter = Counter()
    for b in d.blocks:
        for x, y in itertools.combinations(b, 2):
            pairs[frozenset((x, y))] += 1
    multiplicities = [pairs.get(frozenset(xy), 0) for xy in itertools.combinations(d.points, 2)]
    return DesignStats(
        v=d.v,
        blocks=len(d.blocks),
        replication_min=min(replication, default=0),
        replication_max=max(replication, default=0),
        pair_min=min(multiplicities, default=0),
        pair_max=max(multiplicities, default=0),
    )


# ---------------------------------------------------------------------------
# constructions

def sqs_trivial() -> Design:
    points = tuple(Finite(i) for i in range(1, 5))
    return Design(points, (points,), construction="trivial", trace=("sqs(4): trivial",), certified=True)


def _b2_double(x: Point, y: Point) -> OrderedBlock:
    if point_key(x) > point_key(y):
        x, y = y, x
    return (Pair(x, 0), Pair(x, 1), Pair(y, 0), Pair(y, 1))


def double(d: Design) -> Design:
    """SQS(v) -> SQS(2v): 8|B| parity-constrained lifts plus one block per point pair."""
    d = _require_sqs(d)
    lifts: List[OrderedBlock] = []
    for b in d.blocks:
        for levels in itertools.product((0, 1), repeat=3):
            last = sum(levels) % 2
            lifts.append(tuple(Pair(p, i) for p, i in zip(b, levels + (last,))))
    pairs = [_b2_double(x, y) for x, y in itertools.combinations(d.points, 2)]
    doubled = Design.from_blocks(
        lifts + pairs,
        (Pair(p, i) for p in d.points for i in (0, 1)),
        groups=("B1",) * len(lifts) + ("B2",) * len(pairs),
        construction="double",
        trace=d.trace + (f"sqs({2 * d.v}): double sqs({d.v})",),
    )
    logger.info("doubled SQS(%d) -> SQS(%d): %d + %d blocks", d.v, doubled.v, len(lifts), len(pairs))
    return certify(doubled)


def _level(v: Point, i: int) -> Pair:
    return Pair(v, i % 3)


def _infinity_of(d: Design) -> Point:
    return INF if INF in d.points else d.points[-1]


def triple_minus_two(d: Design) -> Design:
    """SQS(v) -> SQS(3v-2) on {inf} and three levels of the other v-1 points."""
    d = _require_sqs(d)
    inf = _infinity_of(d)
    bases = tuple(p for p in d.points if p != inf)
    rank = {p: i for i, p in enumerate(bases)}
    P = _level

    groups: Dict[str, List[OrderedBlock]] = {g: [] for g in ("B1", "B2_1", "B2_2", "B3", "B4", "B5")}
    for b in d.blocks:
        if inf not in b:
            for i1, i2, i3 in itertools.product(range(3), repeat=3):
                levels = (i1, i2, i3, -(i1 + i2 + i3))
                groups["B1"].append(tuple(P(p, i) for p, i in zip(b, levels)))
            continue
        v1, v2, v3 = sorted((p for p in b if p != inf), key=rank.__getitem__)
        for i in range(3):
            groups["B2_1"].append((P(v1, i), INF, P(v3, i), P(v2, i)))
        for i1, i2 in itertools.product(range(3), repeat=2):
            if i1 != i2:
                groups["B2_2"].append((P(v1, i1), INF, P(v2, i2), P(v3, -(i1 + i2))))
        for a, bb, c in ((v1, v2, v3), (v2, v3, v1), (v3, v1, v2)):
            for i in range(3):
                groups["B3"].append((P(a, i), P(bb, i + 1), P(c, i), P(bb, i + 2)))
    for x, y in itertools.combinations(bases, 2):
        for i in range(3):
            groups["B4"].append((P(x, i), P(x, i + 1), P(y, i + 1), P(y, i)))
    for x in bases:
        groups["B5"].append((INF, P(x, 0), P(x, 1), P(x, 2)))

    blocks: List[OrderedBlock] = []
    labels: List[str] = []
    for g, members in groups.items():
        blocks.extend(members)
        labels.extend([g] * len(members))
    tripled = Design.from_blocks(
        blocks,
        [INF] + [P(p, i) for p in bases for i in range(3)],
        groups=tuple(labels),
        construction="triple",
        trace=d.trace + (f"sqs({3 * d.v - 2}): triple_minus_two sqs({d.v})",),
    )
    logger.info("tripled SQS(%d) -> SQS(%d): group sizes %s", d.v, tripled.v,
                {g: len(m) for g, m in groups.items()})
    return certify(tripled)


# ---------------------------------------------------------------------------
# base-block tables

@dataclass(frozen=True)
class BaseBlockTable:
    name: str
    group_order: int
    has_infinity: bool
    base_blocks: Tuple[OrderedBlock, ...]
    short_orbits: Dict[int, int] = dc_field(default_factory=dict)

    def __post_init__(self):
        g = self.group_order
        if g < 1:
            raise DescriptorError(f"table {self.name}: group order must be positive")
        for idx, orbit in self.short_orbits.items():
            if not 0 <= idx < len(self.base_blocks):
                raise DescriptorError(f"table {self.name}: short orbit mark on missing block {idx}")
            if orbit < 1 or g % orbit:
                raise DescriptorError(f"table {self.name}: short orbit {orbit} does not divide {g}")
        for b in self.base_blocks:
            for p in b:
                if isinstance(p, Infinity):
                    if not self.has_infinity:
                        raise DescriptorError(f"table {self.name}: inf used without has_infinity")
                elif not isinstance(p, Residue) or not 0 <= p.value < g:
                    raise DescriptorError(f"table {self.name}: point {p!r} is not a residue mod {g}")

    @property
    def order(self) -> int:
        return self.group_order + (1 if self.has_infinity else 0)

    def orbit(self, index: int) -> int:
        return self.short_orbits.get(index, self.group_order)

    @classmethod
    def from_asset(cls, asset: dict) -> "BaseBlockTable":
        try:
            table = cls(
                name=str(asset["name"]),
                group_order=int(asset["group_order"]),
                has_infinity=bool(asset["has_infinity"]),
                base_blocks=tuple(tuple(decode_point(p, "residue") for p in b) for b in asset["base_blocks"]),
                short_orbits={int(k): int(v) for k, v in (asset.get("short_orbits") or {}).items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DescriptorError(f"bad base-block table: {exc}") from exc
        if "order" in asset and int(asset["order"]) != table.order:
            raise DescriptorError(f"table {table.name}: order {asset['order']} does not match its group")
        return table


def load_table(name: str) -> BaseBlockTable:
    return BaseBlockTable.from_asset(read_asset(name))


def _shift(block: OrderedBlock, i: int, g: int) -> OrderedBlock:
    return tuple(p if isinstance(p, Infinity) else Residue((p.value + i) % g) for p in block)


def develop(t: BaseBlockTable) -> Design:
    """Shift every base block by its orbit; inf stays fixed."""
    g = t.group_order
    seen: Dict[FrozenSet[Point], int] = {}
    blocks: List[OrderedBlock] = []
    for idx, base in enumerate(t.base_blocks):
        orbit = t.orbit(idx)
        own: set = set()
        for i in range(g):
            shifted = _shift(base, i, g)
            key = frozenset(shifted)
            if key in own:
                if orbit == g:
                    raise DuplicateBlock(f"table {t.name}: base block {idx} repeats {block_label(shifted)} "
                                         "within its own orbit")
                continue
            if key in seen:
                raise DuplicateBlock(f"table {t.name}: {block_label(shifted)} from base block {idx} "
                                     f"already developed from base block {seen[key]}")
            own.add(key)
            seen[key] = idx
            blocks.append(shifted)
        if len(own) != orbit:
            raise DescriptorError(f"table {t.name}: base block {idx} develops to {len(own)} blocks, "
                                  f"marked orbit {orbit}")
    points = [Residue(x) for x in range(g)] + ([INF] if t.has_infinity else [])
    logger.debug("developed table %s: %d base blocks -> %d blocks", t.name, len(t.base_blocks), len(blocks))
    return Design.from_blocks(blocks, points, construction="table",
                              trace=(f"sqs({t.order}): table {t.name}",), table=t.name)


def sqs_from_table(name: str) -> Design:
    return certify(develop(load_table(name)))


def sqs14() -> Design:
    asset = read_asset("sqs14")
    try:
        points = [Finite(s) for s in asset["symbols"]]
        blocks = [[Finite(s) for s in b] for b in asset["blocks"]]
    except (KeyError, TypeError) as exc:
        raise DescriptorError(f"bad sqs14 asset: {exc}") from exc
    design = Design.from_blocks(blocks, points, construction="sqs14", trace=("sqs(14): table sqs14",),
                                table="sqs14")
    return certify(design)


# ---------------------------------------------------------------------------
# difference lists

def residue_distance(x: int, g: int) -> int:
    return min(x % g, -x % g)


def diff_list(block: Sequence[Point], g: int) -> Tuple[int, int, int]:
    if any(isinstance(p, Infinity) for p in block):
        raise InfinityInBlock(f"{block_label(block)} contains inf")
    values = [p.value for p in block]
    return tuple(residue_distance(y - x, g) for x, y in zip(values, values[1:]))


@dataclass(frozen=True)
class DifferenceReport:
    ok: bool
    counts: Dict[int, int]
    contributors: Dict[int, Tuple[int, ...]]
    infinity_blocks: int
    orbit_total: int
    expected_total: int
    missing: Tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_difference_condition(t: BaseBlockTable) -> DifferenceReport:
    """
    Sufficient condition for repeated adjacent pairs in develop(t).
    Without inf: every difference 0 < i < g/2 at least twice, g/2 (if integral) at least once.
    With inf: every 0 < i <= g/2 at least twice and inf in at least two base blocks;
    only the finite adjacent pairs of an inf-block count.
    Short-orbit blocks are left out, their shifts do not cover the group.
    """
    g = t.group_order
    counts: Counter = Counter()
    contributors: Dict[int, List[int]] = defaultdict(list)
    infinity_blocks = 0
    for idx, base in enumerate(t.base_blocks):
        if t.orbit(idx) != g:
            continue
        if any(isinstance(p, Infinity) for p in base):
            infinity_blocks += 1
        for x, y in zip(base, base[1:]):
            if isinstance(x, Infinity) or isinstance(y, Infinity):
                continue
            diff = residue_distance(y.value - x.value, g)
            counts[diff] += 1
            contributors[diff].append(idx)

    required: Dict[int, int] = {}
    if t.has_infinity:
        required = {i: 2 for i in range(1, g // 2 + 1)}
    else:
        required = {i: 2 for i in range(1, (g + 1) // 2)}
        if g % 2 == 0:
            required[g // 2] = 1
    missing = tuple(i for i, need in required.items() if counts[i] < need)

    orbit_total = sum(t.orbit(idx) for idx in range(len(t.base_blocks)))
    expected_total = sqs_block_count(t.order)
    reasons = []
    if missing:
        reasons.append(f"differences below the required count: {list(missing)}")
    if t.has_infinity and infinity_blocks < 2:
        reasons.append(f"inf appears in {infinity_blocks} full-orbit base blocks")
    if orbit_total != expected_total:
        reasons.append(f"orbits give {orbit_total} blocks, an SQS({t.order}) has {expected_total}")
    return DifferenceReport(
        ok=not reasons,
        counts={i: counts[i] for i in sorted(set(counts) | set(required))},
        contributors={i: tuple(ids) for i, ids in sorted(contributors.items())},
        infinity_blocks=infinity_blocks,
        orbit_total=orbit_total,
        expected_total=expected_total,
        missing=missing,
        reason="; ".join(reasons),
    )


# ---------------------------------------------------------------------------
# order dispatch

def is_admissible(v: int) -> bool:
    return v >= 4 and v % 6 in (2, 4)


def in_closure_set(v: int) -> bool:
    return v in TABLE_ORDERS or (v >= 4 and v % 36 in CLOSURE_RESIDUES_36)


@lru_cache(maxsize=None)
def _derivation(v: int) -> Optional[Tuple[str, Union[int, str]]]:
    """How build_sqs reaches v, or None. Doubling wins over 3v-2 when both apply."""
    if v == 4:
        return ("trivial", 4)
    if v in TABLE_ORDERS:
        return ("table", TABLE_ORDERS[v])
    if v % 2 == 0 and v // 2 >= 4 and _derivation(v // 2):
        return ("double", v // 2)
    if (v + 2) % 3 == 0 and (v + 2) // 3 >= 4 and _derivation((v + 2) // 3):
        return ("triple", (v + 2) // 3)
    return None


def closure_orders(bound: int = DEFAULT_SQS_BOUND) -> List[int]:
    return [v for v in range(4, bound + 1) if _derivation(v)]


def build_sqs(v: int, bound: int = DEFAULT_SQS_BOUND) -> Design:
    if v > bound:
        raise UnsupportedOrder(f"order {v} exceeds the configured bound {bound}")
    if not is_admissible(v):
        raise UnsupportedOrder(f"unsupported order {v}: an SQS needs v = 2 or 4 (mod 6)")
    step = _derivation(v)
    if step is None:
        raise UnsupportedOrder(f"unsupported order {v}: not reachable from SQS(4) and the embedded tables")
    how, source = step
    if how == "trivial":
        design = sqs_trivial()
    elif how == "table":
        design = sqs14() if source == "sqs14" else sqs_from_table(source)
    elif how == "double":
        design = double(build_sqs(source, bound))
    else:
        design = triple_minus_two(build_sqs(source, bound))
    logger.info("SQS(%d) via %s", v, " <- ".join(reversed(design.trace)))
    return design


# ---------------------------------------------------------------------------
# block repair

@dataclass(frozen=True)
class BlockRead:
    helper: int
    positions: Tuple[int, ...]

    @property
    def start(self) -> int:
        return self.positions[0]

    @property
    def skip(self) -> int:
        return self.positions[-1] - self.positions[0] - (len(self.positions) - 1)


@dataclass(frozen=True)
class BlockRepairPlan:
    failed: int
    reads: Tuple[BlockRead, ...]
    scheme: str

    @property
    def locality(self) -> int:
        return len(self.reads)

    @property
    def bandwidth(self) -> int:
        return sum(len(r.positions) for r in self.reads)

    @property
    def skip_cost(self) -> int:
        return sum(r.skip for r in self.reads)

    def points_read(self, d: Design) -> List[Point]:
        return [d.blocks[r.helper][pos] for r in self.reads for pos in r.positions]

    def to_dict(self, d: Optional[Design] = None) -> dict:
        out = {
            "kind": "repair-plan",
            "failed": self.failed,
            "scheme": self.scheme,
            "reads": [{"helper": r.helper, "positions": list(r.positions)} for r in self.reads],
            "locality": self.locality,
            "bandwidth": self.bandwidth,
            "skip_cost": self.skip_cost,
        }
        if d is not None:
            out["points"] = [point_label(p) for p in self.points_read(d)]
        return out


def _locate(d: Design, helper: OrderedBlock, needed: FrozenSet[Point]) -> BlockRead:
    idx = d.block_index[helper]
    width = len(needed)
    for start in range(len(helper) - width + 1):
        if frozenset(helper[start:start + width]) == needed:
            return BlockRead(idx, tuple(range(start, start + width)))
    raise KeyError(f"{block_label(helper)} does not hold {sorted(map(point_label, needed))} contiguously")


def _double_helpers(d: Design, failed: int) -> List[OrderedBlock]:
    block = d.blocks[failed]
    if d.groups[failed] == "B1":
        flip_tail = block[:2] + tuple(Pair(p.base, 1 - p.level) for p in block[2:])
        flip_head = tuple(Pair(p.base, 1 - p.level) for p in block[:2]) + block[2:]
        return [flip_tail, flip_head]
    v1, v2 = block[0].base, block[2].base
    v3 = next(x for x in d.lifted_bases if x not in (v1, v2))
    return [_b2_double(v1, v3), _b2_double(v2, v3)]


def _triple_helpers(d: Design, failed: int) -> List[OrderedBlock]:
    block = d.blocks[failed]
    group = d.groups[failed]
    bases = d.lifted_bases
    rank = {p: i for i, p in enumerate(bases)}
    P = _level

    def b4(x: Point, y: Point, i: int) -> OrderedBlock:
        if rank[x] > rank[y]:
            x, y = y, x
        return (P(x, i), P(x, i + 1), P(y, i + 1), P(y, i))

    if group == "B1":
        (v0, l0), (v1, l1), (v2, l2), (v3, l3) = ((p.base, p.level) for p in block)
        return [(P(v0, l0), P(v1, l1), P(v2, l2 + 1), P(v3, l3 + 2)),
                (P(v0, l0 + 1), P(v1, l1 + 2), P(v2, l2), P(v3, l3))]
    if group == "B2_1":
        v1, v3, v2, i = block[0].base, block[2].base, block[3].base, block[0].level
        return [(P(v1, i), INF, P(v2, i + 1), P(v3, i + 2)),
                (P(v2, i - 1), P(v2, i), P(v3, i), P(v3, i - 1))]
    if group == "B2_2":
        v1, i1 = block[0].base, block[0].level
        v2, i2 = block[2].base, block[2].level
        v3, i3 = block[3].base, block[3].level
        first = (P(v1, i1), INF, P(v3, i1), P(v2, i1))
        if (i3 - i2) % 3 == 1:
            second = (P(v1, i2 + 1), P(v2, i2 + 2), P(v3, i2 + 1), P(v2, i2))
        else:
            second = (P(v1, i2 + 2), P(v2, i2), P(v3, i2 + 2), P(v2, i2 + 1))
        return [first, second]
    if group == "B3":
        a, b, c, i = block[0].base, block[1].base, block[2].base, block[0].level
        return [(P(c, i + 1), P(a, i + 2), P(b, i + 1), P(a, i)),
                (P(b, i + 2), P(c, i), P(a, i + 2), P(c, i + 1))]
    if group == "B4":
        x, y, i = block[0].base, block[2].base, block[0].level
        # lowest-ranked third point: (0,1) -> 2, (N-2,N-1) -> 0
        u = next(p for p in bases if p not in (x, y))
        return [b4(x, u, i), b4(y, u, i)]
    if group == "B5":
        v = block[1].base
        n = len(bases)
        u = bases[rank[v] + 1] if rank[v] < n - 1 else bases[rank[v] - 1]
        a1, a2 = _infinity_partners(d, v, rank)
        if rank[v] < rank[a1]:
            first = (P(v, 0), INF, P(a2, 0), P(a1, 0))
        elif rank[v] < rank[a2]:
            first = (P(a1, 1), INF, P(v, 0), P(a2, 2))
        else:
            first = (P(a1, 0), INF, P(v, 0), P(a2, 0))
        return [first, b4(v, u, 1)]
    raise KeyError(f"no explicit scheme for group {group!r}")


def _infinity_partners(d: Design, v: Point, rank: Dict[Point, int]) -> Tuple[Point, Point]:
    """The other two finite points of the first inf-block through v, in rank order."""
    target = Pair(v, 0)
    for idx in d.group_members.get("B2_1", ()):
        b = d.blocks[idx]
        if b[0].level == 0 and target in b:
            others = [p.base for p in (b[0], b[2], b[3]) if p.base != v]
            a1, a2 = sorted(others, key=rank.__getitem__)
            return a1, a2
    raise KeyError(f"no inf-block through {point_label(v)}")


_EXPLICIT_SCHEMES = {"double": _double_helpers, "triple": _triple_helpers}


def _explicit_plan(d: Design, failed: int) -> Optional[BlockRepairPlan]:
    helpers_for = _EXPLICIT_SCHEMES.get(d.construction)
    if helpers_for is None or len(d.groups) != len(d.blocks):
        return None
    block = d.blocks[failed]
    halves = (frozenset(block[:2]), frozenset(block[2:]))
    try:
        helpers = helpers_for(d, failed)
        reads = tuple(_locate(d, h, half) for h, half in zip(helpers, halves))
    except (KeyError, StopIteration, AttributeError) as exc:
        logger.warning("%s scheme has no helpers for block %d %s (%s); falling back to search",
                       d.construction, failed, block_label(block), exc)
        return None
    if any(r.helper == failed for r in reads) or reads[0].helper == reads[1].helper:
        logger.warning("%s scheme picked an invalid helper for block %d; falling back to search",
                       d.construction, failed)
        return None
    return BlockRepairPlan(failed, reads, d.construction)


def _read_candidates(d: Design, failed: int, target: FrozenSet[Point], max_skip: Optional[int]):
    """(point set, BlockRead) for every read of target points from another block within max_skip."""
    helpers = sorted({h for p in target for h in d.point_blocks.get(p, ())} - {failed})
    for h in helpers:
        block = d.blocks[h]
        inside = [pos for pos, p in enumerate(block) if p in target]
        if max_skip == 0:
            subsets = (tuple(range(s, e)) for s in range(len(block)) for e in range(s + 1, len(block) + 1))
            subsets = (s for s in subsets if all(block[pos] in target for pos in s))
        else:
            subsets = (c for r in range(1, len(inside) + 1) for c in itertools.combinations(inside, r))
        for positions in subsets:
            read = BlockRead(h, positions)
            if max_skip is None or read.skip <= max_skip:
                yield frozenset(block[pos] for pos in positions), read


def _search_plan(d: Design, failed: int, max_skip: Optional[int]) -> Optional[BlockRepairPlan]:
    block = d.blocks[failed]
    target = frozenset(block)
    by_points: Dict[FrozenSet[Point], List[BlockRead]] = defaultdict(list)
    for points, read in _read_candidates(d, failed, target, max_skip):
        by_points[points].append(read)

    best = None
    for points, reads in by_points.items():
        if points == target:
            for read in reads:
                key = (read.skip, 2, ((read.helper, read.start),))
                if best is None or key < best[0]:
                    best = (key, (read,))
            continue
        rest = target - points
        if len(points) < len(rest) or (len(points) == len(rest) and
                                       sorted(map(point_key, points)) > sorted(map(point_key, rest))):
            continue
        category = 0 if len(points) == 2 else 1
        for first in reads:
            for second in by_points.get(rest, ()):
                if second.helper == first.helper:
                    continue
                pair = tuple(sorted((first, second), key=lambda r: (r.helper, r.start)))
                key = (first.skip + second.skip, category, tuple((r.helper, r.start) for r in pair))
                if best is None or key < best[0]:
                    best = (key, pair)
    if best is None:
        return None
    return BlockRepairPlan(failed, best[1], "search")


def plan_block_repair(d: Design, failed: int, max_skip: Optional[int] = 0) -> BlockRepairPlan:
    """
    At most two helper reads whose points are exactly the failed block.

    Doubled and tripled designs use their construction's explicit scheme.
    Anything else, or an explicit scheme that does not check out, goes to an
    exhaustive search preferring the lowest total skip, then 2+2 over 3+1
    over a single read, then the lowest (helper, start) reads.
    max_skip bounds each read's skip (None: unbounded).
    """
    if not 0 <= failed < len(d.blocks):
        raise ParameterOutOfRange(f"block {failed} out of range for {len(d.blocks)} blocks")
    plan = _explicit_plan(d, failed)
    if plan is None:
        plan = _search_plan(d, failed, max_skip)
    if plan is None:
        bound = "zero-skip" if max_skip == 0 else (f"skip <= {max_skip}" if max_skip is not None else "any")
        raise NoZeroSkipPlan(f"no {bound} plan with at most two helpers for block {failed} "
                             f"{block_label(d.blocks[failed])}")
    return plan
