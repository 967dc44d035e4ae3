# skipless/fr_codes.py
"""
Fractional-repetition array codes built from ordered designs.

Node b stores the packets of its block's points, in block order, so a
design with N blocks of size 4 gives a (4 x N) array code over n = v
packets. An optional systematic MDS outer code turns a k-symbol file into
the n packets. Repair copies packets from helper nodes: no arithmetic.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from .errors import BlockSizeMismatch, DescriptorError, NoZeroSkipPlan, ParameterOutOfRange
from .finite_field import FieldSpec, as_ints, random_elements
from .repair_sim import ReadTrace, RepairMetrics, measure
from .steiner import BlockRepairPlan, Design, Finite, OrderedBlock, Point, plan_block_repair

logger = logging.getLogger(__name__)

# Config
PACKETS_PER_NODE = 4

Packet = Union[int, bytes]


@dataclass(frozen=True)
class PacketStore:
    """One packet per point: a field symbol, or a fixed-size byte chunk."""
    packets: Mapping[Point, Packet]
    chunk_size: Optional[int] = None
    length: Optional[int] = None

    def __getitem__(self, point: Point) -> Packet:
        return self.packets[point]

    def __contains__(self, point: Point) -> bool:
        return point in self.packets

    def __len__(self) -> int:
        return len(self.packets)

    def without(self, points: Sequence[Point]) -> "PacketStore":
        gone = set(points)
        kept = {p: x for p, x in self.packets.items() if p not in gone}
        return PacketStore(kept, self.chunk_size, self.length)

    @classmethod
    def from_bytes(cls, data: bytes, points: Sequence[Point], chunk_size: Optional[int] = None) -> "PacketStore":
        n = len(points)
        if n == 0:
            raise ParameterOutOfRange("need at least one point to hold packets")
        if chunk_size is None:
            chunk_size = max(1, math.ceil(len(data) / n))
        if chunk_size < 1 or len(data) > n * chunk_size:
            raise ParameterOutOfRange(f"{len(data)} bytes do not fit in {n} chunks of {chunk_size}")
        padded = bytes(data) + bytes(n * chunk_size - len(data))
        packets = {p: padded[j * chunk_size:(j + 1) * chunk_size] for j, p in enumerate(points)}
        return cls(packets, chunk_size, len(data))

    def to_bytes(self, points: Optional[Sequence[Point]] = None) -> bytes:
        if self.chunk_size is None:
            raise ParameterOutOfRange("store holds field symbols, not byte chunks")
        order = list(points) if points is not None else list(self.packets)
        joined = b"".join(self.packets[p] for p in order)
        return joined if self.length is None else joined[: self.length]


@dataclass(frozen=True, eq=False)
class FRCode:
    design: Design
    M: int = PACKETS_PER_NODE

    @property
    def n(self) -> int:
        return self.design.v

    @property
    def N(self) -> int:
        return len(self.design.blocks)

    @property
    def placement(self) -> Tuple[OrderedBlock, ...]:
        return self.design.blocks

    @property
    def points(self) -> Tuple[Point, ...]:
        return self.design.points

    def node_contents(self, store: PacketStore, node: int) -> List[Packet]:
        if not 0 <= node < self.N:
            raise ParameterOutOfRange(f"node {node} out of range for N={self.N}")
        return [store[p] for p in self.placement[node]]

    def replication(self) -> Dict[Point, int]:
        return {p: len(self.design.point_blocks.get(p, ())) for p in self.points}

    def materialize(self, store: PacketStore) -> List[List[Packet]]:
        """Column-major node contents, M rows by N columns."""
        return [[store[block[row]] for block in self.placement] for row in range(self.M)]

    def to_dict(self) -> dict:
        return {"kind": "fr-code", "n": self.n, "N": self.N, "M": self.M, "design": self.design.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "FRCode":
        try:
            code = to_array_code(Design.from_dict(data["design"]))
            claimed = (int(data["n"]), int(data["N"]), int(data["M"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DescriptorError(f"bad fr-code descriptor: {exc}") from exc
        if claimed != (code.n, code.N, code.M):
            raise DescriptorError(f"fr-code shape {claimed} does not match its design {(code.n, code.N, code.M)}")
        return code


def to_array_code(d: Design) -> FRCode:
    for idx, block in enumerate(d.blocks):
        if len(block) != PACKETS_PER_NODE:
            raise BlockSizeMismatch(f"block {idx} has {len(block)} points; nodes hold {PACKETS_PER_NODE} packets")
    code = FRCode(d)
    logger.debug("FR code from %s design: n=%d N=%d M=%d", d.construction, code.n, code.N, code.M)
    return code


# ---------------------------------------------------------------------------
# outer MDS code (systematic, evaluation at 0..n-1)

def _check_outer(n: int, k: int, spec: FieldSpec):
    if not 1 <= k <= n:
        raise ParameterOutOfRange(f"outer code needs 1 <= k <= n, got k={k} n={n}")
    if n > spec.order:
        raise ParameterOutOfRange(f"n={n} exceeds the {spec.order} elements of GF(2^{spec.w})")


def _interpolate(xs: Sequence[int], ys: Sequence[int], at: Sequence[int], spec: FieldSpec) -> np.ndarray:
    gf = spec.gf
    if len(xs) == 1:
        return np.full(len(at), int(ys[0]), dtype=np.int64)
    poly = galois.lagrange_poly(gf(list(xs)), gf(list(ys)))
    return as_ints(poly(gf(list(at))))


def outer_encode(file_symbols: Sequence[int], n: int, k: int, field: FieldSpec,
                 points: Optional[Sequence[Point]] = None) -> PacketStore:
    """Packet j is f(j) for the degree < k polynomial with f(j) = file_symbols[j], j < k."""
    _check_outer(n, k, field)
    if len(file_symbols) != k:
        raise ParameterOutOfRange(f"expected {k} file symbols, got {len(file_symbols)}")
    symbols = [field.check(s) for s in file_symbols]
    points = _packet_points(points, n)
    values = _interpolate(range(k), symbols, range(n), field)
    return PacketStore({p: int(x) for p, x in zip(points, values)})


def outer_decode(store: PacketStore, k: int, field: FieldSpec, points: Sequence[Point]) -> List[int]:
    """Rebuild the k file symbols from the first k surviving packets."""
    _check_outer(len(points), k, field)
    alive = [j for j, p in enumerate(points) if p in store][:k]
    if len(alive) < k:
        raise ParameterOutOfRange(f"only {len(alive)} packets survive, {k} needed")
    ys = [field.check(store[points[j]]) for j in alive]
    return [int(x) for x in _interpolate(alive, ys, range(k), field)]


def _packet_points(points: Optional[Sequence[Point]], n: int) -> Tuple[Point, ...]:
    if points is None:
        return tuple(Finite(j) for j in range(n))
    if len(points) != n:
        raise ParameterOutOfRange(f"{len(points)} points given for n={n} packets")
    return tuple(points)


def demo_store(code: FRCode, field: FieldSpec, seed: int, k_outer: Optional[int] = None) -> Tuple[PacketStore, List[int]]:
    """Seeded random file pushed through the outer code onto the code's points."""
    k = k_outer if k_outer is not None else math.ceil(code.n / 2)
    rng = np.random.default_rng(seed)
    file_symbols = [int(x) for x in random_elements(field, k, rng)]
    return outer_encode(file_symbols, code.n, k, field, code.points), file_symbols


# ---------------------------------------------------------------------------
# repair by transfer

def repair_node(code: FRCode, store: PacketStore, failed: int,
                max_skip: Optional[int] = 0) -> Tuple[List[Packet], RepairMetrics]:
    """Copy the failed node's packets out of at most two helper nodes."""
    packets, metrics, _ = repair_node_with_plan(code, store, failed, max_skip)
    return packets, metrics


def repair_node_with_plan(code: FRCode, store: PacketStore, failed: int,
                          max_skip: Optional[int] = 0) -> Tuple[List[Packet], RepairMetrics, BlockRepairPlan]:
    if not 0 <= failed < code.N:
        raise ParameterOutOfRange(f"node {failed} out of range for N={code.N}")
    plan = plan_block_repair(code.design, failed, max_skip=max_skip)

    fetched: Dict[Point, Packet] = {}
    for read in plan.reads:
        helper_packets = code.node_contents(store, read.helper)
        helper_block = code.placement[read.helper]
        for pos in read.positions:
            fetched[helper_block[pos]] = helper_packets[pos]

    lost = code.placement[failed]
    if set(fetched) != set(lost):
        raise NoZeroSkipPlan(f"plan for node {failed} fetched {len(fetched)} packets that do not match its block")
    metrics = measure(ReadTrace.from_block_plan(plan, code.M))
    logger.debug("node %d repaired from %s, skip %d", failed, [r.helper for r in plan.reads], metrics.skip_cost)
    return [fetched[p] for p in lost], metrics, plan
