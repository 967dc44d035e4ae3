# skipless/zigzag.py
"""
Zigzag MDS array codes with zero-skip-cost systematic repair.

An (M x N, k) code stores M = 2^m rows in each of N columns: k systematic
columns a^(0..k-1) followed by parity columns p^(0..). Row x of parity j is
    p^(j)_x = sum_i alpha[x][i][j] * a^(i)_{x XOR v_i}
where (v_0, ..., v_{k-1}) is the parity pattern S_j.

Rows are indexed by lexicographic rank with the first coordinate as the most
significant bit, so the row sets U (first bit 0), L (first bit 1) and
L' (first two bits 01 or 10) are contiguous ranges.

Constructions:
  A         k = m+1, m+1 nonzero patterns, N = 2(m+1)
  B         k = m+1, ceil((m+1)/2) nonzero patterns
  C         any k >= 2, ceil(k/2) nonzero patterns
  BASELINE  k = m+1, S_1 = (0, e_1, ..., e_m); repairs skip rows
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import (
    CoefficientSearchExhausted,
    DescriptorError,
    EliminationFailed,
    ParameterOutOfRange,
    ShapeMismatch,
    SingularMatrix,
    TooManySubsets,
    UnsupportedFailure,
)
from .finite_field import FieldSpec, as_ints, gf_inv, gf_mul, mat_rank, mat_solve, random_elements

logger = logging.getLogger(__name__)

# Config
MIN_M, MAX_M = 2, 6
MIN_K, MAX_K = 2, 10
MAX_MDS_SUBSETS = 10 ** 6
DEFAULT_MAX_ATTEMPTS = 20
DECODE_ORACLE_SEED = 0


class Construction(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    BASELINE = "BASELINE"

    @classmethod
    def parse(cls, text: str) -> "Construction":
        try:
            return cls(str(text).upper())
        except ValueError:
            raise ParameterOutOfRange(f"unknown zigzag construction {text!r}") from None


# ---------------------------------------------------------------------------
# row indices and offset vectors

def unit_vector(i: int, m: int) -> int:
    """e_i: only coordinate i set (coordinates are 1-based, coordinate 1 is the MSB)."""
    return 1 << (m - i)


def prefix_vector(i: int, m: int) -> int:
    """d_i: the first i coordinates set."""
    return ((1 << i) - 1) << (m - i)


@dataclass(frozen=True)
class RowIndex:
    m: int
    rank: int

    def __post_init__(self):
        if not 0 <= self.rank < (1 << self.m):
            raise ParameterOutOfRange(f"row rank {self.rank} out of range for m={self.m}")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "RowIndex":
        rank = 0
        for bit in bits:
            rank = (rank << 1) | (1 if bit else 0)
        return cls(len(bits), rank)

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.rank >> (self.m - 1 - t)) & 1 for t in range(self.m))

    @property
    def label(self) -> str:
        return format(self.rank, f"0{self.m}b")

    def shifted(self, offset: int) -> "RowIndex":
        return RowIndex(self.m, self.rank ^ offset)


def rows_upper(m: int) -> range:
    """U: first bit 0."""
    return range(0, 1 << (m - 1))


def rows_lower(m: int) -> range:
    """L: first bit 1."""
    return range(1 << (m - 1), 1 << m)


def rows_middle(m: int) -> range:
    """L': first two bits 01 or 10."""
    return range(1 << (m - 2), 3 << (m - 2))


def rows_outer(m: int) -> Tuple[int, ...]:
    """U': first two bits 00 or 11 (not contiguous)."""
    return tuple(range(0, 1 << (m - 2))) + tuple(range(3 << (m - 2), 1 << m))


def rows_with_bit_clear(m: int, s: int) -> Tuple[int, ...]:
    return tuple(x for x in range(1 << m) if not (x >> (m - s)) & 1)


def _vector_name(v: int, m: int) -> str:
    if v == 0:
        return "0"
    for i in range(1, m + 1):
        if v == unit_vector(i, m):
            return f"e{i}"
    for i in range(2, m + 1):
        if v == prefix_vector(i, m):
            return f"d{i}"
    return format(v, f"0{m}b")


@dataclass(frozen=True)
class ParityPattern:
    offsets: Tuple[int, ...]

    def render(self, m: int) -> str:
        return "(" + ", ".join(_vector_name(v, m) for v in self.offsets) + ")"


# ---------------------------------------------------------------------------
# codes and codewords

@dataclass(frozen=True)
class ZigzagCode:
    construction: Construction
    m: int
    k: int
    patterns: Tuple[ParityPattern, ...]
    coefficients: np.ndarray = dc_field(compare=False, repr=False)
    field: FieldSpec = dc_field(default_factory=FieldSpec.default)
    seed: Optional[int] = None

    def __post_init__(self):
        for pattern in self.patterns:
            if len(pattern.offsets) != self.k:
                raise ShapeMismatch(f"pattern {pattern.offsets} does not have k={self.k} offsets")
            if any(not 0 <= v < self.rows for v in pattern.offsets):
                raise ShapeMismatch(f"pattern {pattern.offsets} has offsets outside F_2^{self.m}")
        expected = (self.rows, self.k, len(self.patterns))
        if tuple(self.coefficients.shape) != expected:
            raise ShapeMismatch(f"coefficient table has shape {self.coefficients.shape}, expected {expected}")

    @property
    def rows(self) -> int:
        return 1 << self.m

    @property
    def parity_count(self) -> int:
        return len(self.patterns)

    @property
    def n_nodes(self) -> int:
        return self.k + self.parity_count

    @property
    def rate(self) -> float:
        return self.k / self.n_nodes

    @property
    def column_names(self) -> Tuple[str, ...]:
        return tuple(f"a{i}" for i in range(self.k)) + tuple(f"p{j}" for j in range(self.parity_count))

    def with_coefficients(self, coefficients: np.ndarray, seed: Optional[int] = None) -> "ZigzagCode":
        return replace(self, coefficients=np.asarray(coefficients, dtype=np.int64), seed=seed)

    def to_dict(self) -> dict:
        return {
            "kind": "zigzag-code",
            "construction": self.construction.value,
            "m": self.m,
            "k": self.k,
            "field_w": self.field.w,
            "reduction_poly": self.field.reduction_polynomial,
            "seed": self.seed,
            "patterns": [list(p.offsets) for p in self.patterns],
            "coefficients": [int(c) for c in self.coefficients.reshape(-1)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ZigzagCode":
        try:
            construction = Construction.parse(data["construction"])
            spec = FieldSpec(int(data["field_w"]), int(data["reduction_poly"]))
            m, k = int(data["m"]), int(data["k"])
            template = _BUILDERS[construction](m, k, spec)
            patterns = tuple(ParityPattern(tuple(int(v) for v in p)) for p in data["patterns"])
            coefficients = np.asarray(data["coefficients"], dtype=np.int64)
            seed = data.get("seed")
        except (KeyError, TypeError, ValueError) as exc:
            raise DescriptorError(f"bad zigzag descriptor: {exc}") from exc
        if patterns != template.patterns:
            raise DescriptorError(f"descriptor patterns do not match construction {construction.value}")
        if coefficients.size != template.coefficients.size:
            raise DescriptorError("coefficient table has the wrong size")
        if coefficients.size and (coefficients.min() < 0 or coefficients.max() >= spec.order):
            raise DescriptorError("coefficient outside the field")
        return template.with_coefficients(coefficients.reshape(template.coefficients.shape), seed)


@dataclass(frozen=True, eq=False)
class ArrayCodeword:
    """N columns of M symbols; the first k columns are systematic."""
    columns: np.ndarray
    k: int

    def column(self, index: int) -> np.ndarray:
        return self.columns[index]

    @property
    def info(self) -> np.ndarray:
        return self.columns[: self.k]


def _check_m(m: int):
    if not MIN_M <= m <= MAX_M:
        raise ParameterOutOfRange(f"m must be in [{MIN_M}, {MAX_M}], got {m}")


def _new_code(construction: Construction, m: int, k: int, offsets: List[List[int]],
              spec: Optional[FieldSpec]) -> ZigzagCode:
    patterns = tuple(ParityPattern(tuple(row)) for row in offsets)
    coefficients = np.ones((1 << m, k, len(patterns)), dtype=np.int64)
    code = ZigzagCode(construction, m, k, patterns, coefficients, spec or FieldSpec.default())
    logger.debug("built construction %s: m=%d k=%d N=%d", construction.value, m, k, code.n_nodes)
    return code


def build_construction_a(m: int, field_spec: Optional[FieldSpec] = None) -> ZigzagCode:
    _check_m(m)
    k = m + 1
    offsets = [[0] * k]
    for j in range(1, m + 1):
        offsets.append([0]
                       + [unit_vector(i, m) for i in range(j + 1, m + 1)]
                       + [prefix_vector(i, m) for i in range(1, j + 1)])
    return _new_code(Construction.A, m, k, offsets, field_spec)


def build_construction_b(m: int, field_spec: Optional[FieldSpec] = None) -> ZigzagCode:
    _check_m(m)
    k = m + 1
    m_prime = math.ceil((m + 1) / 2)
    offsets = [[0] * k]
    for j in range(1, m_prime):
        # d_m sits at the 2j-th entry (1-based)
        offsets.append([0]
                       + [unit_vector(i, m) for i in range(m - 2 * j + 3, m + 1)]
                       + [prefix_vector(m, m)]
                       + [unit_vector(i, m) for i in range(2, m - 2 * j + 3)])
    offsets.append([0] + [prefix_vector(i, m) for i in range(2, m + 1)] + [prefix_vector(1, m)])
    return _new_code(Construction.B, m, k, offsets, field_spec)


def build_construction_c(m: int, k: int, field_spec: Optional[FieldSpec] = None) -> ZigzagCode:
    _check_m(m)
    if not MIN_K <= k <= MAX_K:
        raise ParameterOutOfRange(f"k must be in [{MIN_K}, {MAX_K}], got {k}")
    m_prime = math.ceil(k / 2)
    offsets = [[0] * k]
    for j in range(1, m_prime):
        row = [0] * k
        row[2 * j - 1] = prefix_vector(m, m)
        row[2 * j] = unit_vector(2, m)
        offsets.append(row)
    offsets.append([0] + [prefix_vector(2, m)] * (k - 2) + [prefix_vector(1, m)])
    return _new_code(Construction.C, m, k, offsets, field_spec)


def build_baseline(m: int, field_spec: Optional[FieldSpec] = None) -> ZigzagCode:
    _check_m(m)
    k = m + 1
    offsets = [[0] * k, [0] + [unit_vector(i, m) for i in range(1, m + 1)]]
    return _new_code(Construction.BASELINE, m, k, offsets, field_spec)


_BUILDERS = {
    Construction.A: lambda m, k, spec: build_construction_a(m, spec),
    Construction.B: lambda m, k, spec: build_construction_b(m, spec),
    Construction.C: lambda m, k, spec: build_construction_c(m, k, spec),
    Construction.BASELINE: lambda m, k, spec: build_baseline(m, spec),
}


def build_code(construction, m: int, k: Optional[int] = None,
               field_spec: Optional[FieldSpec] = None) -> ZigzagCode:
    construction = Construction.parse(construction) if not isinstance(construction, Construction) else construction
    if construction is Construction.C and k is None:
        raise ParameterOutOfRange("construction C needs k")
    return _BUILDERS[construction](m, k, field_spec)


def mds_field_bound(m: int, k: int) -> int:
    """2^m * C(k-1, t-1)^2 with t = ceil(k/2); coefficients exist in any larger field."""
    t = math.ceil(k / 2)
    return (1 << m) * math.comb(k - 1, t - 1) ** 2


# ---------------------------------------------------------------------------
# encoding

def _info_array(code: ZigzagCode, info) -> np.ndarray:
    arr = np.asarray(info, dtype=np.int64)
    if arr.shape != (code.k, code.rows):
        raise ShapeMismatch(f"info must have shape ({code.k}, {code.rows}), got {arr.shape}")
    return arr


def encode(code: ZigzagCode, info) -> ArrayCodeword:
    spec = code.field
    a = spec.array(_info_array(code, info))
    alpha = spec.array(code.coefficients)
    rows = np.arange(code.rows)
    columns = np.zeros((code.n_nodes, code.rows), dtype=np.int64)
    columns[: code.k] = as_ints(a)
    for j, pattern in enumerate(code.patterns):
        acc = spec.gf.Zeros(code.rows)
        for i, v in enumerate(pattern.offsets):
            acc += alpha[:, i, j] * a[i, rows ^ v]
        columns[code.k + j] = as_ints(acc)
    columns.setflags(write=False)
    return ArrayCodeword(columns, code.k)


def random_info(code: ZigzagCode, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return random_elements(code.field, (code.k, code.rows), rng)


def generator_blocks(code: ZigzagCode) -> np.ndarray:
    """Per-column generator rows: shape (N, M, M*k), info symbol a^(i)_r at index i*M + r."""
    M, k = code.rows, code.k
    rows = np.arange(M)
    g = np.zeros((code.n_nodes, M, M * k), dtype=np.int64)
    for i in range(k):
        g[i, rows, i * M + rows] = 1
    for j, pattern in enumerate(code.patterns):
        for i, v in enumerate(pattern.offsets):
            g[k + j, rows, i * M + (rows ^ v)] = code.coefficients[:, i, j]
    return g


def decode(code: ZigzagCode, cw: ArrayCodeword, available: Sequence[int]) -> np.ndarray:
    """Recover the (k, M) info array from the listed columns (the first k are used)."""
    chosen = sorted(set(int(c) for c in available))[: code.k]
    if len(chosen) < code.k:
        raise ShapeMismatch(f"need {code.k} columns to decode, got {len(chosen)}")
    g = generator_blocks(code)
    system = g[chosen].reshape(code.rows * code.k, code.rows * code.k)
    received = np.asarray(cw.columns)[chosen].reshape(-1)
    solution = mat_solve(system, received, code.field)
    return as_ints(solution).reshape(code.k, code.rows)


# ---------------------------------------------------------------------------
# MDS verification and coefficient search

@dataclass(frozen=True)
class MdsVerdict:
    ok: bool
    witness: Optional[Tuple[int, ...]]
    subsets_checked: int
    oracle: str
    note: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_mds(code: ZigzagCode, jobs: int = 1, oracle: str = "rank") -> MdsVerdict:
    if oracle not in ("rank", "decode", "both"):
        raise ParameterOutOfRange(f"unknown oracle {oracle!r}")
    N, k, M = code.n_nodes, code.k, code.rows
    total = math.comb(N, k)
    if total > MAX_MDS_SUBSETS:
        raise TooManySubsets(f"C({N},{k}) = {total} exceeds the {MAX_MDS_SUBSETS} subset guard")

    spec = code.field
    g = generator_blocks(code)
    info = random_info(code, DECODE_ORACLE_SEED)
    cw = encode(code, info) if oracle != "rank" else None

    def check(subset: Tuple[int, ...]) -> Tuple[bool, str]:
        system = g[list(subset)].reshape(M * k, M * k)
        verdicts = {}
        if oracle in ("rank", "both"):
            verdicts["rank"] = mat_rank(system, spec) == M * k
        if oracle in ("decode", "both"):
            received = np.asarray(cw.columns)[list(subset)].reshape(-1)
            try:
                solved = as_ints(mat_solve(system, received, spec))
                verdicts["decode"] = bool(np.array_equal(solved, info.reshape(-1)))
            except SingularMatrix:
                verdicts["decode"] = False
        if len(set(verdicts.values())) > 1:
            return False, "rank and decode oracles disagree"
        return all(verdicts.values()), ""

    subsets = itertools.combinations(range(N), k)
    checked = 0
    if jobs <= 1:
        for subset in subsets:
            checked += 1
            ok, note = check(subset)
            if not ok:
                return MdsVerdict(False, subset, checked, oracle, note)
        return MdsVerdict(True, None, checked, oracle)

    subset_list = list(subsets)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(check, subset_list))
    for subset, (ok, note) in zip(subset_list, results):
        checked += 1
        if not ok:
            return MdsVerdict(False, subset, checked, oracle, note)
    return MdsVerdict(True, None, checked, oracle)


def seed_coefficients(code: ZigzagCode, seed: int = 0) -> ZigzagCode:
    """Random nonzero coefficients without the MDS search; repair only needs them nonzero."""
    rng = np.random.default_rng(seed)
    return code.with_coefficients(random_elements(code.field, code.coefficients.shape, rng, nonzero=True), seed)


def assign_coefficients(code: ZigzagCode, seed: int = 0, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                        jobs: int = 1) -> ZigzagCode:
    bound = mds_field_bound(code.m, code.k)
    if code.field.order <= bound:
        logger.warning("GF(2^%d) is not above the coefficient-existence bound %d for m=%d k=%d",
                       code.field.w, bound, code.m, code.k)
    for attempt in range(max_attempts):
        attempt_seed = seed + attempt
        candidate = seed_coefficients(code, attempt_seed)
        verdict = verify_mds(candidate, jobs=jobs)
        if verdict:
            logger.info("construction %s m=%d k=%d: MDS coefficients found with seed %d (attempt %d)",
                        code.construction.value, code.m, code.k, attempt_seed, attempt + 1)
            return candidate
        logger.debug("seed %d rejected, rank deficient on columns %s", attempt_seed, verdict.witness)
    raise CoefficientSearchExhausted(
        f"no MDS coefficient table after {max_attempts} attempts starting at seed {seed}")


# ---------------------------------------------------------------------------
# repair planning and execution

@dataclass(frozen=True)
class HelperRead:
    column: int
    rows: Tuple[int, ...]

    @property
    def skip(self) -> int:
        return self.rows[-1] - self.rows[0] - (len(self.rows) - 1)


@dataclass(frozen=True)
class RecipeStep:
    """Recover a^(s)_{unknown_row} from p^(parity)_{parity_row} minus the cancelled info symbols."""
    unknown_row: int
    parity: int
    parity_row: int
    cancels: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class RepairPlan:
    failed: int
    helpers: Tuple[HelperRead, ...]
    recipe: Tuple[RecipeStep, ...]
    column_height: int

    @property
    def locality(self) -> int:
        return len(self.helpers)

    @property
    def bandwidth(self) -> int:
        return sum(len(h.rows) for h in self.helpers)

    @property
    def skip_cost(self) -> int:
        return sum(h.skip for h in self.helpers)

    @property
    def rebuilding_ratio(self) -> float:
        return max(len(h.rows) for h in self.helpers) / self.column_height

    def rows_for(self, column: int) -> Tuple[int, ...]:
        for helper in self.helpers:
            if helper.column == column:
                return helper.rows
        return ()

    def to_dict(self) -> dict:
        return {
            "kind": "repair-plan",
            "failed": self.failed,
            "helpers": [{"column": h.column, "rows": list(h.rows)} for h in self.helpers],
            "skip_cost": self.skip_cost,
            "bandwidth": self.bandwidth,
        }


ReadSets = Tuple[Dict[int, Sequence[int]], List[Tuple[int, Sequence[int]]]]


def _plan_a(code: ZigzagCode, s: int) -> ReadSets:
    m, k = code.m, code.k
    upper, lower = rows_upper(m), rows_lower(m)
    if s == 0:
        return {i: upper for i in range(1, k)}, [(0, upper), (m, lower)]
    systematic = {i: (upper if i < s else lower) for i in range(k) if i != s}
    return systematic, [(m - s, upper), (m - s + 1, upper)]


def _plan_bc(code: ZigzagCode, s: int) -> ReadSets:
    m, k = code.m, code.k
    last_parity = code.parity_count - 1
    upper, lower, middle = rows_upper(m), rows_lower(m), rows_middle(m)
    others = [i for i in range(k) if i != s]
    if s == 0:
        return {i: upper for i in others}, [(0, upper), (last_parity, lower)]
    if s == k - 1:
        return {i: middle for i in others}, [(0, middle), (last_parity, middle)]
    if s % 2:
        return {i: upper for i in others}, [(0, upper), ((s + 1) // 2, upper)]
    return {i: middle for i in others}, [(0, middle), (s // 2, middle)]


def _plan_baseline(code: ZigzagCode, s: int) -> ReadSets:
    if s == 0:
        raise UnsupportedFailure("baseline repair of node 0 has no specified read set")
    rows = rows_with_bit_clear(code.m, s)
    return {i: rows for i in range(code.k) if i != s}, [(0, rows), (1, rows)]


_PLANNERS = {
    Construction.A: _plan_a,
    Construction.B: _plan_bc,
    Construction.C: _plan_bc,
    Construction.BASELINE: _plan_baseline,
}


def _build_recipe(code: ZigzagCode, s: int, parity_reads: Iterable[Tuple[int, Sequence[int]]]) -> Tuple[RecipeStep, ...]:
    steps: Dict[int, RecipeStep] = {}
    for j, rows in parity_reads:
        offsets = code.patterns[j].offsets
        for x in rows:
            unknown = x ^ offsets[s]
            if unknown in steps:
                continue
            cancels = tuple((i, x ^ offsets[i]) for i in range(code.k) if i != s)
            steps[unknown] = RecipeStep(unknown, j, x, cancels)
    missing = [r for r in range(code.rows) if r not in steps]
    if missing:
        raise EliminationFailed(f"parity reads never reach a^({s}) at rows {missing}")
    return tuple(steps[r] for r in range(code.rows))


def plan_repair(code: ZigzagCode, s: int) -> RepairPlan:
    if not 0 <= s < code.n_nodes:
        raise ParameterOutOfRange(f"node {s} out of range for N={code.n_nodes}")
    if s >= code.k:
        raise UnsupportedFailure(f"node {s} is a parity column; only systematic repair is planned")
    systematic, parity_reads = _PLANNERS[code.construction](code, s)
    helpers = tuple(HelperRead(i, tuple(systematic[i])) for i in sorted(systematic))
    helpers += tuple(HelperRead(code.k + j, tuple(rows)) for j, rows in parity_reads)
    recipe = _build_recipe(code, s, parity_reads)
    return RepairPlan(s, helpers, recipe, code.rows)


def execute_repair(cw: ArrayCodeword, plan: RepairPlan, code: ZigzagCode) -> np.ndarray:
    """Rebuild column plan.failed from the symbols the plan reads, and nothing else."""
    spec = code.field
    available: Dict[Tuple[int, int], int] = {}
    for helper in plan.helpers:
        for row in helper.rows:
            available[(helper.column, row)] = int(cw.columns[helper.column, row])

    recovered: List[Optional[int]] = [None] * code.rows
    for step in plan.recipe:
        parity_key = (code.k + step.parity, step.parity_row)
        if parity_key not in available:
            raise EliminationFailed(f"p^({step.parity})_{step.parity_row} is not part of the plan")
        value = available[parity_key]
        for column, row in step.cancels:
            symbol = available.get((column, row))
            if symbol is None:
                raise EliminationFailed(
                    f"p^({step.parity})_{step.parity_row} still depends on a^({column})_{row}, which was not read")
            value ^= gf_mul(int(code.coefficients[step.parity_row, column, step.parity]), symbol, spec)
        coefficient = int(code.coefficients[step.parity_row, plan.failed, step.parity])
        if coefficient == 0:
            raise EliminationFailed(f"zero coefficient on a^({plan.failed}) in p^({step.parity})_{step.parity_row}")
        recovered[step.unknown_row] = gf_mul(value, gf_inv(coefficient, spec), spec)

    if any(symbol is None for symbol in recovered):
        raise EliminationFailed(f"column {plan.failed} only partially recovered")
    return np.asarray(recovered, dtype=np.int64)


def referenced_symbols(code: ZigzagCode, plan: RepairPlan) -> Dict[int, Set[int]]:
    """Info symbols (column -> rows) that appear in the plan's parity reads."""
    refs: Dict[int, Set[int]] = {i: set() for i in range(code.k)}
    for helper in plan.helpers:
        if helper.column < code.k:
            continue
        offsets = code.patterns[helper.column - code.k].offsets
        for x in helper.rows:
            for i, v in enumerate(offsets):
                refs[i].add(x ^ v)
    return refs


def parity_touch_counts(code: ZigzagCode) -> np.ndarray:
    """counts[i, r, j]: how many symbols of parity j contain a^(i)_r."""
    counts = np.zeros((code.k, code.rows, code.parity_count), dtype=np.int64)
    rows = np.arange(code.rows)
    for j, pattern in enumerate(code.patterns):
        for i, v in enumerate(pattern.offsets):
            np.add.at(counts[:, :, j], (i, rows ^ v), 1)
    return counts
