# skipless/finite_field.py
"""
Arithmetic over GF(2^w) and exact dense linear algebra.

Field elements are plain ints in [0, 2^w). Matrices are galois FieldArrays;
rank and solve run our own first-nonzero-pivot elimination on top of galois
element arithmetic, so galois' own np.linalg routines stay available as an
independent oracle in tests.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from .errors import ParameterOutOfRange, ShapeMismatch, SingularMatrix

logger = logging.getLogger(__name__)

# Config
MIN_W = 2
MAX_W = 16
DEFAULT_W = 16
DEFAULT_POLYNOMIALS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

MatrixLike = Union[galois.FieldArray, np.ndarray, Sequence[Sequence[int]]]


def poly_degree(poly: int) -> int:
    return poly.bit_length() - 1


def _poly_mod(a: int, b: int) -> int:
    db = poly_degree(b)
    while a and poly_degree(a) >= db:
        a ^= b << (poly_degree(a) - db)
    return a


@lru_cache(maxsize=None)
def is_irreducible(poly: int) -> bool:
    """Trial division by every GF(2) polynomial of degree 1..deg/2."""
    w = poly_degree(poly)
    if w < 1:
        return False
    for divisor in range(2, 1 << (w // 2 + 1)):
        if _poly_mod(poly, divisor) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def _galois_field(w: int, poly: int):
    logger.debug("building galois tables for GF(2^%d), poly=%#x", w, poly)
    return galois.GF(2 ** w, irreducible_poly=poly)


@dataclass(frozen=True)
class FieldSpec:
    w: int = DEFAULT_W
    reduction_polynomial: int = DEFAULT_POLYNOMIALS[DEFAULT_W]

    def __post_init__(self):
        if not MIN_W <= self.w <= MAX_W:
            raise ParameterOutOfRange(f"field width w must be in [{MIN_W}, {MAX_W}], got {self.w}")
        if poly_degree(self.reduction_polynomial) != self.w:
            raise ParameterOutOfRange(
                f"reduction polynomial {self.reduction_polynomial:#x} does not have degree {self.w}")
        if not is_irreducible(self.reduction_polynomial):
            raise ParameterOutOfRange(f"reduction polynomial {self.reduction_polynomial:#x} is reducible")

    @classmethod
    def default(cls, w: int = DEFAULT_W) -> "FieldSpec":
        if w not in DEFAULT_POLYNOMIALS:
            raise ParameterOutOfRange(f"field width w must be in [{MIN_W}, {MAX_W}], got {w}")
        return cls(w, DEFAULT_POLYNOMIALS[w])

    @property
    def order(self) -> int:
        return 1 << self.w

    @property
    def gf(self):
        """The galois FieldArray class for this field."""
        return _galois_field(self.w, self.reduction_polynomial)

    def check(self, value: int) -> int:
        value = int(value)
        if not 0 <= value < self.order:
            raise ParameterOutOfRange(f"{value} is not an element of GF(2^{self.w})")
        return value

    def array(self, values) -> galois.FieldArray:
        if isinstance(values, self.gf):
            return values
        raw = np.asarray(values, dtype=np.int64)
        if raw.size and (raw.min() < 0 or raw.max() >= self.order):
            raise ParameterOutOfRange(f"values outside GF(2^{self.w})")
        return self.gf(raw)


def as_ints(values) -> np.ndarray:
    """Plain int64 view of a FieldArray (or anything array-like)."""
    if isinstance(values, galois.FieldArray):
        values = values.view(np.ndarray)
    return np.asarray(values, dtype=np.int64)


def random_elements(spec: FieldSpec, shape, rng: np.random.Generator, nonzero: bool = False) -> np.ndarray:
    low = 1 if nonzero else 0
    return rng.integers(low, spec.order, size=shape, dtype=np.int64)


def gf_mul(a: int, b: int, spec: FieldSpec) -> int:
    """Reference product: shift-and-XOR with reduction after every shift."""
    a = spec.check(a)
    b = spec.check(b)
    top = spec.order
    product = 0
    while b:
        if b & 1:
            product ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= spec.reduction_polynomial
    return product


def gf_mul_fast(a: int, b: int, spec: FieldSpec) -> int:
    """Table-driven product via galois; must agree with gf_mul bit for bit."""
    return int(spec.gf(spec.check(a)) * spec.gf(spec.check(b)))


def gf_pow(a: int, exponent: int, spec: FieldSpec) -> int:
    result = 1
    base = spec.check(a)
    while exponent:
        if exponent & 1:
            result = gf_mul(result, base, spec)
        base = gf_mul(base, base, spec)
        exponent >>= 1
    return result


def gf_inv(a: int, spec: FieldSpec) -> int:
    if spec.check(a) == 0:
        raise ParameterOutOfRange("zero has no multiplicative inverse")
    return gf_pow(a, spec.order - 2, spec)


def _as_field_matrix(m: MatrixLike, spec: FieldSpec) -> galois.FieldArray:
    arr = spec.array(m if isinstance(m, galois.FieldArray) else np.asarray(m, dtype=np.int64))
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr.copy()


def _eliminate(a: galois.FieldArray) -> Tuple[galois.FieldArray, int, List[int]]:
    """In-place Gauss-Jordan elimination; returns (reduced, rank, pivot columns)."""
    rows, cols = a.shape
    rank = 0
    pivots: List[int] = []
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.flatnonzero(as_ints(a[rank:, col]))
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        a[rank] = a[rank] / a[rank, col]
        others = np.flatnonzero(as_ints(a[:, col]))
        others = others[others != rank]
        if others.size:
            a[others] = a[others] - a[others, col][:, np.newaxis] * a[rank][np.newaxis, :]
        pivots.append(col)
        rank += 1
    return a, rank, pivots


def mat_rank(m: MatrixLike, spec: FieldSpec) -> int:
    a = _as_field_matrix(m, spec)
    if 0 in a.shape:
        return 0
    return _eliminate(a)[1]


def mat_solve(a: MatrixLike, b: MatrixLike, spec: FieldSpec) -> galois.FieldArray:
    """Solve a·x = b for square full-rank a; b may be a vector or a matrix."""
    lhs = _as_field_matrix(a, spec)
    n, cols = lhs.shape
    if n != cols:
        raise ShapeMismatch(f"coefficient matrix must be square, got {lhs.shape}")
    rhs = spec.array(b if isinstance(b, galois.FieldArray) else np.asarray(b, dtype=np.int64))
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs.reshape(-1, 1)
    if rhs.shape[0] != n:
        raise ShapeMismatch(f"right-hand side has {rhs.shape[0]} rows, expected {n}")

    augmented = spec.gf.Zeros((n, n + rhs.shape[1]))
    augmented[:, :n] = lhs
    augmented[:, n:] = rhs
    reduced, _, pivots = _eliminate(augmented)
    if sum(1 for p in pivots if p < n) < n:
        raise SingularMatrix(f"{n}x{n} system is rank deficient")
    x = reduced[:, n:]
    return x.reshape(-1) if vector else x


def mat_mul(a: MatrixLike, b: MatrixLike, spec: FieldSpec) -> galois.FieldArray:
    return spec.array(a) @ spec.array(b)


def identity(n: int, spec: FieldSpec) -> galois.FieldArray:
    return spec.gf.Identity(n)


def zeros(shape, spec: FieldSpec) -> galois.FieldArray:
    return spec.gf.Zeros(shape)
