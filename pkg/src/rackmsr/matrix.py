"""Dense matrices over a Field with exact elimination."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .gf import Field


class MatrixError(ValueError):
    pass


class SingularMatrixError(MatrixError):
    pass


class InconsistentSystemError(MatrixError):
    pass


class Mat:
    """Immutable matrix: a read-only int64 array plus its field."""

    __slots__ = ("field", "a")

    def __init__(self, field: Field, data, *, _trusted: bool = False):
        a = np.array(data, dtype=np.int64, copy=not _trusted)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2:
            raise MatrixError("matrix data must be two-dimensional")
        if not _trusted and a.size and (a.min() < 0 or a.max() >= field.q):
            raise MatrixError(f"entries out of range for GF({field.q})")
        a.setflags(write=False)
        self.field = field
        self.a = a

    @classmethod
    def _wrap(cls, field: Field, a: np.ndarray) -> "Mat":
        return cls(field, a, _trusted=True)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "Mat":
        return Mat._wrap(self.field, np.ascontiguousarray(self.a.T))

    def __getitem__(self, idx) -> int:
        return int(self.a[idx])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(
            np.array_equal(self.a, other.a)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Mat({self.rows}x{self.cols} over GF({self.field.q}))"

    def __matmul__(self, other: "Mat") -> "Mat":
        return matmul(self, other)

    def __add__(self, other: "Mat") -> "Mat":
        return add(self, other)

    def __sub__(self, other: "Mat") -> "Mat":
        return sub(self, other)

    def __neg__(self) -> "Mat":
        return Mat._wrap(self.field, self.field.vneg(self.a))

    def is_zero(self) -> bool:
        return not self.a.any()

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def to_hex(self) -> str:
        width = max(1, len(f"{self.field.q - 1:x}"))
        return "\n".join(" ".join(f"{int(x):0{width}x}" for x in row) for row in self.a)

    @classmethod
    def from_hex(cls, field: Field, text: str) -> "Mat":
        rows = [[int(tok, 16) for tok in line.split()] for line in text.strip().splitlines()]
        return cls(field, rows)


@dataclass(frozen=True)
class BlockShape:
    block_rows: int
    block_cols: int
    height: int
    width: int

    def check(self, M: Mat) -> None:
        if self.block_rows * self.height != M.rows or self.block_cols * self.width != M.cols:
            raise MatrixError(f"{self} does not partition a {M.rows}x{M.cols} matrix")

    @classmethod
    def square(cls, M: Mat, blocks: int) -> "BlockShape":
        if M.rows % blocks or M.cols % blocks:
            raise MatrixError(f"cannot split {M.rows}x{M.cols} into {blocks}x{blocks} blocks")
        return cls(blocks, blocks, M.rows // blocks, M.cols // blocks)


def _same_field(*ms: Mat) -> Field:
    f = ms[0].field
    for m in ms[1:]:
        if m.field != f:
            raise MatrixError("field mismatch")
    return f


def identity(field: Field, n: int) -> Mat:
    return Mat._wrap(field, np.eye(n, dtype=np.int64))


def zeros(field: Field, rows: int, cols: int) -> Mat:
    return Mat._wrap(field, np.zeros((rows, cols), dtype=np.int64))


def diag(field: Field, values: Sequence[int]) -> Mat:
    return Mat(field, np.diag(np.asarray(values, dtype=np.int64)).reshape(len(values), len(values)))


def column(field: Field, values: Iterable[int]) -> Mat:
    return Mat(field, np.asarray(list(values), dtype=np.int64).reshape(-1, 1))


def matmul(A: Mat, B: Mat) -> Mat:
    f = _same_field(A, B)
    if A.cols != B.rows:
        raise MatrixError(f"shape mismatch {A.shape} @ {B.shape}")
    return Mat._wrap(f, _backend.matmul(f, A.a, B.a))


def add(A: Mat, B: Mat) -> Mat:
    f = _same_field(A, B)
    if A.shape != B.shape:
        raise MatrixError(f"shape mismatch {A.shape} + {B.shape}")
    return Mat._wrap(f, f.vadd(A.a, B.a))


def sub(A: Mat, B: Mat) -> Mat:
    f = _same_field(A, B)
    if A.shape != B.shape:
        raise MatrixError(f"shape mismatch {A.shape} - {B.shape}")
    return Mat._wrap(f, f.vsub(A.a, B.a))


def scale(c: int, A: Mat) -> Mat:
    return Mat._wrap(A.field, A.field.vmul(A.a, A.field.check(c)))


def hconcat(mats: Sequence[Mat]) -> Mat:
    if not mats:
        raise MatrixError("nothing to concatenate")
    f = _same_field(*mats)
    if len({m.rows for m in mats}) != 1:
        raise MatrixError("hconcat needs equal row counts")
    return Mat._wrap(f, np.hstack([m.a for m in mats]))


def vconcat(mats: Sequence[Mat]) -> Mat:
    if not mats:
        raise MatrixError("nothing to concatenate")
    f = _same_field(*mats)
    if len({m.cols for m in mats}) != 1:
        raise MatrixError("vconcat needs equal column counts")
    return Mat._wrap(f, np.vstack([m.a for m in mats]))


def submatrix(A: Mat, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> Mat:
    a = A.a
    if rows is not None:
        a = a[np.asarray(rows, dtype=np.intp)]
    if cols is not None:
        a = a[:, np.asarray(cols, dtype=np.intp)]
    return Mat._wrap(A.field, np.ascontiguousarray(a))


def kron(A: Mat, B: Mat) -> Mat:
    f = _same_field(A, B)
    out = f.vmul(A.a[:, None, :, None], B.a[None, :, None, :])
    return Mat._wrap(f, out.reshape(A.rows * B.rows, A.cols * B.cols))


def blocks(B: Mat, shape: BlockShape) -> list[list[Mat]]:
    shape.check(B)
    h, w = shape.height, shape.width
    return [
        [Mat._wrap(B.field, np.ascontiguousarray(B.a[i * h : (i + 1) * h, j * w : (j + 1) * w]))
         for j in range(shape.block_cols)]
        for i in range(shape.block_rows)
    ]


def boxtimes(A: Mat, B: Mat, shape: BlockShape) -> Mat:
    """Block (i, j) of the result is kron(A, B_ij)."""
    _same_field(A, B)
    parts = blocks(B, shape)
    return Mat._wrap(
        A.field,
        np.block([[kron(A, blk).a for blk in row] for row in parts]),
    )


def _eliminate(A: Mat, ncols: int):
    return _backend.eliminate(A.field, A.a, ncols)


def rank(A: Mat) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return _eliminate(A, A.cols)[1]


def det(A: Mat) -> int:
    if A.rows != A.cols:
        raise MatrixError("determinant of a non-square matrix")
    if A.rows == 0:
        return 1
    return int(_eliminate(A, A.cols)[2])


def inverse(A: Mat) -> Mat:
    if A.rows != A.cols:
        raise MatrixError("inverse of a non-square matrix")
    n = A.rows
    aug = np.hstack([A.a, np.eye(n, dtype=np.int64)])
    red, r, _, _ = _backend.eliminate(A.field, aug, n)
    if r < n:
        raise SingularMatrixError("matrix is singular")
    return Mat._wrap(A.field, np.ascontiguousarray(red[:, n:]))


def solve(A: Mat, b: Mat) -> Mat:
    """Unique solution x of A x = b.

    Overdetermined systems are accepted when consistent and of full column
    rank. Raises InconsistentSystemError when no solution exists and
    SingularMatrixError when the solution is not unique.
    """
    f = _same_field(A, b)
    if A.rows != b.rows:
        raise MatrixError(f"shape mismatch {A.shape} vs rhs {b.shape}")
    n = A.cols
    aug = np.hstack([A.a, b.a])
    red, r, _, pivots = _backend.eliminate(f, aug, n)
    if red[r:, n:].any():
        raise InconsistentSystemError("system is inconsistent")
    if r < n:
        raise SingularMatrixError("system does not have a unique solution")
    return Mat._wrap(f, np.ascontiguousarray(red[:n, n:]))


def nullity(A: Mat) -> int:
    return A.cols - rank(A)
