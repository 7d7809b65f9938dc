"""Pure numpy kernels, used when the compiled core is unavailable."""

from __future__ import annotations

import numpy as np


def matmul(field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        col = A[:, k : k + 1]
        if not col.any():
            continue
        out = field.vadd(out, field.vmul(col, B[k : k + 1, :]))
    return out


def eliminate(field, M: np.ndarray, ncols: int):
    """Gauss-Jordan over the first ``ncols`` columns of a copy of M.

    Returns (reduced, rank, det, pivots); det is the determinant of the
    leading square block when it is square, else 0.
    """
    M = np.array(M, dtype=np.int64, copy=True)
    rows = M.shape[0]
    rank = 0
    det = 1
    pivots = []
    for c in range(ncols):
        if rank == rows:
            break
        nz = np.flatnonzero(M[rank:, c])
        if nz.size == 0:
            continue
        r = rank + int(nz[0])
        if r != rank:
            M[[rank, r]] = M[[r, rank]]
            det = field.neg(det)
        piv = int(M[rank, c])
        det = field.mul(det, piv)
        M[rank] = field.vmul(M[rank], field.inv(piv))
        factors = M[:, c].copy()
        factors[rank] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            upd = field.vmul(factors[hit, None], M[rank][None, :])
            M[hit] = field.vsub(M[hit], upd)
        pivots.append(c)
        rank += 1
    if rows != ncols or rank < rows:
        det = 0
    return M, rank, det, pivots
