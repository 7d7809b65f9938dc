"""Structured builders: moment vectors, kernel maps, blow-ups, selectors.

Coordinates in [l] with l = s^ntilde are read as base-s digit strings,
digit 0 least significant. A blow-up at digit ``a`` acts only on digit a.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import Field
from .matrix import BlockShape, Mat, MatrixError, boxtimes, hconcat, identity, kron


@dataclass(frozen=True)
class KernelCtx:
    field: Field
    s: int
    ntilde: int

    def __post_init__(self):
        if self.s < 1 or self.ntilde < 1:
            raise ValueError("group width and digit count must be positive")

    @property
    def l(self) -> int:
        return self.s ** self.ntilde

    @property
    def l_bar(self) -> int:
        return self.s ** (self.ntilde - 1)

    def reduced(self) -> "KernelCtx":
        """Context with one fewer digit (the punctured level)."""
        return KernelCtx(self.field, self.s, self.ntilde - 1)


def moment_vector(field: Field, x: int, t: int) -> Mat:
    if t < 1:
        raise ValueError("length must be positive")
    vals = [1]
    for _ in range(t - 1):
        vals.append(field.mul(vals[-1], x))
    return Mat(field, np.array(vals, dtype=np.int64).reshape(t, 1))


def phi(field: Field, b: int, t: int, xs: Sequence[int]) -> Mat:
    """Kernel map: s x s blocks of t x 1 moment columns, mixing row b."""
    s = len(xs)
    if not 0 <= b <= s:
        raise ValueError(f"mixing row {b} outside [0, {s}]")
    out = np.zeros((s * t, s), dtype=np.int64)
    for j, x in enumerate(xs):
        col = moment_vector(field, x, t).a[:, 0]
        out[j * t : (j + 1) * t, j] = col
        if b < s and j != b:
            out[b * t : (b + 1) * t, j] = field.vneg(col)
    return Mat(field, out)


def blowup(ctx: KernelCtx, a: int, U: Mat) -> Mat:
    """I_{s^(ntilde-a-1)} kron (I_{s^a} boxtimes U), U split into s x s blocks."""
    if not 0 <= a < ctx.ntilde:
        raise ValueError(f"digit {a} outside [0, {ctx.ntilde})")
    f = ctx.field
    shape = BlockShape.square(U, ctx.s)
    inner = boxtimes(identity(f, ctx.s ** a), U, shape)
    outer = ctx.s ** (ctx.ntilde - a - 1)
    return kron(identity(f, outer), inner) if outer > 1 else inner


def diag_blowup(ctx: KernelCtx, a: int, values: Sequence[int]) -> np.ndarray:
    """Diagonal of blowup(a, diag(values)) as an array of length l.

    Coordinate i picks values[i_a], i_a the a-th base-s digit of i.
    """
    idx = (np.arange(ctx.l) // ctx.s ** a) % ctx.s
    return np.asarray(values, dtype=np.int64)[idx]


def _twisted_blocks(field, bs, gsets, m, xs_per_b, theta):
    if len(bs) != len(gsets) or len(bs) != len(xs_per_b):
        raise MatrixError("B, G_B and point lists must align")
    if list(bs) != sorted(set(bs)):
        raise MatrixError("rack positions must be sorted and distinct")
    delta = sum(len(g) for g in gsets)
    if delta > m:
        raise MatrixError(f"{delta} columns groups exceed height {m}")
    for b, gs, xs in zip(bs, gsets, xs_per_b):
        for g in gs:
            tw = field.pow(theta, g)
            yield b, [field.mul(tw, x) for x in xs]


def concat_phi(field: Field, bs, gsets, m: int, xs_per_b, theta: int = 1) -> Mat:
    parts = [phi(field, b, m, pts) for b, pts in _twisted_blocks(field, bs, gsets, m, xs_per_b, theta)]
    return hconcat(parts)


def concat_blowup(ctx: KernelCtx, a: int, bs, gsets, m: int, xs_per_b, theta: int = 1) -> Mat:
    f = ctx.field
    parts = [blowup(ctx, a, phi(f, b, m, pts)) for b, pts in _twisted_blocks(f, bs, gsets, m, xs_per_b, theta)]
    return hconcat(parts)


def repair_matrix(ctx: KernelCtx, a: int, z: int) -> Mat:
    """l_bar x l selector of coordinates whose digit a equals z; z = s sums over z."""
    if not 0 <= a < ctx.ntilde:
        raise ValueError(f"digit {a} outside [0, {ctx.ntilde})")
    if not 0 <= z <= ctx.s:
        raise ValueError(f"selector {z} outside [0, {ctx.s}]")
    s, l = ctx.s, ctx.l
    coords = np.arange(l)
    digit = (coords // s ** a) % s
    low = coords % s ** a
    high = coords // s ** (a + 1)
    row = high * s ** a + low
    out = np.zeros((ctx.l_bar, l), dtype=np.int64)
    mask = np.ones(l, dtype=bool) if z == s else digit == z
    out[row[mask], coords[mask]] = 1
    return Mat(ctx.field, out)


def projection(field: Field, u: int, v: int, r: int, w: int) -> Mat:
    """Rows w, u+w, 2u+w, ... of I_r that stay below r."""
    if not 0 <= v < u or (r + v) % u or r + v <= 0:
        raise ValueError(f"inconsistent (u, v, r) = ({u}, {v}, {r})")
    if not 0 <= w < u:
        raise ValueError(f"w = {w} outside [0, {u})")
    rows = list(range(w, r, u))
    out = np.zeros((len(rows), r), dtype=np.int64)
    out[np.arange(len(rows)), rows] = 1
    return Mat(field, out)
