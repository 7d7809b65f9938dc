"""Independent reference implementations used as test oracles.

Nothing here touches the log/antilog tables or the elimination kernels.
"""

from __future__ import annotations

import itertools

import numpy as np
from fractions import Fraction
from math import factorial


class PolyField:
    """GF(p^m) by schoolbook polynomial arithmetic on packed digits."""

    def __init__(self, p: int, modulus: list[int]):
        self.p = p
        self.m = len(modulus) - 1
        self.modulus = modulus
        self.q = p ** self.m

    def digits(self, a: int) -> list[int]:
        return [(a // self.p ** i) % self.p for i in range(self.m)]

    def pack(self, ds: list[int]) -> int:
        return sum(d * self.p ** i for i, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        return self.pack([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        return self.pack([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(self.digits(a)):
            for j, y in enumerate(self.digits(b)):
                prod[i + j] = (prod[i + j] + x * y) % p
        for deg in range(len(prod) - 1, m - 1, -1):
            c = prod[deg]
            if c:
                for i, fc in enumerate(self.modulus):
                    prod[deg - m + i] = (prod[deg - m + i] - c * fc) % p
        return self.pack(prod[:m])

    def pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def inv_scan(self, a: int) -> int:
        for b in range(1, self.q):
            if self.mul(a, b) == 1:
                return b
        raise ZeroDivisionError

    inv = inv_scan


def det_leibniz(F, A: list[list[int]]) -> int:
    n = len(A)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = F.mul(term, A[i][perm[i]])
        total = F.sub(total, term) if inv % 2 else F.add(total, term)
    return total


def det_column_elim(F, A: list[list[int]]) -> int:
    """Determinant by column operations, pivoting on the last nonzero row."""
    M = [row[:] for row in A]
    n = len(M)
    det = 1
    for c in range(n - 1, -1, -1):
        # pivot: in row c, last nonzero among columns <= c
        piv_col = next((j for j in range(c, -1, -1) if M[c][j]), None)
        if piv_col is None:
            return 0
        if piv_col != c:
            for row in M:
                row[c], row[piv_col] = row[piv_col], row[c]
            det = F.neg(det)
        piv = M[c][c]
        det = F.mul(det, piv)
        pinv = F.inv(piv)
        for j in range(c):
            f = F.mul(M[c][j], pinv)
            if f:
                for i in range(n):
                    M[i][j] = F.sub(M[i][j], F.mul(f, M[i][c]))
    return det


def kron_entries(F, A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    rA, cA, rB, cB = len(A), len(A[0]), len(B), len(B[0])
    out = [[0] * (cA * cB) for _ in range(rA * rB)]
    for i in range(rA):
        for j in range(cA):
            for k in range(rB):
                for t in range(cB):
                    out[i * rB + k][j * cB + t] = F.mul(A[i][j], B[k][t])
    return out


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def omega_terms(s: int, u: int) -> Fraction:
    """Same quadruple sum, delta-major order, exact rationals throughout."""
    total = Fraction(0)
    for delta in range(1, u * s + 1):
        for t in range(1, s + 1):
            if not t <= delta <= u * t:
                continue
            term = Fraction(_binom(s - 1, t - 1)) * _binom(u * t, delta) * _binom(delta - 1, t - 1)
            term *= (delta - t + 1) * (delta + t - 2)
            total += term / 2
    return total


def moment(F, x: int, t: int) -> list[int]:
    return [F.pow(x, i) for i in range(t)]


# Block layout of the example parity blocks: each entry is (sign, point index)
# for a 4 x 1 moment column, or None for a zero block.
_EVEN_LAYOUT = {
    0: [[(1, 0), (-1, 1), None, None], [None, (1, 1), None, None],
        [None, None, (1, 0), (-1, 1)], [None, None, None, (1, 1)]],
    2: [[(1, 2), None, None, None], [(-1, 2), (1, 3), None, None],
        [None, None, (1, 2), None], [None, None, (-1, 2), (1, 3)]],
    4: [[(1, 4), None, (-1, 5), None], [None, (1, 4), None, (-1, 5)],
        [None, None, (1, 5), None], [None, None, None, (1, 5)]],
    6: [[(1, 6), None, None, None], [None, (1, 6), None, None],
        [(-1, 6), None, (1, 7), None], [None, (-1, 6), None, (1, 7)]],
}


def example_parity_block(F, node):
    """One 16 x 4 parity block of the (8, 4, 2, 3) example, from its printed layout."""
    layout = _EVEN_LAYOUT[node - node % 2]
    twist = F.neg(1) if node % 2 else 1
    out = np.zeros((16, 4), dtype=np.int64)
    for i, row in enumerate(layout):
        for j, cell in enumerate(row):
            if cell is None:
                continue
            sign, idx = cell
            L = moment(F, F.mul(twist, F.exp(idx)), 4)
            out[4 * i : 4 * i + 4, j] = L if sign > 0 else [F.neg(x) for x in L]
    return out
