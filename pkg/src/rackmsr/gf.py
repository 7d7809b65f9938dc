"""Finite fields GF(p^m) backed by log/antilog tables.

Elements are plain ints in ``[0, q)``. An element is the packed coefficient
vector of its polynomial residue, ``c_0 + c_1 p + ... + c_{m-1} p^{m-1}``, so
for prime fields an element is simply its residue. Multiplication and
inversion go through the discrete-log tables, addition through a Zech table.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

TABLE_CAP = 1 << 20

Felt = int


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, m) with q = p^m, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            m, r = 0, q
            while r % p == 0:
                r //= p
                m += 1
            return (p, m) if r == 1 else None
    return None


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# Polynomials over GF(p) as coefficient lists, lowest degree first.

def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = a[:]
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(f: list[int], p: int) -> bool:
    m = len(f) - 1
    if m == 1:
        return True
    for deg in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            g = list(low) + [1]
            if not _poly_mod(f, g, p):
                return False
    return True


def _power_cycle(f: list[int], p: int) -> list[int] | None:
    """Packed powers x^0, x^1, ... modulo monic f; None if x is not primitive."""
    m = len(f) - 1
    q = p ** m
    low = f[:m]
    reduce_vec = [(-c) % p for c in low]
    out = [1]
    digits = [1] + [0] * (m - 1)
    for _ in range(q - 2):
        carry = digits[-1]
        digits = [0] + digits[:-1]
        if carry:
            digits = [(d + carry * rc) % p for d, rc in zip(digits, reduce_vec)]
        v = 0
        for d in reversed(digits):
            v = v * p + d
        if v == 1 or v == 0:
            return None
        out.append(v)
    # x^(q-1) must return to 1
    carry = digits[-1]
    digits = [0] + digits[:-1]
    if carry:
        digits = [(d + carry * rc) % p for d, rc in zip(digits, reduce_vec)]
    if digits != [1] + [0] * (m - 1):
        return None
    return out


def _smallest_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = {d for d in _divisors(p - 1) if is_prime(d)}
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise FieldError(f"no primitive root mod {p}")


class Field:
    """GF(p^m) with primitive element xi = residue of the indeterminate."""

    def __init__(self, p: int, m: int, modulus: Sequence[int], exp_list: list[int]):
        self.p = p
        self.m = m
        self.q = p ** m
        self.modulus = tuple(int(c) for c in modulus)
        n = self.q - 1
        self.order = n
        exp = np.array(exp_list, dtype=np.int64)
        # doubled so exp[i + j] needs no reduction for i, j < q-1
        self.exp_table = np.concatenate([exp, exp, exp[:1]])
        log = np.zeros(self.q, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        self.log_table = log
        one_plus = self._vec_add_one(exp)
        zech = np.full(n, -1, dtype=np.int64)
        nz = one_plus != 0
        zech[nz] = log[one_plus[nz]]
        self.zech_table = zech
        if p == 2:
            self.neg_table = np.arange(self.q, dtype=np.int64)
        else:
            half = n // 2
            neg = np.zeros(self.q, dtype=np.int64)
            neg[exp] = self.exp_table[np.arange(n) + half]
            self.neg_table = neg
        for t in (self.exp_table, self.log_table, self.zech_table, self.neg_table):
            t.setflags(write=False)
        self.xi = int(exp[1 % n]) if n > 0 else 1

    def _vec_add_one(self, v: np.ndarray) -> np.ndarray:
        c0 = v % self.p
        return v - c0 + (c0 + 1) % self.p

    # identity and display

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    # scalar arithmetic

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")
        return a

    def log(self, a: int) -> int:
        if a == 0:
            raise FieldError("log of zero")
        return int(self.log_table[a])

    def exp(self, i: int) -> int:
        return int(self.exp_table[i % self.order])

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        la = int(self.log_table[a])
        z = int(self.zech_table[(int(self.log_table[b]) - la) % self.order])
        if z < 0:
            return 0
        return int(self.exp_table[la + z])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self.neg_table[b]))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[self.log_table[a] + self.log_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp_table[(-int(self.log_table[a])) % self.order])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 if e == 0 else 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % self.order])

    def from_int(self, c: int) -> int:
        """Embed an integer through the prime subfield."""
        return c % self.p

    def sum(self, values: Iterable[int]) -> int:
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    # vectorised arithmetic over int64 arrays

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        la = self.log_table[a]
        d = (self.log_table[b] - la) % self.order
        z = self.zech_table[d]
        out = np.where(z < 0, 0, self.exp_table[la + np.maximum(z, 0)])
        out = np.where(a == 0, b, np.where(b == 0, a, out))
        return out

    def vneg(self, a: np.ndarray) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a: np.ndarray, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e < 0 and np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        out = self.exp_table[(self.log_table[a] * e) % self.order]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def vsum(self, a: np.ndarray, axis: int = 0) -> np.ndarray:
        a = np.moveaxis(np.asarray(a, dtype=np.int64), axis, 0)
        acc = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            acc = self.vadd(acc, row)
        return acc


def make_field(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Build GF(p^m).

    ``modulus`` lists the coefficients of a monic degree-m polynomial, lowest
    degree first, so x^3 + 2x + 1 is ``[1, 2, 0, 1]``. When omitted the
    smallest primitive polynomial is used, ordering candidates by the packed
    value of their low coefficients.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be at least 1")
    q = p ** m
    if q > TABLE_CAP:
        raise FieldError(f"q = {q} exceeds the table cap {TABLE_CAP}")
    if modulus is not None:
        f = [int(c) % p for c in modulus]
        if len(f) != m + 1:
            raise FieldError(f"modulus must have degree {m}")
        if f[-1] != 1:
            raise FieldError("modulus must be monic")
        if not _is_irreducible(f, p):
            raise FieldError(f"modulus {list(modulus)} is not irreducible over GF({p})")
        if m == 1:
            root = (-f[0]) % p
            if q == 2 and root == 1:
                return Field(p, 1, f, [1])
            if root == 0 or _smallest_order(root, p) != p - 1:
                raise FieldError(f"modulus {list(modulus)} is not primitive")
            return Field(p, 1, f, [pow(root, i, p) for i in range(p - 1)])
        cycle = _power_cycle(f, p)
        if cycle is None:
            raise FieldError(f"modulus {list(modulus)} is not primitive")
        return Field(p, m, f, cycle)
    if m == 1:
        g = _smallest_primitive_root(p)
        return Field(p, 1, [(-g) % p, 1], [pow(g, i, p) for i in range(p - 1)])
    for packed in range(1, p ** m):
        low = [(packed // p ** i) % p for i in range(m)]
        f = low + [1]
        if low[0] == 0:
            continue
        cycle = _power_cycle(f, p)
        if cycle is not None:
            return Field(p, m, f, cycle)
    raise FieldError(f"no primitive polynomial of degree {m} over GF({p})")


def _smallest_order(a: int, p: int) -> int:
    x, k = a % p, 1
    while x != 1:
        x = x * a % p
        k += 1
    return k


def field_from_json(spec: dict) -> Field:
    return make_field(int(spec["p"]), int(spec.get("m", 1)), spec.get("modulus"))


def arith(field: Field, op: str, *operands: int) -> int:
    for a in operands[: 1 if op == "pow" else None]:
        field.check(a)
    if op == "add":
        return field.sum(operands)
    if op == "sub":
        a, b = operands
        return field.sub(a, b)
    if op == "mul":
        acc = 1
        for a in operands:
            acc = field.mul(acc, a)
        return acc
    if op == "neg":
        (a,) = operands
        return field.neg(a)
    if op == "inv":
        (a,) = operands
        return field.inv(a)
    if op == "pow":
        a, e = operands
        return field.pow(a, int(e))
    raise FieldError(f"unknown operation {op!r}")


def element_of_order(field: Field, u: int) -> int:
    if u < 1 or field.order % u:
        raise FieldError(f"{u} does not divide q-1 = {field.order}")
    return field.exp(field.order // u)
