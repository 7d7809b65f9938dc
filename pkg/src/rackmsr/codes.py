"""Parity-check assembly, encoding, erasure decoding and folding.

A codeword is an int64 array of shape (n, l): row i holds node i. Rack j
holds nodes j*u .. j*u+u-1. Node i = (a*group + b)*u + g evaluates the
kernel map at position b on the theta^g twisted points of its rack, blown
up at digit a.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .gf import Field
from .kernels import KernelCtx, blowup, diag_blowup, phi
from .lambdas import LambdaSet
from .matrix import Mat, SingularMatrixError, det, hconcat, inverse, matmul, solve
from .params import CodeParams
from .workers import pmap

CODEWORD_MAGIC = "RACKMSR-CODEWORD"
CODEWORD_VERSION = 1


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class FoldedView:
    w: int
    nodes: np.ndarray  # (n_bar, l)
    parity: tuple[Mat, ...]
    height: int


class RackCode:
    def __init__(self, params: CodeParams, field: Field, lambdas: LambdaSet):
        need = params.parent_n_bar * params.s
        if len(lambdas.lambdas) != need:
            raise CodeError(f"expected {need} coefficients for {params.theorem}, got {len(lambdas.lambdas)}")
        if field.pow(lambdas.theta, params.u) != 1 or (
            params.u > 1 and any(field.pow(lambdas.theta, g) == 1 for g in range(1, params.u))
        ):
            raise CodeError(f"theta does not have multiplicative order {params.u}")
        self.params = params
        self.field = field
        self.lambdas = lambdas
        self.ctx = KernelCtx(field, params.s, params.ntilde)
        self.parity = tuple(self.parent_block(i) for i in range(params.n))
        self._folded: dict[tuple[int, int], Mat] = {}

    # structure

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def l(self) -> int:
        return self.params.l

    @property
    def systematic(self) -> range:
        return range(self.params.k)

    @property
    def shortened(self) -> bool:
        return self.params.shortened

    def rack_points(self, rack: int) -> tuple[int, ...]:
        return self.lambdas.rack_points(rack, self.params.s)

    def parent_block(self, node: int) -> Mat:
        p = self.params
        if not 0 <= node < p.parent_n_bar * p.u:
            raise CodeError(f"node {node} outside the parent code")
        rack, g = divmod(node, p.u)
        a, b = p.rack_position(rack)
        tw = self.field.pow(self.lambdas.theta, g)
        xs = [self.field.mul(tw, x) for x in self.rack_points(rack)]
        return blowup(self.ctx, a, phi(self.field, b, p.r, xs))

    @cached_property
    def H(self) -> Mat:
        return hconcat(list(self.parity))

    @cached_property
    def _encoder(self) -> Mat:
        p = self.params
        kl = p.k * p.l
        Hs = Mat._wrap(self.field, np.ascontiguousarray(self.H.a[:, :kl]))
        Hp = Mat._wrap(self.field, np.ascontiguousarray(self.H.a[:, kl:]))
        try:
            return -matmul(inverse(Hp), Hs)
        except SingularMatrixError as exc:
            raise CodeError("parity part is singular; coefficients are invalid") from exc

    def fingerprint(self) -> str:
        """Hash of field, parameters and coefficients."""
        blob = json.dumps(
            {"field": self.field.to_json(), "params": self.params.to_json(),
             "lambdas": self.lambdas.to_json(self.field)},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def parity_hash(self) -> str:
        h = hashlib.sha256()
        for blk in self.parity:
            h.update(blk.to_hex().encode())
            h.update(b"\n--\n")
        return h.hexdigest()

    # words

    def _word(self, word) -> np.ndarray:
        w = np.asarray(word, dtype=np.int64)
        if w.shape != (self.n, self.l):
            raise CodeError(f"word must have shape {(self.n, self.l)}, got {w.shape}")
        return w

    def random_message(self, rng: random.Random | np.random.Generator) -> np.ndarray:
        size = self.params.k * self.l
        if isinstance(rng, random.Random):
            return np.array([rng.randrange(self.field.q) for _ in range(size)], dtype=np.int64)
        return rng.integers(0, self.field.q, size, dtype=np.int64)

    def encode(self, message) -> np.ndarray:
        p = self.params
        msg = np.asarray(message, dtype=np.int64).reshape(-1)
        if msg.size != p.k * p.l:
            raise CodeError(f"message must hold k*l = {p.k * p.l} symbols")
        self.field.check(int(msg.max(initial=0)))
        par = matmul(self._encoder, Mat(self.field, msg.reshape(-1, 1)))
        return np.concatenate([msg, par.a[:, 0]]).reshape(self.n, self.l)

    def systematic_part(self, word) -> np.ndarray:
        return self._word(word)[: self.params.k].reshape(-1).copy()

    def parity_residual(self, word) -> Mat:
        w = self._word(word)
        return matmul(self.H, Mat._wrap(self.field, w.reshape(-1, 1)))

    def is_codeword(self, word) -> bool:
        return self.parity_residual(word).is_zero()

    def erase_decode(self, word, erased: Iterable[int]) -> np.ndarray:
        w = self._word(word).copy()
        F = sorted(set(int(i) for i in erased))
        if len(F) > self.params.r:
            raise CodeError(f"{len(F)} erasures exceed r = {self.params.r}")
        if any(not 0 <= i < self.n for i in F):
            raise CodeError("erased index out of range")
        if not F:
            return w
        keep = [i for i in range(self.n) if i not in set(F)]
        f = self.field
        if keep:
            known = hconcat([self.parity[i] for i in keep])
            rhs = -matmul(known, Mat._wrap(f, w[keep].reshape(-1, 1)))
        else:
            rhs = Mat._wrap(f, np.zeros((self.params.r * self.l, 1), dtype=np.int64))
        A = hconcat([self.parity[i] for i in F])
        try:
            x = solve(A, rhs)
        except SingularMatrixError as exc:
            raise CodeError(f"erasure pattern {F} is not decodable; coefficients are invalid") from exc
        w[F] = x.a[:, 0].reshape(len(F), self.l)
        return w

    # folding

    def folded_parity(self, rack: int, height: int) -> Mat:
        key = (rack, height)
        if key not in self._folded:
            p = self.params
            a, b = p.rack_position(rack)
            xs = [self.field.pow(x, p.u) for x in self.rack_points(rack)]
            self._folded[key] = blowup(self.ctx, a, phi(self.field, b, height, xs))
        return self._folded[key]

    def fold_weights(self, rack: int, w: int) -> np.ndarray:
        """Diagonal of the blown-up diag(lambda^w) for a rack."""
        a, _ = self.params.rack_position(rack)
        return diag_blowup(self.ctx, a, [self.field.pow(x, w) for x in self.rack_points(rack)])

    def rack_sum(self, word: np.ndarray, rack: int, w: int) -> np.ndarray:
        """sum_g theta^(g w) c_{rack*u+g}."""
        f, u = self.field, self.params.u
        acc = np.zeros(word.shape[1], dtype=np.int64)
        for g in range(u):
            coeff = f.pow(self.lambdas.theta, g * w)
            acc = f.vadd(acc, f.vmul(word[rack * u + g], coeff))
        return acc

    def fold(self, word, w: int) -> FoldedView:
        p = self.params
        if not 0 <= w < p.u:
            raise CodeError(f"w = {w} outside [0, {p.u})")
        word = self._word(word)
        f = self.field
        nodes = np.stack([f.vmul(self.fold_weights(j, w), self.rack_sum(word, j, w)) for j in range(p.n_bar)])
        height = p.folded_height(w)
        par = tuple(self.folded_parity(j, height) for j in range(p.n_bar))
        return FoldedView(w, nodes, par, height)

    def folded_residual(self, view: FoldedView) -> Mat:
        Hbar = hconcat(list(view.parity))
        return matmul(Hbar, Mat._wrap(self.field, view.nodes.reshape(-1, 1)))

    def folded_mds_check(self, w: int, mode: str | int = "exhaustive", seed: int = 0) -> dict:
        p = self.params
        height = p.folded_height(w)
        subsets = _subsets(p.n_bar, height, mode, seed)
        if height == 0:
            return {"w": w, "subset_size": 0, "checked": 0, "singular": []}

        def ok(S):
            M = hconcat([self.folded_parity(j, height) for j in S])
            return det(M) != 0

        verdicts = pmap(ok, subsets)
        bad = [list(S) for S, good in zip(subsets, verdicts) if not good]
        return {"w": w, "subset_size": height, "checked": len(subsets), "singular": bad}

    def mds_sweep(self, word, mode: str | int = "exhaustive", seed: int = 0) -> dict:
        """Erase every (or a sample of) r-subset and compare the decode."""
        word = self._word(word)
        patterns = _subsets(self.n, self.params.r, mode, seed)

        def trial(F):
            erased = word.copy()
            erased[list(F)] = 0
            try:
                return bool(np.array_equal(self.erase_decode(erased, F), word))
            except CodeError:
                return False

        verdicts = pmap(trial, patterns)
        bad = [list(F) for F, good in zip(patterns, verdicts) if not good]
        return {"patterns": len(patterns), "passed": len(patterns) - len(bad), "failed": bad}


def _subsets(n: int, size: int, mode: str | int, seed: int) -> list[tuple[int, ...]]:
    if mode == "exhaustive":
        return list(itertools.combinations(range(n), size))
    count = int(mode)
    rng = random.Random(seed)
    seen: list[tuple[int, ...]] = []
    total = 1
    for i in range(size):
        total = total * (n - i) // (i + 1)
    if count >= total:
        return list(itertools.combinations(range(n), size))
    picked = set()
    while len(seen) < count:
        S = tuple(sorted(rng.sample(range(n), size)))
        if S not in picked:
            picked.add(S)
            seen.append(S)
    return seen


def build(params: CodeParams, field: Field, lambdas: LambdaSet) -> RackCode:
    return RackCode(params, field, lambdas)


# codeword files

def write_codeword(path, code: RackCode, word) -> None:
    word = code._word(word)
    width = max(1, len(f"{code.field.q - 1:x}"))
    header = {"magic": CODEWORD_MAGIC, "version": CODEWORD_VERSION,
              "params_hash": code.fingerprint(), "field": code.field.to_json()}
    lines = [json.dumps(header, sort_keys=True)]
    lines += ["".join(f"{int(x):0{width}x}" for x in row) for row in word]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_codeword(path, code: RackCode) -> np.ndarray:
    with open(path) as fh:
        lines = fh.read().splitlines()
    header = json.loads(lines[0])
    if header.get("magic") != CODEWORD_MAGIC or header.get("version") != CODEWORD_VERSION:
        raise CodeError("not a codeword file")
    if header["params_hash"] != code.fingerprint():
        raise CodeError("codeword file belongs to a different code")
    width = max(1, len(f"{code.field.q - 1:x}"))
    rows = [[int(line[i : i + width], 16) for i in range(0, len(line), width)] for line in lines[1:]]
    return code._word(rows)
