"""Randomised identity suites for the structured builders.

Each suite draws random instances (digit count <= 3, group width <= 3,
moment height <= 3) and returns ``{"checked": n, "failed": [...]}``.
"""

from __future__ import annotations

import random
from typing import Callable

import numpy as np

from .gf import Field
from .kernels import KernelCtx, blowup, concat_blowup, concat_phi, moment_vector, phi, projection, repair_matrix
from .matrix import Mat, det, identity, kron, matmul, zeros

MAX_DIGITS = 3
MAX_WIDTH = 3
MAX_HEIGHT = 3


def _rand_mat(field: Field, rng: random.Random, rows: int, cols: int) -> Mat:
    return Mat(field, [[rng.randrange(field.q) for _ in range(cols)] for _ in range(rows)])


def _rand_ctx(field: Field, rng: random.Random, min_digits: int = 1) -> KernelCtx:
    return KernelCtx(field, rng.randint(1, MAX_WIDTH), rng.randint(min_digits, MAX_DIGITS))


def _points(field: Field, rng: random.Random, s: int) -> list[int]:
    return [rng.randrange(field.q) for _ in range(s)]


def digit_formula(ctx: KernelCtx, a: int, U: Mat) -> Mat:
    """Blow-up built entry by entry from base-s digits."""
    s, nt = ctx.s, ctx.ntilde
    bh, bw = U.rows // s, U.cols // s
    out = np.zeros((ctx.l * bh, ctx.l * bw), dtype=np.int64)
    for i in range(ctx.l):
        di = [(i // s ** z) % s for z in range(nt)]
        for j in range(ctx.l):
            dj = [(j // s ** z) % s for z in range(nt)]
            if all(di[z] == dj[z] for z in range(nt) if z != a):
                ia, ja = di[a], dj[a]
                out[i * bh : (i + 1) * bh, j * bw : (j + 1) * bw] = U.a[ia * bh : (ia + 1) * bh, ja * bw : (ja + 1) * bw]
    return Mat(ctx.field, out)


def suite_digit_formula(field: Field, rng: random.Random, trials: int) -> dict:
    failed = []
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        a = rng.randrange(ctx.ntilde)
        U = _rand_mat(field, rng, ctx.s * rng.randint(1, 2), ctx.s * rng.randint(1, 2))
        if blowup(ctx, a, U) != digit_formula(ctx, a, U):
            failed.append({"trial": k, "s": ctx.s, "ntilde": ctx.ntilde, "a": a})
    return {"checked": trials, "failed": failed}


def suite_homomorphism(field: Field, rng: random.Random, trials: int) -> dict:
    failed = []
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        a = rng.randrange(ctx.ntilde)
        h0, h1, h2 = (rng.randint(1, 2) for _ in range(3))
        U0 = _rand_mat(field, rng, ctx.s * h0, ctx.s * h1)
        U1 = _rand_mat(field, rng, ctx.s * h1, ctx.s * h2)
        if matmul(blowup(ctx, a, U0), blowup(ctx, a, U1)) != blowup(ctx, a, matmul(U0, U1)):
            failed.append({"trial": k, "s": ctx.s, "ntilde": ctx.ntilde, "a": a})
    return {"checked": trials, "failed": failed}


def _expected_moment(field: Field, lbar: int, x: int, t: int, sign: int = 1) -> Mat:
    L = moment_vector(field, x, t)
    M = kron(identity(field, lbar), L)
    return -M if sign < 0 else M


def suite_selector_identities(field: Field, rng: random.Random, trials: int) -> dict:
    """All three parts of both selector identities, every (a, b, z, h, e)."""
    failed = []
    checked = 0
    parts: dict[str, int] = {}
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        s, t = ctx.s, rng.randint(1, MAX_HEIGHT)
        xs = _points(field, rng, s)
        I_t = identity(field, t)
        Rt = {(a, z): repair_matrix(ctx, a, z) for a in range(ctx.ntilde) for z in range(s + 1)}
        zero = zeros(field, ctx.l_bar * t, ctx.l_bar)
        reduced = ctx.reduced() if ctx.ntilde > 1 else None
        for a in range(ctx.ntilde):
            for row in range(s + 1):
                left = kron(Rt[a, row], I_t)
                for hpos in range(s + 1):
                    Psi_a = blowup(ctx, a, phi(field, hpos, t, xs))
                    for z in range(s):
                        got = matmul(matmul(left, Psi_a), Rt[a, z].T)
                        if row < s and hpos == row:
                            want = _expected_moment(field, ctx.l_bar, xs[z], t, 1 if z == row else -1)
                            part = "select/1"
                        elif row < s:
                            want = _expected_moment(field, ctx.l_bar, xs[row], t) if z == row else zero
                            part = "select/2"
                        elif hpos == s:
                            want = _expected_moment(field, ctx.l_bar, xs[z], t)
                            part = "sum/1"
                        else:
                            want = _expected_moment(field, ctx.l_bar, xs[hpos], t) if z == hpos else zero
                            part = "sum/2"
                        checked += 1
                        parts[part] = parts.get(part, 0) + 1
                        if got != want:
                            failed.append({"trial": k, "part": part, "a": a, "row": row, "h": hpos, "z": z})
                    for e in range(ctx.ntilde):
                        if e == a:
                            continue
                        e_bar = e if e < a else e - 1
                        Psi_e = blowup(ctx, e, phi(field, hpos, t, xs))
                        reduced_psi = blowup(reduced, e_bar, phi(field, hpos, t, xs))
                        for z in range(s):
                            got = matmul(matmul(left, Psi_e), Rt[a, z].T)
                            if row < s:
                                want = reduced_psi if z == row else zero
                                part = "select/3"
                            else:
                                want = reduced_psi
                                part = "sum/3"
                            checked += 1
                            parts[part] = parts.get(part, 0) + 1
                            if got != want:
                                failed.append({"trial": k, "part": part, "a": a, "e": e, "row": row, "z": z})
    return {"checked": checked, "failed": failed, "instances": trials, "parts": dict(sorted(parts.items()))}


def suite_selector_partition(field: Field, rng: random.Random, trials: int) -> dict:
    failed = []
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        for a in range(ctx.ntilde):
            acc = zeros(field, ctx.l, ctx.l)
            for z in range(ctx.s):
                R = repair_matrix(ctx, a, z)
                acc = acc + matmul(R.T, R)
            if acc != identity(field, ctx.l):
                failed.append({"trial": k, "a": a})
    return {"checked": trials, "failed": failed}


def suite_invertibility_equivalence(field: Field, rng: random.Random, trials: int, u: int = 2) -> dict:
    failed = []
    counts = {"invertible": 0, "singular": 0}
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        s = ctx.s
        a = rng.randrange(ctx.ntilde)
        t = rng.randint(1, min(2, s + 1))
        bs = sorted(rng.sample(range(s + 1), t))
        gsets = [sorted(rng.sample(range(u), rng.randint(1, u))) for _ in bs]
        delta = sum(len(g) for g in gsets)
        # small pools make both outcomes common
        pool = [field.exp(i) for i in range(min(field.order, 2 * s * t + 2))]
        pts = [[rng.choice(pool) for _ in range(s)] for _ in bs]
        theta = field.exp(field.order // u) if field.order % u == 0 else 1
        small = det(concat_phi(field, bs, gsets, delta, pts, theta)) != 0
        big = det(concat_blowup(ctx, a, bs, gsets, delta, pts, theta)) != 0
        counts["invertible" if small else "singular"] += 1
        if small != big:
            failed.append({"trial": k, "bs": bs, "gsets": gsets})
    return {"checked": trials, "failed": failed, **counts}


def suite_projection(field: Field, rng: random.Random, trials: int) -> dict:
    """(I_l kron Q_w) Psi(phi^(r)(theta^g x)) = theta^(gw) Psi(phi^(m)(x^u)) Psi(diag(x^w))."""
    failed = []
    divisors = [d for d in range(1, 5) if field.order % d == 0]
    for k in range(trials):
        ctx = _rand_ctx(field, rng)
        s = ctx.s
        u = rng.choice(divisors)
        v = rng.randrange(u)
        r_bar = rng.randint(2, 3)
        r = (r_bar - 1) * u + (u - v)
        theta = field.exp(field.order // u)
        a = rng.randrange(ctx.ntilde)
        b = rng.randrange(s + 1)
        g = rng.randrange(u)
        w = rng.randrange(u)
        xs = _points(field, rng, s)
        tw = [field.mul(field.pow(theta, g), x) for x in xs]
        Q = projection(field, u, v, r, w)
        lhs = matmul(kron(identity(field, ctx.l), Q), blowup(ctx, a, phi(field, b, r, tw)))
        m = Q.rows
        D = Mat(field, np.diag([field.pow(x, w) for x in xs]))
        rhs = matmul(
            blowup(ctx, a, phi(field, b, m, [field.pow(x, u) for x in xs])),
            blowup(ctx, a, D),
        )
        rhs = Mat(field, field.vmul(rhs.a, field.pow(theta, g * w)))
        if lhs != rhs:
            failed.append({"trial": k, "u": u, "v": v, "w": w, "b": b})
    return {"checked": trials, "failed": failed}


SUITES: dict[str, Callable] = {
    "digit_formula": suite_digit_formula,
    "homomorphism": suite_homomorphism,
    "selector_identities": suite_selector_identities,
    "selector_partition": suite_selector_partition,
    "invertibility_equivalence": suite_invertibility_equivalence,
    "projection": suite_projection,
}


def run_all(field: Field, seed: int = 0, trials: int = 50) -> dict:
    out = {}
    for name, fn in SUITES.items():
        out[name] = fn(field, random.Random(f"{seed}:{name}"), trials)
    return out
