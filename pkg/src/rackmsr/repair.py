"""Intra-rack repair of h failed nodes from d_bar helper racks.

For each w in [h] the host recovers its folded vector from one selected
slice (l/s symbols) per scheduled helper rack, by solving a punctured
parity system. Unfolding and a Vandermonde solve in theta then give back
the failed nodes. Bandwidth counts symbols crossing rack boundaries;
access counts distinct helper symbols read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .codes import RackCode
from .matrix import Mat, SingularMatrixError, hconcat, identity, inverse, kron, matmul, solve
from .kernels import repair_matrix
from .params import access_bound, bandwidth_bound


class RepairError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class RepairPlan:
    host: int
    a: int
    b: int
    failed: tuple[int, ...]
    local: tuple[int, ...]
    helpers: tuple[int, ...]
    extra: int | None
    schedule: tuple[tuple[int, ...], ...]
    last_position: bool
    in_group: tuple[int, ...] = ()
    out_group: tuple[int, ...] = ()

    @property
    def h(self) -> int:
        return len(self.failed)

    def to_json(self) -> dict:
        return {
            "host": self.host, "failed": list(self.failed), "helpers": list(self.helpers),
            "extra": self.extra, "schedule": [list(s) for s in self.schedule],
            "last_position": self.last_position,
            "in_group": list(self.in_group), "out_group": list(self.out_group),
        }


@dataclass
class RepairResult:
    recovered: dict[int, np.ndarray]
    bandwidth: int
    access: int
    per_rack_alpha: dict[int, int]
    bound_bw: int
    bound_access: Fraction
    optimal_bw: bool
    optimal_access: bool
    ratio: Fraction

    def to_json(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "access": self.access,
            "per_rack_alpha": {str(k): v for k, v in sorted(self.per_rack_alpha.items())},
            "bound_bw": self.bound_bw,
            "bound_access": str(self.bound_access),
            "optimal_bw": self.optimal_bw,
            "optimal_access": self.optimal_access,
            "ratio": str(self.ratio),
        }


@dataclass
class Ledger:
    """Running bandwidth and access counters for one repair."""

    per_rack: dict[int, int] = dc_field(default_factory=dict)
    reads: set = dc_field(default_factory=set)

    @property
    def bandwidth(self) -> int:
        return sum(self.per_rack.values())

    @property
    def access(self) -> int:
        return len(self.reads)


def plan(code: RackCode, host: int, failed: Sequence[int], helpers: Sequence[int], extra=None) -> RepairPlan:
    """Validate a repair geometry. ``extra`` may be a rack, "auto" or None."""
    p = code.params
    if not 0 <= host < p.n_bar:
        raise RepairError("host", f"host rack {host} outside [0, {p.n_bar})")
    I = tuple(sorted(set(int(g) for g in failed)))
    if not I:
        raise RepairError("failed", "no failed nodes given")
    if len(I) != len(failed) or any(not 0 <= g < p.u for g in I):
        raise RepairError("failed", f"failed positions must be distinct values in [0, {p.u})")
    h = len(I)
    if h > p.h_max:
        raise RepairError("h_range", f"h = {h} exceeds h_max = {p.h_max}")
    H = tuple(sorted(set(int(j) for j in helpers)))
    if len(H) != len(helpers):
        raise RepairError("helpers", "helper racks repeat")
    if host in H:
        raise RepairError("helpers", "the host rack cannot help itself")
    if any(not 0 <= j < p.n_bar for j in H):
        raise RepairError("helpers", f"helper racks must lie in [0, {p.n_bar})")
    if len(H) != p.d_bar:
        raise RepairError("helpers", f"need exactly d_bar = {p.d_bar} helper racks, got {len(H)}")
    base = p.u - p.v
    if h > base:
        if extra is None:
            raise RepairError("extra", f"h = {h} > u-v = {base} needs one extra helper rack")
        spare = [j for j in range(p.n_bar) if j != host and j not in H]
        if extra == "auto":
            if not spare:
                raise RepairError("extra", "no surviving rack left to serve as the extra helper")
            extra = spare[0]
        extra = int(extra)
        if extra not in spare:
            raise RepairError("extra", f"extra helper {extra} must be a surviving non-helper rack")
    else:
        if extra not in (None, "auto"):
            raise RepairError("extra", f"h = {h} <= u-v = {base} takes no extra helper")
        extra = None
    schedule = tuple(H if w < base else tuple(sorted(H + (extra,))) for w in range(h))
    a, b = p.rack_position(host)
    last = b == p.s
    in_group = out_group = ()
    if last:
        racks = sorted(set(H) | ({extra} if extra is not None else set()))
        in_group = tuple(j for j in racks if p.rack_position(j)[0] == a)
        out_group = tuple(j for j in racks if p.rack_position(j)[0] != a)
    local = tuple(g for g in range(p.u) if g not in I)
    return RepairPlan(host, a, b, I, local, H, extra, schedule, last, in_group, out_group)


# selectors

def _coords(code: RackCode, a: int, z: int) -> np.ndarray:
    """Coordinates with digit a equal to z, in selector row order."""
    s = code.params.s
    return np.flatnonzero((np.arange(code.l) // s ** a) % s == z)


def _selector(code: RackCode, pl: RepairPlan, rack: int) -> int:
    """Which R_{a,z} the host wants from a rack; z = s means the digit sum."""
    if not pl.last_position:
        return pl.b
    a_j, b_j = code.params.rack_position(rack)
    return b_j if a_j == pl.a else code.params.s


def _apply_selector(code: RackCode, a: int, z: int, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(selected vector, coordinates read)."""
    s = code.params.s
    if z < s:
        idx = _coords(code, a, z)
        return vec[idx], idx
    f = code.field
    out = np.zeros(code.params.l_bar, dtype=np.int64)
    for zz in range(s):
        out = f.vadd(out, vec[_coords(code, a, zz)])
    return out, np.arange(code.l)


def helper_payload(code: RackCode, word, rack: int, pl: RepairPlan, w: int, ledger: Ledger | None = None) -> np.ndarray:
    if not 0 <= w < pl.h or rack not in pl.schedule[w]:
        raise RepairError("unscheduled", f"rack {rack} is not scheduled for w = {w}")
    word = np.asarray(word, dtype=np.int64)
    f, u = code.field, code.params.u
    z = _selector(code, pl, rack)
    theta = code.lambdas.theta
    out = np.zeros(code.params.l_bar, dtype=np.int64)
    for g in range(u):
        sel, read = _apply_selector(code, pl.a, z, word[rack * u + g])
        out = f.vadd(out, f.vmul(sel, f.pow(theta, g * w)))
        if ledger is not None:
            ledger.reads.update((rack * u + g, int(c)) for c in read)
    if ledger is not None:
        ledger.per_rack[rack] = ledger.per_rack.get(rack, 0) + out.size
    return out


def _payload_weights(code: RackCode, pl: RepairPlan, rack: int, w: int) -> np.ndarray:
    """Turns a raw payload into the selected slice of the folded vector."""
    z = _selector(code, pl, rack)
    weights = code.fold_weights(rack, w)
    return weights[_coords(code, pl.a, 0 if z == code.params.s else z)]


def _column_selector(code: RackCode, pl: RepairPlan, rack: int) -> Mat:
    z = _selector(code, pl, rack)
    return repair_matrix(code.ctx, pl.a, 0 if z == code.params.s else z)


def _system(code: RackCode, pl: RepairPlan, height: int, known: tuple[int, ...]):
    """Punctured system: (matrix over unknowns, X blocks of the known racks)."""
    key = ("sys", pl.host, pl.last_position, height, known)
    cache = code.__dict__.setdefault("_repair_cache", {})
    if key in cache:
        return cache[key]
    p, ctx = code.params, code.ctx
    S = repair_matrix(ctx, pl.a, p.s if pl.last_position else pl.b)
    SI = kron(S, identity(code.field, height))
    host_rows = matmul(SI, code.folded_parity(pl.host, height))
    unknown = [matmul(host_rows, repair_matrix(ctx, pl.a, z).T) for z in range(p.s)]
    X = {}
    for j in range(p.n_bar):
        if j == pl.host:
            continue
        rows = matmul(SI, code.folded_parity(j, height))
        C = _column_selector(code, pl, j)
        Xj = matmul(rows, C.T)
        # the rows seen by the host only depend on the selected slice
        if not matmul(Xj, _full_selector(code, pl, j)) == rows:
            raise RepairError("consistency", f"rack {j} does not factor through its selector")
        X[j] = Xj
    others = [j for j in range(p.n_bar) if j != pl.host and j not in known]
    A = hconcat(unknown + [X[j] for j in others])
    try:
        Ainv = inverse(A) if A.rows == A.cols else None
    except SingularMatrixError as exc:
        raise RepairError("singular", "punctured system is singular") from exc
    cache[key] = (A, Ainv, X)
    return cache[key]


def _full_selector(code: RackCode, pl: RepairPlan, rack: int) -> Mat:
    return repair_matrix(code.ctx, pl.a, _selector(code, pl, rack))


def recover_folded(code: RackCode, pl: RepairPlan, w: int, payloads: Mapping[int, np.ndarray]) -> np.ndarray:
    p, f = code.params, code.field
    known = pl.schedule[w]
    if set(payloads) != set(known):
        raise RepairError("payloads", f"expected payloads from racks {list(known)}")
    height = p.folded_height(w)
    A, Ainv, X = _system(code, pl, height, known)
    rhs = np.zeros(A.rows, dtype=np.int64)
    for j in known:
        slice_ = f.vmul(_payload_weights(code, pl, j, w), np.asarray(payloads[j], dtype=np.int64))
        rhs = f.vsub(rhs, matmul(X[j], Mat._wrap(f, slice_.reshape(-1, 1))).a[:, 0])
    b = Mat._wrap(f, rhs.reshape(-1, 1))
    x = matmul(Ainv, b) if Ainv is not None else solve(A, b)
    sol = x.a[:, 0]
    out = np.zeros(code.l, dtype=np.int64)
    lb = p.l_bar
    for z in range(p.s):
        out[_coords(code, pl.a, z)] = sol[z * lb : (z + 1) * lb]
    return out


def finish(code: RackCode, pl: RepairPlan, folded: Mapping[int, np.ndarray], local: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    f, u = code.field, code.params.u
    theta = code.lambdas.theta
    eta = []
    for w in range(pl.h):
        inv_w = f.vpow(code.fold_weights(pl.host, w), -1)
        e = f.vmul(inv_w, np.asarray(folded[w], dtype=np.int64))
        for g in pl.local:
            e = f.vsub(e, f.vmul(np.asarray(local[g], dtype=np.int64), f.pow(theta, g * w)))
        eta.append(e)
    V = Mat(f, [[f.pow(theta, g * w) for g in pl.failed] for w in range(pl.h)])
    try:
        nodes = solve(V, Mat(f, np.stack(eta)))
    except SingularMatrixError as exc:
        raise RepairError("vandermonde", "theta powers of the failed positions collide") from exc
    return {g: nodes.a[i].copy() for i, g in enumerate(pl.failed)}


def repair(code: RackCode, word, pl: RepairPlan) -> RepairResult:
    p = code.params
    word = np.array(word, dtype=np.int64, copy=True)
    for g in pl.failed:
        word[pl.host * p.u + g] = 0  # the failed contents are never read
    ledger = Ledger()
    folded = {}
    for w in range(pl.h):
        payloads = {j: helper_payload(code, word, j, pl, w, ledger) for j in pl.schedule[w]}
        folded[w] = recover_folded(code, pl, w, payloads)
    local = {g: word[pl.host * p.u + g] for g in pl.local}
    recovered = finish(code, pl, folded, local)
    bw_bound = bandwidth_bound(p, pl.h)
    acc_bound = access_bound(p, pl.h)
    return RepairResult(
        recovered=recovered,
        bandwidth=ledger.bandwidth,
        access=ledger.access,
        per_rack_alpha=dict(ledger.per_rack),
        bound_bw=bw_bound,
        bound_access=acc_bound,
        optimal_bw=ledger.bandwidth == bw_bound,
        optimal_access=ledger.access == acc_bound,
        ratio=Fraction(ledger.bandwidth, bw_bound),
    )


def result_json(result: RepairResult) -> str:
    return json.dumps(result.to_json(), sort_keys=True)
