"""Coefficient selection under the local invertibility constraints.

Each group of racks owns ``group * s`` coefficients; rack ``j`` of the parent
code evaluates at ``lambdas[j*s : (j+1)*s]``. Two constraint families must
hold inside every group:

* twisted: for every nonempty rack subset B and nonempty exponent sets G_b,
  the concatenation of kernel maps at the points theta^g * lambda is square
  and invertible;
* power: the untwisted concatenation at the u-th powers is invertible for
  every nonempty B.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .gf import Field, element_of_order, make_field, prime_power
from .kernels import concat_phi
from .matrix import Mat, det
from .params import CodeParams

ENUMERATION_CAP = 8


class LambdaError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class LambdaExhausted(LambdaError):
    def __init__(self, message: str):
        super().__init__("exhausted", message)


@dataclass(frozen=True)
class ConstraintCase:
    group: int
    bs: tuple[int, ...]
    gsets: tuple[tuple[int, ...], ...]
    family: str

    @property
    def t(self) -> int:
        return len(self.bs)

    @property
    def delta(self) -> int:
        return sum(len(g) for g in self.gsets)

    def describe(self) -> str:
        parts = ", ".join(f"{b}:{list(g)}" for b, g in zip(self.bs, self.gsets))
        return f"group {self.group} {self.family} {{{parts}}}"


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    checked: int
    failing: ConstraintCase | None = None
    reason: str = ""


@dataclass(frozen=True)
class LambdaSet:
    lambdas: tuple[int, ...]
    theta: int
    mode: str
    strategy: str | None = None
    seed: int | None = None
    verified: tuple[str, ...] = ("twisted", "power")

    def rack_points(self, rack: int, s: int) -> tuple[int, ...]:
        return self.lambdas[rack * s : (rack + 1) * s]

    def to_json(self, field: Field) -> dict:
        return {
            "mode": self.mode,
            "strategy": self.strategy,
            "seed": self.seed,
            "theta": field.log(self.theta),
            "lambdas": [field.log(x) for x in self.lambdas],
            "verified": list(self.verified),
        }

    @classmethod
    def from_json(cls, field: Field, data: dict) -> "LambdaSet":
        return cls(
            lambdas=tuple(field.exp(i) for i in data["lambdas"]),
            theta=field.exp(data["theta"]),
            mode=data["mode"],
            strategy=data.get("strategy"),
            seed=data.get("seed"),
            verified=tuple(data.get("verified", ())),
        )


def _check_cap(params: CodeParams) -> None:
    if params.group * params.u > ENUMERATION_CAP:
        raise LambdaError(
            "enumeration_cap",
            f"group*u = {params.group * params.u} exceeds the enumeration cap {ENUMERATION_CAP}",
        )


def group_cases(params: CodeParams, a: int = 0) -> list[ConstraintCase]:
    """All constraint cases for one group, twisted family first."""
    _check_cap(params)
    nonempty_g = [
        tuple(g) for size in range(1, params.u + 1) for g in itertools.combinations(range(params.u), size)
    ]
    subsets = [
        bs for t in range(1, params.group + 1) for bs in itertools.combinations(range(params.group), t)
    ]
    cases = []
    for bs in subsets:
        for gsets in itertools.product(nonempty_g, repeat=len(bs)):
            cases.append(ConstraintCase(a, bs, gsets, "twisted"))
    for bs in subsets:
        cases.append(ConstraintCase(a, bs, ((0,),) * len(bs), "power"))
    return cases


def enumerate_constraints(params: CodeParams) -> list[ConstraintCase]:
    groups = params.parent_n_bar // params.group
    return [c for a in range(groups) for c in group_cases(params, a)]


def case_matrix(params: CodeParams, field: Field, case: ConstraintCase, group_lams: Sequence[int], theta: int) -> Mat:
    s = params.s
    pts = [list(group_lams[b * s : (b + 1) * s]) for b in case.bs]
    if case.family == "twisted":
        return concat_phi(field, case.bs, case.gsets, case.delta, pts, theta)
    powered = [[field.pow(x, params.u) for x in xs] for xs in pts]
    return concat_phi(field, case.bs, case.gsets, case.t, powered, 1)


def _distinct(params: CodeParams, field: Field, lams: Sequence[int], theta: int) -> str:
    orbit = [field.mul(field.pow(theta, g), x) for x in lams for g in range(params.u)]
    if 0 in lams or len(set(orbit)) != len(orbit):
        return "theta-orbits are not distinct"
    powers = [field.pow(x, params.u) for x in lams]
    if len(set(powers)) != len(powers):
        return "u-th powers are not distinct"
    return ""


def check_constraints(
    params: CodeParams,
    field: Field,
    candidate: Sequence[int],
    theta: int,
    cases: Sequence[ConstraintCase] | None = None,
) -> CheckResult:
    need = params.group * params.s
    if len(candidate) != need:
        raise LambdaError("candidate_size", f"expected {need} coefficients, got {len(candidate)}")
    if cases is None:
        cases = group_cases(params)
    for i, case in enumerate(cases):
        if det(case_matrix(params, field, case, candidate, theta)) == 0:
            return CheckResult(False, i + 1, case, "singular")
    reason = _distinct(params, field, candidate, theta)
    if reason:
        return CheckResult(False, len(cases), None, reason)
    return CheckResult(True, len(cases))


def verify_lambdas(params: CodeParams, field: Field, lset: LambdaSet) -> CheckResult:
    """Check every group and the global distinctness conditions."""
    need = params.parent_n_bar * params.s
    if len(lset.lambdas) != need:
        raise LambdaError("lambda_count", f"expected {need} coefficients, got {len(lset.lambdas)}")
    reason = _distinct(params, field, lset.lambdas, lset.theta)
    if reason:
        return CheckResult(False, 0, None, reason)
    total = 0
    per = params.group * params.s
    for a in range(params.parent_n_bar // params.group):
        res = check_constraints(params, field, lset.lambdas[a * per : (a + 1) * per], lset.theta,
                                group_cases(params, a))
        total += res.checked
        if not res.ok:
            return CheckResult(False, total, res.failing, res.reason)
    return CheckResult(True, total)


def _theta(params: CodeParams, field: Field) -> int:
    if field.order % params.u:
        raise LambdaError("u_divides_q", f"u = {params.u} does not divide q-1 = {field.order}")
    return element_of_order(field, params.u)


def pool(params: CodeParams, field: Field) -> list[int]:
    return [field.exp(alpha) for alpha in range(field.order // params.u)]


def explicit_lambdas(params: CodeParams, field: Field) -> LambdaSet:
    theta = _theta(params, field)
    count = params.parent_n_bar * params.s
    if count * params.u > field.order:
        raise LambdaError("collision", f"n*s = {count * params.u} exceeds q-1 = {field.order}")
    lset = LambdaSet(tuple(field.exp(i) for i in range(count)), theta, "explicit")
    res = verify_lambdas(params, field, lset)
    if not res.ok:
        what = res.failing.describe() if res.failing else res.reason
        raise LambdaError("constraint", f"explicit coefficients fail: {what}")
    return lset


def _by_last_rack(cases: Sequence[ConstraintCase], group: int) -> list[list[ConstraintCase]]:
    out: list[list[ConstraintCase]] = [[] for _ in range(group)]
    for c in cases:
        out[c.bs[-1]].append(c)
    return out


def _greedy_group(params, field, theta, avail, cases, budget):
    s, group = params.s, params.group
    staged = _by_last_rack(cases, group)
    chosen: list[int] = []

    def place(b: int) -> bool:
        if b == group:
            return True
        used = set(chosen)
        free = [x for x in avail if x not in used]
        for combo in itertools.combinations(free, s):
            budget[0] -= 1
            if budget[0] < 0:
                raise LambdaExhausted("greedy search hit its try budget; increase q or tries")
            chosen.extend(combo)
            padded = chosen + [0] * (group * s - len(chosen))
            if not _distinct(params, field, chosen, theta) and all(
                det(case_matrix(params, field, c, padded, theta)) != 0 for c in staged[b]
            ):
                if place(b + 1):
                    return True
            del chosen[-s:]
        return False

    return list(chosen) if place(0) else None


def search_lambdas(
    params: CodeParams,
    field: Field,
    strategy: str = "greedy",
    seed: int = 0,
    max_tries: int = 20000,
) -> LambdaSet:
    theta = _theta(params, field)
    groups = params.parent_n_bar // params.group
    per = params.group * params.s
    avail = pool(params, field)
    if len(avail) < groups * per:
        raise LambdaExhausted(
            f"pool of {len(avail)} elements cannot supply {groups * per} coefficients; increase q"
        )
    chosen: list[int] = []
    rng = random.Random(seed)
    budget = [max_tries]
    for a in range(groups):
        cases = group_cases(params, a)
        if strategy == "greedy":
            picked = _greedy_group(params, field, theta, avail, cases, budget)
        elif strategy == "random":
            picked = None
            for _ in range(max_tries):
                cand = rng.sample(avail, per)
                if check_constraints(params, field, cand, theta, cases).ok:
                    picked = cand
                    break
        else:
            raise LambdaError("strategy", f"unknown strategy {strategy!r}")
        if picked is None:
            raise LambdaExhausted(f"no valid coefficients for group {a}; increase q or tries")
        chosen.extend(picked)
        taken = set(picked)
        avail = [x for x in avail if x not in taken]
    lset = LambdaSet(tuple(chosen), theta, "searched", strategy, seed if strategy == "random" else None)
    res = verify_lambdas(params, field, lset)
    if not res.ok:  # pool elements have distinct orbits, so this is a bug
        raise LambdaError("constraint", f"search produced an invalid set: {res.reason}")
    return lset


def candidate_fields(params: CodeParams, max_q: int = 1 << 12):
    """Prime powers q with u | q-1 and a pool large enough, in increasing order."""
    need = params.parent_n_bar * params.s * params.u + 1
    for q in range(max(need, 3), max_q + 1):
        pm = prime_power(q)
        if pm and (q - 1) % params.u == 0:
            yield pm


def search_field(
    params: CodeParams,
    strategy: str = "greedy",
    seed: int = 0,
    max_tries: int = 20000,
    max_q: int = 1 << 12,
) -> tuple[Field, LambdaSet]:
    """Smallest default-modulus field where coefficient search succeeds."""
    for p, m in candidate_fields(params, max_q):
        field = make_field(p, m)
        try:
            return field, search_lambdas(params, field, strategy, seed, max_tries)
        except LambdaExhausted:
            continue
    raise LambdaExhausted(f"no field with q <= {max_q} admits valid coefficients")
