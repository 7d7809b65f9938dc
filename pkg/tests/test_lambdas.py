import random

import pytest

from oracles import det_column_elim
from rackmsr.gf import make_field
from rackmsr.kernels import KernelCtx, concat_blowup
from rackmsr.lambdas import (
    ConstraintCase, LambdaError, LambdaExhausted, LambdaSet, case_matrix, check_constraints,
    enumerate_constraints, explicit_lambdas, group_cases, pool, search_lambdas, search_field, verify_lambdas,
)
from rackmsr.matrix import det
from rackmsr.params import derive

F27 = make_field(3, 3, [1, 2, 0, 1])
EX = derive(8, 4, 2, 3)


def test_case_counts_example():
    cases = group_cases(EX)
    assert sum(c.family == "twisted" for c in cases) == 15
    assert sum(c.family == "power" for c in cases) == 3
    assert len(enumerate_constraints(EX)) == 2 * 18
    assert all(c.delta >= c.t >= 1 for c in cases)


def test_case_counts_degenerate():
    p = derive(4, 2, 1, 2)  # s = 1, u = 1
    cases = group_cases(p)
    assert [c.family for c in cases] == ["twisted", "power"]


def test_example_case_is_enumerated():
    assert ConstraintCase(0, (0, 1), ((0,), (1,)), "twisted") in group_cases(EX)


def test_enumeration_cap():
    with pytest.raises(LambdaError) as exc:
        group_cases(derive(24, 8, 4, 4))
    assert exc.value.code == "enumeration_cap"


def test_example_coefficients_pass():
    theta = F27.neg(1)
    lams = [F27.exp(i) for i in range(8)]
    for a in range(2):
        res = check_constraints(EX, F27, lams[4 * a : 4 * a + 4], theta, group_cases(EX, a))
        assert res.ok and res.checked == 18


def test_repeated_element_fails():
    theta = F27.neg(1)
    cand = [F27.exp(i) for i in (0, 1, 2, 2)]
    assert not check_constraints(EX, F27, cand, theta).ok


def test_candidate_size_error():
    with pytest.raises(LambdaError):
        check_constraints(EX, F27, [1, 2, 3], F27.neg(1))


def test_explicit_example():
    lset = explicit_lambdas(EX, F27)
    assert lset.lambdas == tuple(F27.exp(i) for i in range(8))
    assert lset.theta == F27.neg(1)
    assert verify_lambdas(EX, F27, lset).ok


def test_explicit_collision():
    with pytest.raises(LambdaError) as exc:
        explicit_lambdas(EX, make_field(13))
    assert exc.value.code == "collision"


def test_search_example_field():
    lset = search_lambdas(EX, F27, "greedy")
    assert verify_lambdas(EX, F27, lset).ok
    allowed = set(pool(EX, F27))
    assert set(lset.lambdas) <= allowed


def test_small_field_exhausts():
    with pytest.raises(LambdaExhausted) as exc:
        search_lambdas(EX, make_field(7), "greedy")
    assert exc.value.code == "exhausted"


def test_u_must_divide_order():
    with pytest.raises(LambdaError) as exc:
        search_lambdas(derive(9, 3, 3, 2), make_field(3, 3))
    assert exc.value.code == "u_divides_q"


def test_search_is_deterministic():
    a = search_lambdas(EX, F27, "random", seed=5, max_tries=5000)
    b = search_lambdas(EX, F27, "random", seed=5, max_tries=5000)
    assert a == b and a.seed == 5
    assert search_lambdas(EX, F27) == search_lambdas(EX, F27)


def test_json_round_trip():
    lset = explicit_lambdas(EX, F27)
    assert LambdaSet.from_json(F27, lset.to_json(F27)) == lset


def test_alternative_determinant_agrees():
    rng = random.Random(0)
    theta = F27.neg(1)
    cands = pool(EX, F27)
    cases = group_cases(EX)
    for _ in range(15):
        cand = rng.sample(cands, 4)
        res = check_constraints(EX, F27, cand, theta, cases)
        oracle = all(det_column_elim(F27, case_matrix(EX, F27, c, cand, theta).tolist()) != 0 for c in cases)
        if oracle:  # the distinctness conditions are checked on top of the determinants
            assert res.ok or res.failing is None
        else:
            assert not res.ok and res.failing is not None


def test_blowup_equivalence_sampled():
    rng = random.Random(1)
    theta = F27.neg(1)
    ctx = KernelCtx(F27, EX.s, EX.ntilde)
    cases = [c for c in group_cases(EX) if c.family == "twisted"]
    for _ in range(20):
        cand = [rng.randrange(1, 27) for _ in range(4)]
        c = rng.choice(cases)
        small = det(case_matrix(EX, F27, c, cand, theta)) != 0
        pts = [cand[b * 2 : b * 2 + 2] for b in c.bs]
        big = det(concat_blowup(ctx, rng.randrange(2), c.bs, c.gsets, c.delta, pts, theta)) != 0
        assert small == big


def _invariants(params, field, lset):
    u = params.u
    orbit = [field.mul(field.pow(lset.theta, g), x) for x in lset.lambdas for g in range(u)]
    assert len(set(orbit)) == len(orbit)
    powers = [field.pow(x, u) for x in lset.lambdas]
    assert len(set(powers)) == len(powers)
    assert set(lset.lambdas) <= set(pool(params, field))
    for a in range(params.parent_n_bar // params.group):
        per = params.group * params.s
        cand = lset.lambdas[a * per : (a + 1) * per]
        for c in group_cases(params, a):
            assert det(case_matrix(params, field, c, cand, lset.theta)) != 0


def test_t2_explicit_or_fallback(t2_code):
    params, field = t2_code.params, t2_code.field
    try:
        explicit = explicit_lambdas(params, field)
        _invariants(params, field, explicit)
    except LambdaError as exc:
        assert exc.code in ("constraint", "collision")
    _invariants(params, field, t2_code.lambdas)


def test_searched_sets_satisfy_invariants(t1_v1_code, shortened_code):
    for code in (t1_v1_code, shortened_code):
        _invariants(code.params, code.field, code.lambdas)


def test_search_field_minimal():
    field, lset = search_field(EX)
    assert field.q >= EX.parent_n_bar * EX.s * EX.u + 1
    assert verify_lambdas(EX, field, lset).ok
