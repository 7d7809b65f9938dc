import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import example_parity_block
from rackmsr.codes import CodeError, RackCode, build, read_codeword, write_codeword
from rackmsr.kernels import projection
from rackmsr.lambdas import LambdaSet, search_field
from rackmsr.matrix import Mat, identity, kron
from rackmsr.params import derive

def _message(code, seed):
    return code.random_message(np.random.default_rng(seed))


def test_example_blocks_match_layout(example_code):
    f = example_code.field
    assert len(example_code.parity) == 8
    for node in range(8):
        assert example_code.parity[node].shape == (16, 4)
        assert np.array_equal(example_code.parity[node].a, example_parity_block(f, node))


def test_zero_message(example_code):
    word = example_code.encode(np.zeros(16, dtype=np.int64))
    assert not word.any()


def test_encode_round_trip(example_code):
    for seed in range(100):
        msg = _message(example_code, seed)
        word = example_code.encode(msg)
        assert example_code.is_codeword(word)
        assert np.array_equal(example_code.systematic_part(word), msg)


def test_flip_breaks_codeword(example_code):
    word = example_code.encode(_message(example_code, 1))
    rng = random.Random(2)
    for _ in range(20):
        bad = word.copy()
        i, j = rng.randrange(8), rng.randrange(4)
        bad[i, j] = example_code.field.add(int(bad[i, j]), rng.randrange(1, 27))
        assert not example_code.is_codeword(bad)


def test_residual_linearity(example_code):
    f = example_code.field
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.integers(0, 27, (8, 4))
        y = rng.integers(0, 27, (8, 4))
        assert example_code.parity_residual(f.vadd(x, y)) == (
            example_code.parity_residual(x) + example_code.parity_residual(y)
        )


def test_shape_errors(example_code):
    with pytest.raises(CodeError):
        example_code.encode(np.zeros(15, dtype=np.int64))
    with pytest.raises(CodeError):
        example_code.is_codeword(np.zeros((8, 3), dtype=np.int64))
    with pytest.raises(CodeError):
        example_code.erase_decode(np.zeros((8, 4), dtype=np.int64), [0, 1, 2, 3, 4])


def test_erasure_example(example_code):
    word = example_code.encode(_message(example_code, 4))
    damaged = word.copy()
    damaged[[0, 3, 4, 5]] = 0
    assert np.array_equal(example_code.erase_decode(damaged, [0, 3, 4, 5]), word)
    assert np.array_equal(example_code.erase_decode(word, []), word)


def test_all_erasure_patterns(example_code):
    word = example_code.encode(_message(example_code, 5))
    res = example_code.mds_sweep(word)
    assert res["patterns"] == 70 and res["failed"] == []


def test_shortened_code(shortened_code):
    code = shortened_code
    p = code.params
    assert p.parent_n_bar == 4 and p.n_bar == 3 and code.shortened
    assert len(code.parity) == 3 * p.u
    assert code.parent_block(4 * p.u - 1).shape == code.parity[0].shape
    with pytest.raises(CodeError):
        code.parent_block(4 * p.u)
    word = code.encode(_message(code, 6))
    res = code.mds_sweep(word)
    assert res["patterns"] == 15 and res["failed"] == []


def test_single_width_degenerate():
    p = derive(8, 4, 2, 2)
    field, lset = search_field(p)
    code = build(p, field, lset)
    assert code.l == 1
    for blk in code.parity:
        assert blk.shape == (p.r, 1)
    word = code.encode(_message(code, 7))
    assert code.mds_sweep(word)["failed"] == []


def test_fold_with_one_node_per_rack():
    p = derive(4, 2, 1, 3)
    field, lset = search_field(p)
    code = build(p, field, lset)
    word = code.encode(_message(code, 8))
    view = code.fold(word, 0)
    assert np.array_equal(view.nodes, word)
    assert code.folded_residual(view).is_zero()


def test_example_fold_formula(example_code):
    f = example_code.field
    word = example_code.encode(_message(example_code, 9))
    for w in range(2):
        sign = f.pow(f.neg(1), w)
        summed = f.vadd(word[0], f.vmul(word[1], sign))
        lam = [f.pow(f.exp(i), w) for i in range(2)]
        diag = np.array([lam[0], lam[1], lam[0], lam[1]], dtype=np.int64)
        assert np.array_equal(example_code.fold(word, w).nodes[0], f.vmul(diag, summed))
    with pytest.raises(CodeError):
        example_code.fold(word, 2)


@pytest.mark.parametrize("name", ["example_code", "t1_v1_code", "t2_code", "shortened_code"])
def test_folded_residual_zero(name, request):
    code = request.getfixturevalue(name)
    for seed in range(10):
        word = code.encode(_message(code, seed))
        for w in range(code.params.u):
            assert code.folded_residual(code.fold(word, w)).is_zero()


@pytest.mark.parametrize("name", ["example_code", "t1_v1_code", "t2_code"])
def test_projection_commutes_with_fold(name, request):
    code = request.getfixturevalue(name)
    p, f = code.params, code.field
    rng = np.random.default_rng(10)
    for _ in range(5):
        word = rng.integers(0, f.q, (p.n, p.l))
        full = code.parity_residual(word)
        for w in range(p.u):
            Q = projection(f, p.u, p.v, p.r, w)
            assert kron(identity(f, p.l), Q) @ full == code.folded_residual(code.fold(word, w))


def test_folded_mds(example_code, t1_v1_code):
    rep = example_code.folded_mds_check(0)
    assert (rep["subset_size"], rep["checked"], rep["singular"]) == (2, 6, [])
    for w in range(2):
        assert t1_v1_code.folded_mds_check(w)["singular"] == []
    # v = 1: the second fold has one fewer row of blocks
    assert t1_v1_code.folded_mds_check(1)["subset_size"] == t1_v1_code.params.r_bar - 1


def test_folded_mds_detects_corruption(example_code):
    lams = list(example_code.lambdas.lambdas)
    # rack 1's first column then cancels rack 0's second in the {0, 1} subset
    lams[2] = lams[1]
    bad = RackCode(example_code.params, example_code.field, LambdaSet(tuple(lams), example_code.lambdas.theta, "explicit"))
    assert [0, 1] in bad.folded_mds_check(0)["singular"]


def test_lambda_count_mismatch(example_code):
    short = LambdaSet(example_code.lambdas.lambdas[:6], example_code.lambdas.theta, "explicit")
    with pytest.raises(CodeError):
        RackCode(example_code.params, example_code.field, short)
    wrong_theta = LambdaSet(example_code.lambdas.lambdas, 1, "explicit")
    with pytest.raises(CodeError):
        RackCode(example_code.params, example_code.field, wrong_theta)


def test_codeword_file_round_trip(tmp_path, example_code, t1_v1_code):
    word = example_code.encode(_message(example_code, 11))
    path = tmp_path / "word.txt"
    write_codeword(path, example_code, word)
    assert np.array_equal(read_codeword(path, example_code), word)
    lines = path.read_text().splitlines()
    assert len(lines) == 9 and all(len(x) == 8 for x in lines[1:])
    with pytest.raises(CodeError):
        read_codeword(path, t1_v1_code)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_encode_is_linear(example_code, s1, s2):
    f = example_code.field
    m1, m2 = _message(example_code, s1), _message(example_code, s2)
    assert np.array_equal(example_code.encode(f.vadd(m1, m2)), f.vadd(example_code.encode(m1), example_code.encode(m2)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sets(st.integers(0, 11), min_size=1, max_size=7))
def test_erasure_decode_random(t1_v1_code, seed, erased):
    code = t1_v1_code
    word = code.encode(_message(code, seed))
    damaged = word.copy()
    damaged[sorted(erased)] = 0
    assert np.array_equal(code.erase_decode(damaged, erased), word)
