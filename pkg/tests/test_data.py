import struct

import numpy as np
import pytest

from sketchls import (LSProblem, ProblemFormatError, SyntheticSpec, gen_synthetic, load_libsvm,
                      load_problem, read_problem, solve_exact_ls, write_problem)
from sketchls.data import MAGIC, multivariate_t, synthetic_factors, true_coefficients

from conftest import random_problem


def cond_gram(A):
    s = np.linalg.svd(A, compute_uv=False)
    return (s[0] / s[-1]) ** 2


@pytest.mark.parametrize("cond, expected", [("well", 1e2), ("ill", 1e12)])
def test_condition_numbers(cond, expected):
    p = gen_synthetic(SyntheticSpec(1000, 100, cond, seed=3))
    assert cond_gram(p.A) == pytest.approx(expected, rel=0.01)


def test_ill_spectrum_ratio_exact():
    _, sigma, _, _, _ = synthetic_factors(SyntheticSpec(200, 100, "ill"))
    assert sigma[0] / sigma[-1] == pytest.approx(1e6, rel=1e-12)
    assert sigma[0] == 1.0


@pytest.mark.parametrize("cond", ["well", "ill"])
def test_factors_orthonormal_and_spectrum_exact(cond):
    spec = SyntheticSpec(800, 20, cond, seed=9)
    U, sigma, V, _, _ = synthetic_factors(spec)
    assert U.shape == (800, 20) and V.shape == (20, 20)
    np.testing.assert_allclose(U.T @ U, np.eye(20), rtol=0, atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(20), rtol=0, atol=1e-10)
    s = np.linalg.svd(gen_synthetic(spec).A, compute_uv=False)
    np.testing.assert_allclose(s, np.sort(sigma)[::-1], rtol=1e-10)


def test_noiseless_recovers_coefficients():
    p = gen_synthetic(SyntheticSpec(500, 10, "well", noise_tau=0.0, seed=1))
    x = solve_exact_ls(p)
    np.testing.assert_allclose(x, true_coefficients(10), rtol=0, atol=1e-6)


def test_small_noise_stays_close():
    p = gen_synthetic(SyntheticSpec(2000, 10, "well", noise_tau=1e-6, seed=1))
    assert np.max(np.abs(solve_exact_ls(p) - true_coefficients(10))) < 1e-4


@pytest.mark.parametrize("d, blocks", [(5, (1, 3, 1)), (8, (2, 4, 2)), (100, (20, 60, 20)), (2, (0, 2, 0)), (13, (3, 7, 3))])
def test_coefficient_blocks(d, blocks):
    x = true_coefficients(d)
    k, mid, _ = blocks
    assert x.size == d
    np.testing.assert_array_equal(x[:k], 1.0)
    np.testing.assert_array_equal(x[k:k + mid], 0.1)
    np.testing.assert_array_equal(x[k + mid:], 1.0)


def test_generation_deterministic():
    a = gen_synthetic(SyntheticSpec(300, 5, "ill", seed=4))
    b = gen_synthetic(SyntheticSpec(300, 5, "ill", seed=4))
    c = gen_synthetic(SyntheticSpec(300, 5, "ill", seed=5))
    assert a.A.tobytes() == b.A.tobytes() and a.b.tobytes() == b.b.tobytes()
    assert not np.array_equal(a.A, c.A)


def test_multivariate_t_is_heavy_tailed():
    gen = np.random.default_rng(0)
    X = multivariate_t(gen, 20000, np.eye(2))
    # t with 2 dof: P(|X_1| > 10) = 1 - 10/sqrt(102) ~ 0.0099, far above the Gaussian value
    assert 0.006 < np.mean(np.abs(X[:, 0]) > 10) < 0.014


@pytest.mark.parametrize("kwargs", [dict(n=5, d=6), dict(n=10, d=1), dict(n=10, d=3, conditioning="bad"),
                                    dict(n=10, d=3, noise_tau=-1.0)])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SyntheticSpec(**kwargs)


def test_libsvm_basic(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("1 1:2\n-1 2:3\n")
    p = load_libsvm(f)
    np.testing.assert_array_equal(p.A, [[2, 0], [0, 3]])
    np.testing.assert_array_equal(p.b, [1, -1])


def test_libsvm_empty_feature_line(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("1 1:2\n5\n-1 2:3\n\n# trailing comment\n")
    p = load_libsvm(f)
    np.testing.assert_array_equal(p.A, [[2, 0], [0, 0], [0, 3]])
    np.testing.assert_array_equal(p.b, [1, 5, -1])


@pytest.mark.parametrize("text, lineno", [
    ("1 1:2\nx 1:3\n", 2),
    ("1 1:2\n2 1:abc\n", 2),
    ("1 2:1 1:3\n", 1),
    ("1 1:1 1:3\n", 1),
    ("1 0:1\n", 1),
    ("1 1:2\n1 2:3\n1 3\n", 3),
])
def test_libsvm_malformed(tmp_path, text, lineno):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(ProblemFormatError, match=f":{lineno}:"):
        load_libsvm(f)


def test_libsvm_round_trip_through_skls(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("0.5 1:1.25 3:-2\n1.5 2:0.1\n-3 1:1e-3 2:7 3:1\n")
    p = load_libsvm(f)
    write_problem(p, tmp_path / "a.skls")
    q = read_problem(tmp_path / "a.skls")
    assert p.A.tobytes() == q.A.tobytes() and p.b.tobytes() == q.b.tobytes()


def test_skls_round_trip(tmp_path):
    p = random_problem(50, 3, seed=4)
    path = tmp_path / "p.skls"
    write_problem(p, path)
    q = read_problem(path)
    assert (q.n, q.d) == (50, 3)
    assert p.A.tobytes() == q.A.tobytes() and p.b.tobytes() == q.b.tobytes()
    assert load_problem(path).A.tobytes() == p.A.tobytes()


def test_skls_layout(tmp_path):
    p = LSProblem([[1.0, 2.0], [3.0, 4.0], [5.0, 6.5]], [7.0, 8.0, 9.0])
    path = tmp_path / "p.skls"
    write_problem(p, path)
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    assert struct.unpack_from("<HQQ", raw, 4) == (1, 3, 2)
    body = struct.unpack_from("<9d", raw, 22)
    assert body == (1.0, 2.0, 3.0, 4.0, 5.0, 6.5, 7.0, 8.0, 9.0)
    assert len(raw) == 22 + 9 * 8


def test_skls_header_only_is_truncated(tmp_path):
    path = tmp_path / "h.skls"
    path.write_bytes(MAGIC + struct.pack("<HQQ", 1, 10, 2))
    with pytest.raises(ProblemFormatError, match="truncated"):
        read_problem(path)
    path.write_bytes(MAGIC + b"\x01")
    with pytest.raises(ProblemFormatError, match="truncated"):
        read_problem(path)


def test_skls_bad_magic(tmp_path):
    path = tmp_path / "m.skls"
    path.write_bytes(b"NOPE" + struct.pack("<HQQ", 1, 1, 1) + b"\0" * 16)
    with pytest.raises(ProblemFormatError, match="NOPE"):
        read_problem(path)


def test_skls_bad_version(tmp_path):
    path = tmp_path / "v.skls"
    path.write_bytes(MAGIC + struct.pack("<HQQ", 9, 1, 1) + b"\0" * 16)
    with pytest.raises(ProblemFormatError, match="version"):
        read_problem(path)
