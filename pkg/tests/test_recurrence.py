import struct
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from rqnet.embedding import EmbeddingParams, embed
from rqnet.errors import InvalidInput, UndefinedMeasure
from rqnet.preprocess import uniform_deviate
from rqnet.recurrence import (RecurrenceMatrix, det, diagonal_histogram, lam,
                              read_rp_binary, recurrence_matrix,
                              upper_coordinates, vertical_histogram,
                              write_rp_binary)


def random_symmetric(rng, n, p=0.4):
    a = rng.random((n, n)) < p
    a = np.triu(a, 1)
    a = a | a.T
    np.fill_diagonal(a, True)
    return a


def test_identical_points_all_ones():
    R = recurrence_matrix(np.array([[0.3, 0.1], [0.3, 0.1]]), 1e-9)
    assert R.to_dense().all()


def test_two_distant_points_identity():
    R = recurrence_matrix(np.array([0.0, 1.0]), 0.5)
    assert np.array_equal(R.to_dense(), np.eye(2, dtype=bool))


@pytest.mark.parametrize("norm", ["euclidean", "maximum"])
def test_matrix_matches_pairwise_oracle(rng, norm):
    pts = rng.random((100, 4))
    R = recurrence_matrix(pts, 0.25, norm)
    assert np.array_equal(R.to_dense(), oracles.recurrence_dense(pts, 0.25, norm))


def test_matrix_invariants(rng):
    R = recurrence_matrix(rng.random((130, 3)), 0.3)
    d = R.to_dense()
    assert np.array_equal(d, d.T)
    assert d.diagonal().all()
    assert R.recurrence_count() == d.sum()
    assert R[0, 0] == 1


def test_matrix_rejects_bad_input():
    with pytest.raises(InvalidInput):
        recurrence_matrix(np.array([[0.0], [np.nan]]), 0.25)
    with pytest.raises(InvalidInput):
        recurrence_matrix(np.array([0.0, 1.0]), 0.0)
    with pytest.raises(InvalidInput):
        recurrence_matrix(np.array([0.0, 1.0]), 0.5, "manhattan")
    with pytest.raises(InvalidInput):
        RecurrenceMatrix.from_dense(np.zeros((3, 3)))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(1, 4)),
              elements=st.floats(0, 1)),
       st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_epsilon_monotone_and_homogeneous(pts, e1, e2):
    lo, hi = sorted((e1, e2))
    a = recurrence_matrix(pts, lo).to_dense()
    b = recurrence_matrix(pts, hi).to_dense()
    assert np.all(a <= b)
    # doubling is exact in binary floating point
    assert np.array_equal(recurrence_matrix(2 * pts, 2 * lo).to_dense(), a)


def test_diagonal_histogram_all_ones():
    n = 7
    h = diagonal_histogram(RecurrenceMatrix.from_dense(np.ones((n, n))))
    assert h.as_dict() == {l: 2 for l in range(1, n)}


def test_histograms_of_identity():
    R = RecurrenceMatrix.from_dense(np.eye(9))
    assert diagonal_histogram(R).as_dict() == {}
    assert vertical_histogram(R).as_dict() == {1: 9}
    assert lam(R) == 0.0
    with pytest.raises(UndefinedMeasure):
        det(R)


def test_vertical_histogram_all_ones():
    R = RecurrenceMatrix.from_dense(np.ones((6, 6)))
    assert vertical_histogram(R).as_dict() == {6: 6}
    assert lam(R) == 1.0


def test_histograms_match_run_length_oracle(rng):
    for _ in range(5):
        d = random_symmetric(rng, 50)
        R = RecurrenceMatrix.from_dense(d)
        assert diagonal_histogram(R).as_dict() == oracles.diagonal_runs(d)
        assert diagonal_histogram(R, exclude_loi=False).as_dict() == \
            oracles.diagonal_runs(d, include_loi=True)
        assert vertical_histogram(R).as_dict() == oracles.vertical_runs(d)


def test_vertical_equals_horizontal_runs(rng):
    d = random_symmetric(rng, 45)
    rows = oracles.vertical_runs(d.T)
    assert vertical_histogram(RecurrenceMatrix.from_dense(d)).as_dict() == rows


@pytest.mark.parametrize("n", [3, 4, 10, 65])
def test_det_all_ones_closed_form(n):
    R = RecurrenceMatrix.from_dense(np.ones((n, n)))
    assert det(R) == float(1 - Fraction(2, n * (n - 1)))
    if n >= 5:
        assert 0.9 < det(R) <= 1.0


def test_det_isolated_points_zero():
    d = np.eye(8, dtype=bool)
    d[0, 5] = d[5, 0] = d[2, 7] = d[7, 2] = True
    assert det(RecurrenceMatrix.from_dense(d)) == 0.0


def test_det_loi_flag():
    d = np.eye(5, dtype=bool)
    d[0, 1] = d[1, 0] = True
    R = RecurrenceMatrix.from_dense(d)
    # off-LOI points are isolated; with the LOI the diagonal run of 5 counts
    assert det(R) == 0.0
    assert det(R, include_loi=True) == 5 / 7


def test_det_of_periodic_sine():
    x = np.sin(2 * np.pi * np.arange(400) / 50)
    pts = embed(uniform_deviate(x), EmbeddingParams(2, 12)).points
    R = recurrence_matrix(pts, 0.25)
    dense = oracles.recurrence_dense(pts, 0.25)
    want = oracles.line_fraction(oracles.diagonal_runs(dense), 2)
    assert det(R) == float(want)
    assert det(R) > 0.99


def test_seeded_matrix_frozen_values():
    # values from the run-length oracle on this seed
    pts = np.random.default_rng(7).random((60, 3))
    R = recurrence_matrix(pts, 0.3)
    assert det(R) == float(Fraction(17, 77))
    assert lam(R) == float(Fraction(61, 368))


def test_min_length_validation():
    R = RecurrenceMatrix.from_dense(np.ones((3, 3)))
    with pytest.raises(ValueError):
        det(R, l_min=1)
    with pytest.raises(ValueError):
        lam(R, v_min=1)


def test_rp_binary_layout(tmp_path, rng):
    d = random_symmetric(rng, 13)
    R = RecurrenceMatrix.from_dense(d, epsilon=0.25)
    path = tmp_path / "m.rp"
    write_rp_binary(path, R)
    blob = path.read_bytes()
    magic, n, eps = struct.unpack("<4sQd", blob[:20])
    assert (magic, n, eps) == (b"RPV1", 13, 0.25)
    assert len(blob) == 20 + 13 * 2
    row0 = blob[20:22]
    for j in range(13):
        assert bool(row0[j // 8] >> (j % 8) & 1) == d[0, j]
    back = read_rp_binary(path)
    assert np.array_equal(back.to_dense(), d)
    assert back.epsilon == 0.25


def test_rp_binary_rejects_garbage(tmp_path):
    path = tmp_path / "bad.rp"
    path.write_bytes(b"XXXX" + bytes(16))
    with pytest.raises(InvalidInput):
        read_rp_binary(path)


def test_upper_coordinates(rng):
    d = random_symmetric(rng, 20)
    R = RecurrenceMatrix.from_dense(d)
    i, j = upper_coordinates(R.bits, R.n)
    assert np.all(i < j)
    assert set(zip(i.tolist(), j.tolist())) == \
        {(a, b) for a in range(20) for b in range(a + 1, 20) if d[a, b]}
