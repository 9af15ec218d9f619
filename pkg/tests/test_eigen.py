import numpy as np
import pytest

from haarfht.eigen import jacobi_eigenbasis
from haarfht.errors import ValidationError
from haarfht.graphs import laplacian, make_graph


def test_already_diagonal():
    vals, vecs = jacobi_eigenbasis(np.diag([3.0, 1.0]))
    assert np.array_equal(vals, [1.0, 3.0])
    assert np.array_equal(np.abs(vecs), [[0.0, 1.0], [1.0, 0.0]])


def test_path_graph_laplacian():
    lap = laplacian(make_graph(2, [(0, 1, 1.0)]))
    vals, vecs = jacobi_eigenbasis(lap)
    assert np.abs(vals - [0.0, 2.0]).max() <= 1e-12
    r2 = 1.0 / np.sqrt(2.0)
    assert np.abs(np.abs(vecs) - r2).max() <= 1e-12
    # eigenvector of 0 is constant, eigenvector of 2 alternates
    assert vecs[0, 0] * vecs[1, 0] > 0
    assert vecs[0, 1] * vecs[1, 1] < 0


def test_random_symmetric_reconstruction_and_orthonormality():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((50, 50))
    m = (m + m.T) / 2.0
    vals, vecs = jacobi_eigenbasis(m)
    rec = vecs @ np.diag(vals) @ vecs.T
    assert np.linalg.norm(rec - m) / np.linalg.norm(m) <= 1e-7
    assert np.abs(vecs.T @ vecs - np.eye(50)).max() <= 1e-8
    assert np.abs(np.sort(vals) - np.linalg.eigvalsh(m)).max() <= 1e-9


def test_eigenvalues_ascending():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((20, 20))
    m = (m + m.T) / 2.0
    vals, _ = jacobi_eigenbasis(m)
    assert np.all(np.diff(vals) >= 0.0)


def test_zero_matrix():
    vals, vecs = jacobi_eigenbasis(np.zeros((3, 3)))
    assert np.array_equal(vals, np.zeros(3))
    assert np.array_equal(vecs, np.eye(3))


def test_single_entry():
    vals, vecs = jacobi_eigenbasis(np.array([[4.0]]))
    assert np.array_equal(vals, [4.0]) and np.array_equal(vecs, [[1.0]])


def test_non_symmetric_rejected():
    with pytest.raises(ValidationError, match="symmetric"):
        jacobi_eigenbasis(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_order_guard():
    with pytest.raises(ValidationError, match="guard"):
        jacobi_eigenbasis(np.zeros((4097, 4097)))


def test_non_square_rejected():
    with pytest.raises(ValidationError, match="square"):
        jacobi_eigenbasis(np.zeros((2, 3)))
