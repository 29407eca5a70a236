"""Unit tests for the matrix utility layer."""

import numpy as np
import pytest

from gsvdcap import linalg


def seeded(rows, cols, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestAsMatrix:
    def test_accepts_nested_lists(self):
        m = linalg.as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.complex128
        assert m.shape == (2, 2)
        assert m[1, 0] == 3.0

    def test_shape_check(self):
        with pytest.raises(ValueError):
            linalg.as_matrix([[1, 2], [3, 4]], rows=3, cols=2)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            linalg.as_matrix([1, 2, 3])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            linalg.as_matrix([[np.nan, 0.0], [0.0, 1.0]])


class TestSvd:
    def test_reconstruction_and_orientation(self):
        m = seeded(5, 3, 1)
        u, s, v = linalg.svd(m)
        # v holds right singular vectors as columns, so m = u diag(s) v^H
        rebuilt = (u * s) @ v.conj().T
        assert np.linalg.norm(rebuilt - m) <= 1e-12 * np.linalg.norm(m)
        assert u.shape == (5, 3) and v.shape == (3, 3)
        assert np.all(np.diff(s) <= 0)

    def test_unitary_factors(self):
        m = seeded(4, 6, 2)
        u, s, v = linalg.svd(m)
        assert np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])) <= 1e-12
        assert np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])) <= 1e-12

    def test_rejects_nonfinite(self):
        bad = np.array([[1.0, np.inf], [0.0, 1.0]], dtype=np.complex128)
        with pytest.raises(ValueError):
            linalg.svd(bad)


class TestOrthonormalCompletion:
    def test_fills_missing_columns(self):
        rng = np.random.default_rng(5)
        base = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        qfull, _ = np.linalg.qr(base)
        seed = np.zeros((5, 5), dtype=np.complex128)
        seed[:, :2] = qfull[:, :2]
        out = linalg.orthonormal_completion(seed, 2)
        assert np.linalg.norm(out.conj().T @ out - np.eye(5)) <= 1e-10
        assert np.linalg.norm(out[:, :2] - seed[:, :2]) == 0.0

    def test_designated_columns_anywhere(self):
        rng = np.random.default_rng(6)
        base = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        qfull, _ = np.linalg.qr(base)
        seed = np.zeros((4, 4), dtype=np.complex128)
        seed[:, 1] = qfull[:, 0]
        seed[:, 3] = qfull[:, 1]
        out = linalg.orthonormal_completion(seed, 2)
        assert np.linalg.norm(out.conj().T @ out - np.eye(4)) <= 1e-10
        assert np.array_equal(out[:, 1], seed[:, 1])
        assert np.array_equal(out[:, 3], seed[:, 3])

    def test_zero_designated_returns_unitary(self):
        out = linalg.orthonormal_completion(np.zeros((3, 3), dtype=np.complex128), 0)
        assert np.linalg.norm(out.conj().T @ out - np.eye(3)) <= 1e-10

    def test_already_complete_is_identity_operation(self):
        rng = np.random.default_rng(7)
        base = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        qfull, _ = np.linalg.qr(base)
        out = linalg.orthonormal_completion(qfull, 3)
        assert np.array_equal(out, qfull)

    def test_rejects_wrong_count(self):
        seed = np.zeros((3, 3), dtype=np.complex128)
        seed[0, 0] = 1.0
        with pytest.raises(ValueError):
            linalg.orthonormal_completion(seed, 2)

    def test_rejects_non_orthonormal_designated(self):
        seed = np.zeros((3, 3), dtype=np.complex128)
        seed[:, 0] = [1.0, 0.0, 0.0]
        seed[:, 1] = [0.9, 0.1, 0.0]
        with pytest.raises(ValueError):
            linalg.orthonormal_completion(seed, 2)


class TestRankWithTol:
    def test_counts_above_relative_threshold(self):
        s = np.array([10.0, 1.0, 1e-12])
        assert linalg.rank_with_tol(s, 1e-9) == 2

    def test_all_zero(self):
        assert linalg.rank_with_tol(np.zeros(3), 1e-9) == 0

    def test_full_rank(self):
        assert linalg.rank_with_tol(np.array([3.0, 2.0, 1.0]), 1e-9) == 3


class TestMatrixIo:
    def test_round_trip(self, tmp_path):
        m = seeded(3, 4, 9)
        path = tmp_path / "m.json"
        linalg.save_matrix(m, path)
        back = linalg.load_matrix(path)
        assert np.array_equal(back, m)

    def test_real_matrix_round_trip(self, tmp_path):
        m = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.complex128)
        path = tmp_path / "r.json"
        linalg.save_matrix(m, path)
        assert np.array_equal(linalg.load_matrix(path), m)

    def test_missing_file_has_path_context(self, tmp_path):
        target = tmp_path / "absent.json"
        with pytest.raises(OSError, match="absent.json"):
            linalg.load_matrix(target)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValueError, match="bad.json"):
            linalg.load_matrix(path)

    def test_inconsistent_payload(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(
            '{"rows": 2, "cols": 2, "re": [1.0, 2.0], "im": [0.0, 0.0]}',
            encoding="utf-8",
        )
        with pytest.raises(ValueError, match="short.json"):
            linalg.load_matrix(path)
