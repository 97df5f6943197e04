import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import NumericalError, PrecodingError
from src.models.precoding import NONE, PAC, SPC, EquivalentChannelMatrix, PowerModel, PrecodingMatrix
from src.services import precoding_service


def random_channel(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def square(matrix):
    return EquivalentChannelMatrix(np.asarray(matrix, dtype=complex), tuple(range(len(matrix))))


# ==================== CANAL EQUIVALENTE ====================

def test_equivalent_channel_examples():
    assert_allclose(precoding_service.equivalent_channel(np.array([[1 + 1j, 2]])), [1 + 1j, 2])
    assert_allclose(precoding_service.equivalent_channel(np.array([[1, 0], [0, 1]])), [0.5, 0.5])
    repeated = np.tile(np.array([1 - 2j, 0.5j]), (4, 1))
    assert_allclose(precoding_service.equivalent_channel(repeated), [1 - 2j, 0.5j])
    with pytest.raises(PrecodingError):
        precoding_service.equivalent_channel(np.zeros((0, 2)))


def test_equivalent_channel_matrix_inactive_rows():
    matrix = precoding_service.equivalent_channel_matrix([np.array([1, 2]), None], 2, [0, None])
    assert_allclose(matrix.matrix, [[1, 2], [0, 0]])
    assert matrix.cluster_ids == (0, None)


# ==================== MMSE ====================

def test_mmse_identity():
    w = precoding_service.mmse_precoder(square(np.eye(2)), alpha=np.array([1.0, 1.0]))
    assert_allclose(w.matrix, 0.5 * np.eye(2))
    assert w.normalization == NONE


def test_mmse_regularizer_from_power_model():
    power = PowerModel(90.0, 9)
    assert_allclose(precoding_service.regularizers(power), np.full(9, 0.1))
    w = precoding_service.mmse_precoder(square(np.eye(2)), PowerModel(2.0, 2))
    assert_allclose(w.matrix, 0.5 * np.eye(2))


@pytest.mark.parametrize("n", [4, 8])
def test_mmse_residual_and_alternate_solver(n):
    rng = np.random.default_rng(n)
    for _ in range(100):
        h = random_channel(rng, n)
        alpha = rng.uniform(0.01, 2.0, n)
        w = precoding_service.mmse_precoder(square(h), alpha=alpha).matrix
        lhs = h.conj().T @ h + np.diag(alpha)
        residual = np.linalg.norm(lhs @ w - h.conj().T) / np.linalg.norm(h.conj().T)
        assert residual < 1e-10
        assert_allclose(w, np.linalg.solve(lhs, h.conj().T), rtol=1e-8, atol=1e-12)


def test_mmse_zero_forcing_limit():
    rng = np.random.default_rng(0)
    for n in (4, 8):
        for _ in range(20):
            h = random_channel(rng, n)
            product = precoding_service.mmse_precoder(square(h), alpha=np.full(n, 1e-12)).matrix @ h
            off_diagonal = product - np.diag(np.diag(product))
            assert np.max(np.abs(off_diagonal)) < 1e-6


def test_mmse_rejects_non_positive_alpha():
    with pytest.raises(PrecodingError):
        precoding_service.mmse_precoder(square(np.eye(2)), alpha=np.array([1.0, 0.0]))


def test_mmse_rejects_non_square():
    with pytest.raises(PrecodingError):
        precoding_service.mmse_precoder(EquivalentChannelMatrix(np.ones((2, 3)), (0, 1)), alpha=1.0)


# ==================== NORMALIZACIONES ====================

def test_pac_examples():
    w = precoding_service.normalize_pac(PrecodingMatrix(np.array([[3.0, 4.0], [0.0, 2.0]])))
    assert_allclose(w.matrix, [[0.6, 0.8], [0.0, 1.0]])
    assert w.normalization == PAC
    unit = np.eye(3, dtype=complex)
    assert_allclose(precoding_service.normalize_pac(PrecodingMatrix(unit)).matrix, unit)
    with pytest.raises(NumericalError):
        precoding_service.normalize_pac(PrecodingMatrix(np.array([[1.0, 0.0], [0.0, 0.0]])))


def test_spc_examples():
    assert_allclose(precoding_service.normalize_spc(PrecodingMatrix(2 * np.eye(2))).matrix, np.eye(2))
    q, _ = np.linalg.qr(random_channel(np.random.default_rng(3), 4))
    assert_allclose(precoding_service.normalize_spc(PrecodingMatrix(q)).matrix, q)
    with pytest.raises(NumericalError):
        precoding_service.normalize_spc(PrecodingMatrix(np.zeros((2, 2))))


def test_normalizations_on_random_matrices():
    rng = np.random.default_rng(17)
    for n in (4, 8):
        for _ in range(100):
            w = PrecodingMatrix(random_channel(rng, n))
            assert_allclose(precoding_service.normalize_pac(w).row_norms(), 1.0, atol=1e-9)
            spc = precoding_service.normalize_spc(w)
            assert_allclose(spc.power_trace(), n, rtol=1e-9)
            assert spc.normalization == SPC
            scaled = precoding_service.normalize_spc(PrecodingMatrix(3.7 * w.matrix))
            assert_allclose(scaled.matrix, spc.matrix, rtol=1e-12)


def test_frame_precoder_zeroes_inactive_beams():
    rng = np.random.default_rng(2)
    h = random_channel(rng, 3)
    h[2] = 0.0
    channel = EquivalentChannelMatrix(h, (0, 0, None))
    for precoder in (NONE, PAC, SPC):
        w = precoding_service.frame_precoder(channel, PowerModel(30.0, 3), precoder)
        assert_allclose(w.matrix[:, 2], 0.0)
    with pytest.raises(PrecodingError):
        precoding_service.frame_precoder(channel, PowerModel(30.0, 3), "zf")


# ==================== SINR ====================

def test_user_sinr_single_beam():
    w = PrecodingMatrix(np.array([[1.0 + 0j]]))
    assert_allclose(precoding_service.user_sinr(np.array([1.0 + 0j]), w, 1, 4.0), 4.0)


def test_user_sinr_orthogonal_interference():
    w = PrecodingMatrix(np.eye(2, dtype=complex))
    h = np.array([0.5 + 0.5j, 0.0])
    assert_allclose(precoding_service.user_sinr(h, w, 1, 3.0), 3.0 * 0.5)


def test_user_sinr_matches_direct_expansion():
    rng = np.random.default_rng(11)
    for _ in range(50):
        w = random_channel(rng, 4)
        h = rng.normal(size=4) + 1j * rng.normal(size=4)
        b = int(rng.integers(1, 5))
        p = float(rng.uniform(1, 20))
        signal = p * abs(sum(h[i] * w[i, b - 1] for i in range(4))) ** 2
        interference = sum(p * abs(sum(h[i] * w[i, l] for i in range(4))) ** 2 for l in range(4) if l != b - 1)
        expected = signal / (1 + interference)
        assert_allclose(precoding_service.user_sinr(h, PrecodingMatrix(w), b, p), expected, rtol=1e-12)
        if b == 1:
            direct = p * abs(h[0]) ** 2 / (1 + p * sum(abs(h[l]) ** 2 for l in range(1, 4)))
            assert_allclose(precoding_service.no_precoding_sinr(h, 1, p), direct, rtol=1e-12)


def test_no_precoding_symmetric_two_beam():
    h = np.array([0.3 + 0.4j, 0.4 - 0.3j])
    p = 10.0
    expected = p * 0.25 / (1 + p * 0.25)
    assert_allclose(precoding_service.no_precoding_sinr(h, 1, p), expected)
    assert_allclose(precoding_service.no_precoding_sinr(np.array([2.0 + 0j]), 1, p), p * 4.0)


def test_sinr_vector_matches_per_user():
    rng = np.random.default_rng(4)
    w = PrecodingMatrix(random_channel(rng, 3))
    users = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    beams = [0, 2, 1, 1, 0]
    vector = precoding_service.sinr_vector(users, w, beams, 2.0)
    for i, b in enumerate(beams):
        assert_allclose(vector[i], precoding_service.user_sinr(users[i], w, b + 1, 2.0))


def test_sinr_grows_with_power_without_interference():
    h = np.array([1.0 + 0j, 0.0, 0.0])
    precoder = precoding_service.identity_precoder(3)
    sinrs = [precoding_service.user_sinr(h, precoder, 1, p) for p in (1.0, 2.0, 3.0)]
    assert_allclose(sinrs, [1.0, 2.0, 3.0])
    assert np.all(np.diff(sinrs) > 0)
