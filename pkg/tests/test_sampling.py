import numpy as np
import pytest

from orbit_moduli.sampling import Ensemble, ginibre, sample_tuple, trial_rng


def test_philox_test_vectors():
    raw = trial_rng(0, 0).bit_generator.random_raw(4)
    assert [int(v) for v in raw] == [0x2F4BA6408E4D89B, 0x3DD62B0B9CA8C5B2,
                                     0x1C8667A55D902E79, 0x907D7A052FD5B4DC]
    raw = trial_rng(7, 3).bit_generator.random_raw(2)
    assert [int(v) for v in raw] == [0x7B6CC7B1862CC5F2, 0xB960F2EA4B3F8D9F]


def test_sample_test_vector():
    s = sample_tuple(3, 2, 7, 3)
    assert s.matrices[0][0, 0] == complex(-1.6731621249484607, -0.8801485352335066)


def test_streams_are_independent_of_order():
    a = sample_tuple(3, 3, 5, 10).matrices
    sample_tuple(3, 3, 5, 9)
    b = sample_tuple(3, 3, 5, 10).matrices
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = sample_tuple(3, 3, 5, 11).matrices
    assert not np.array_equal(a[0], c[0])


def test_ginibre_variance():
    G = ginibre(trial_rng(1, 0), 200)
    assert abs(np.mean(np.abs(G) ** 2) - 1) < 0.02


@pytest.mark.parametrize("ens", list(Ensemble))
def test_ensembles(ens):
    M = sample_tuple(1, 4, 2, 0, ens).matrices[0]
    assert M.shape == (4, 4) and M.dtype == np.complex128
    if ens is not Ensemble.GINIBRE:
        assert np.allclose(M, M.conj().T)
    if ens is Ensemble.PSD:
        assert np.linalg.eigvalsh(M).min() > -1e-12
    if ens is Ensemble.DIAGONAL:
        assert np.array_equal(M, np.diag(np.diag(M).real))


def test_seed_range():
    with pytest.raises(ValueError):
        trial_rng(-1, 0)
    with pytest.raises(ValueError):
        trial_rng(2**64, 0)
    trial_rng(2**64 - 1, 2**64 - 1)


def test_digest():
    assert sample_tuple(2, 3, 4, 5).digest() == "seed=4 trial=5 n=3 ensemble=ginibre"
