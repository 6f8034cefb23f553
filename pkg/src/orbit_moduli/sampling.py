"""Seeded random ensembles.

Every trial draws from its own counter-based stream: a Philox-4x64-10
generator keyed by the pair ``(seed, trial_index)`` with the counter starting
at zero. Streams never overlap and do not depend on how trials are split
across workers, which is what makes parallel sweeps byte-reproducible.

Matrix entries are drawn with :meth:`numpy.random.Generator.standard_normal`
(real parts for the whole matrix first, then imaginary parts), one matrix at
a time in tuple order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

SEED_LIMIT = 2**64


class Ensemble(str, enum.Enum):
    GINIBRE = "ginibre"
    HERMITIAN = "hermitian"
    PSD = "psd"
    DIAGONAL = "diagonal"


def _check_seed(value: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value < SEED_LIMIT:
        raise ParameterError(f"{name} must lie in [0, 2**64), got {value}")
    return value


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Generator for trial ``trial`` of a run seeded with ``seed``."""
    key = np.array([_check_seed(seed, "seed"), _check_seed(trial, "trial")], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """I.i.d. standard complex Gaussian entries, ``E|z|^2 = 1``."""
    cols = rows if cols is None else cols
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / math.sqrt(2)


def draw(rng: np.random.Generator, n: int, ensemble: Ensemble | str = Ensemble.GINIBRE) -> np.ndarray:
    ensemble = Ensemble(ensemble)
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")
    if ensemble is Ensemble.GINIBRE:
        return ginibre(rng, n)
    if ensemble is Ensemble.HERMITIAN:
        G = ginibre(rng, n)
        return (G + G.conj().T) / 2
    if ensemble is Ensemble.PSD:
        G = ginibre(rng, n)
        return G.conj().T @ G
    return np.diag(rng.standard_normal(n)).astype(np.complex128)


@dataclass(frozen=True)
class TupleSample:
    matrices: tuple[np.ndarray, ...]
    seed: int
    trial: int
    ensemble: Ensemble

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def digest(self) -> str:
        return f"seed={self.seed} trial={self.trial} n={self.n} ensemble={self.ensemble.value}"


def sample_tuple(count: int, n: int, seed: int, trial: int = 0,
                 ensemble: Ensemble | str = Ensemble.GINIBRE) -> TupleSample:
    """``count`` independent ``n x n`` matrices from one trial stream."""
    if count < 1:
        raise ParameterError(f"tuple length must be positive, got {count}")
    ensemble = Ensemble(ensemble)
    rng = trial_rng(seed, trial)
    mats = tuple(draw(rng, n, ensemble) for _ in range(count))
    return TupleSample(mats, int(seed), int(trial), ensemble)
