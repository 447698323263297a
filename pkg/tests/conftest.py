"""Shared helpers for the test suite."""

import numpy as np
import pytest

from mhdbq import kernels
from mhdbq.spectral import grid_for

kernels.tune_malloc()


def brute_forward(values: np.ndarray) -> np.ndarray:
    """O(N^6) discrete Fourier analysis, f_hat(k) = (1/N^3) sum f(x) e^{-2pi i k.x}.

    Independent of the FFT library; only usable at small N.
    """
    n = values.shape[-1]
    j = np.arange(n)
    # one-dimensional analysis matrix, applied along each axis in turn
    w = np.exp(-2j * np.pi * np.outer(j, j) / n) / n
    out = values.astype(np.complex128)
    out = np.tensordot(w, out, axes=([1], [0]))
    out = np.moveaxis(np.tensordot(w, np.moveaxis(out, 1, 0), axes=([1], [0])), 0, 1)
    out = np.moveaxis(np.tensordot(w, np.moveaxis(out, 2, 0), axes=([1], [0])), 0, 2)
    return out


def wavevectors(n: int):
    """All integer wavevectors of an N-point axis in FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n).astype(int)


@pytest.fixture
def grid8():
    return grid_for(8)


@pytest.fixture
def grid16():
    return grid_for(16)
