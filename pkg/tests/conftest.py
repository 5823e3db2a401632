import numpy as np
import pytest

from histkit import _kernels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per available eigensolver backend."""
    monkeypatch.setattr(_kernels, "jacobi_eigh", _kernels.BACKENDS[request.param])
    return request.param
