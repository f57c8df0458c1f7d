import numpy as np
import pytest

from lieschwinger import build_chain_model
from lieschwinger.intervals import Interval

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def random_hermitian(rng, d, norm=None):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    V = (A + A.conj().T) / 2
    if norm is not None:
        V = V * (norm / np.max(np.abs(np.linalg.eigvalsh(V))))
    return V


def kron_chain(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def anchor_model(t=0.1):
    """N=2, M=2, on-site diag(0,1), interaction sx (x) sx."""
    return build_chain_model(
        N=2, M=2, onsite=np.diag([0.0, 1.0]),
        interactions={Interval(1, 1): np.kron(SX, SX)}, t=t,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
