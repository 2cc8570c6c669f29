import numpy as np
import pytest

from chainwave.models import HnParams, ModelSpec, SshParams


@pytest.fixture
def hn_strong():
    """t_l=2, t_r=0.2 chain (the delta-dynamics figures)."""
    return lambda n=200, **kw: ModelSpec(
        "hatano_nelson", n, hn=HnParams(2.0, 0.2), **kw
    )


@pytest.fixture
def hn_mild():
    """t_l=2, t_r=1.5 chain (the Gaussian figures)."""
    return lambda n=400, **kw: ModelSpec(
        "hatano_nelson", n, hn=HnParams(2.0, 1.5), **kw
    )


@pytest.fixture
def ssh_spec():
    return lambda n=100, **kw: ModelSpec(
        "nh_ssh", n, ssh=SshParams(0.4, 1.0, 0.5), **kw
    )


def dense_eig_sorted(h):
    """Eigenvalues of the dense matrix sorted by real part (complex-safe)."""
    ev = np.linalg.eigvals(h.dense())
    return ev[np.argsort(ev.real)]
