"""chainwave: wave-packet dynamics on non-reciprocal 1D lattices.

Simulation of tight-binding chains with asymmetric hoppings at configurable
arithmetic precision, the diagonal similarity transform connecting them to
Hermitian chains, closed-form predictions (velocities, reflection and
disorder transition times, critical packet widths), and trajectory analysis.
Served over HTTP (FastAPI) with a thin CLI client.
"""

__version__ = "0.1.0"

from .errors import (
    BackendUnsupportedError,
    ChainwaveError,
    DimensionError,
    DomainError,
    InsufficientPeaksError,
    InvalidParameterError,
    NoRootError,
    PrecisionError,
    UnsupportedModelError,
)
from .models import (
    DisorderSpec,
    Hamiltonian,
    HnParams,
    ModelSpec,
    SpectrumResult,
    SshParams,
    build_hamiltonian,
    disorder_realization,
    obc_eigenvector,
    obc_spectrum_hn,
    pbc_spectrum,
)
from .transform import (
    SimilarityTransform,
    hermitian_counterpart,
    make_transform,
    pseudo_hermiticity_residual,
)
from .states import (
    GaussianPacket,
    StateVector,
    delta_state,
    gaussian_state,
    momentum_amplitude,
)
from .evolution import (
    EvolutionConfig,
    Trajectory,
    cross_validate,
    edge_amplitude_log10,
    edge_amplitude_series,
    evolve,
    evolve_via_transform,
)
from .bessel import bessel_propagator, bessel_propagator_log10, unitarity_sum

__all__ = [name for name in dir() if not name.startswith("_")]
