"""Convergence and weak scalability of one-level parallel and optimized Schwarz
methods on a chain of fixed-size subdomains, for mixed external conditions."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    Bc,
    BcPair,
    DomainChain,
    TransmissionKind,
    DIRICHLET_TRACE,
    build_chain,
    robin_trace,
)
from .spectral import EigenMode, char_function, eigenmodes, eval_eigenfunction, find_root_k, limit_frequency  # noqa: E402
from .bounds import ContractionBound, ordering_check, phi_osm, rho, theorem3_bound, zeta_osm  # noqa: E402
from .fourier1d import build_mode_iteration, mode_radius_vs_bound, select_convention, subdomain_mode_solution  # noqa: E402
from .schwarz import IterationReport, RunConfig, observed_contraction, run_schwarz, scalability_sweep  # noqa: E402
