"""Ornstein-Uhlenbeck diffusion of random matrices.

Thin wrapper over the compiled core: exact transition samplers for the
hermitian and complex Gaussian ensembles, eigenvalue Langevin paths,
left/right eigenvector overlaps, and the closed-form laws the simulations
are verified against.
"""

from ._core import (
    __version__,
    acp_from_initial,
    block_trace,
    burgers_characteristics,
    dyson_trajectory,
    eigen_overlaps,
    erfc_edge,
    free_ginibre_laws,
    generalized_resolvent,
    ginibre_macroscopic,
    qdet_from_initial,
    quaternion_embed,
    sample_gue_transition,
    sample_ginibre_transition,
    wigner_density,
    wigner_green,
)

__all__ = [
    "__version__",
    "acp_from_initial",
    "block_trace",
    "burgers_characteristics",
    "dyson_trajectory",
    "eigen_overlaps",
    "erfc_edge",
    "free_ginibre_laws",
    "generalized_resolvent",
    "ginibre_macroscopic",
    "qdet_from_initial",
    "quaternion_embed",
    "sample_gue_transition",
    "sample_ginibre_transition",
    "wigner_density",
    "wigner_green",
]
