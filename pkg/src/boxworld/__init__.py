"""Exact analysis of bipartite binary-input/binary-output correlations."""

from .correlations import (
    CorrelationArray, LocalRelabeling, apply_relabeling, chsh, enumerate_vertices,
    local_orbit, make_array, marginals, pr_orbit, signaling_report, sim_success_probability,
)
from .polytope import (
    affine_dimension, chsh_facet_check, decompose, membership_local, membership_nosignaling,
    two_decompositions,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationArray", "LocalRelabeling", "affine_dimension", "apply_relabeling", "chsh",
    "chsh_facet_check", "decompose", "enumerate_vertices", "local_orbit", "make_array",
    "marginals", "membership_local", "membership_nosignaling", "pr_orbit", "signaling_report",
    "sim_success_probability", "two_decompositions",
]
