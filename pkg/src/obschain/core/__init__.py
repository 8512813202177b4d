"""Foundational numerics: states, Haar sampling, orthogonal polynomials, spin."""

from .combinat import log_binomial, sym_dim
from .encoding import OptimalEncoding, optimal_encoding
from .orthopoly import (
    BESSEL_J0_FIRST_ZERO,
    jacobi_max_eigenpair,
    jacobi_offdiag,
    legendre_largest_zero,
    legendre_pn,
)
from .sampling import haar_state, haar_states, haar_unitaries, haar_unitary
from .spin import spin_coherent_amplitudes, sqrt_binomials
from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    bloch_from_density,
    bloch_from_pure,
    density_from_bloch,
    density_from_pure,
    gell_mann,
    kappa,
    pure_overlap_from_bloch,
)

__all__ = [
    "BESSEL_J0_FIRST_ZERO",
    "BlochVector",
    "DensityMatrix",
    "OptimalEncoding",
    "PureState",
    "bloch_from_density",
    "bloch_from_pure",
    "density_from_bloch",
    "density_from_pure",
    "gell_mann",
    "haar_state",
    "haar_states",
    "haar_unitaries",
    "haar_unitary",
    "jacobi_max_eigenpair",
    "jacobi_offdiag",
    "kappa",
    "legendre_largest_zero",
    "legendre_pn",
    "log_binomial",
    "optimal_encoding",
    "pure_overlap_from_bloch",
    "spin_coherent_amplitudes",
    "sqrt_binomials",
    "sym_dim",
]
