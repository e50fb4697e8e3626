"""Prime-by-prime decompositions of modular-form coefficients, with numerical checks."""

from .padic import Ball, PadicNumber, norm, qp_format, qp_parse, valuation
from .wavelets import (
    DivergenceError,
    SchwartzFunction,
    WaveletIndex,
    gram_matrix,
    integrate,
    kozyrev_wavelet,
    modified_wavelet,
    vladimirov_apply,
)
from .pmellin import MellinCoefficient, cp, inverse_mellin, mellin_transform
from .dirichlet import DirichletCharacter, character, characters_mod, gauss_sum
from .coeffs import CoefficientStream, product_dirichlet_stream, stream_from_descriptor, tau_stream
from .parton import PartonState, decompose, hecke_apply, inner_product_I, inner_product_II, reconstruct
from .analytic import bessel_k0, dirichlet_l, product_l, theta_series

__version__ = "0.1.0"

__all__ = [
    "Ball", "PadicNumber", "norm", "qp_format", "qp_parse", "valuation",
    "DivergenceError", "SchwartzFunction", "WaveletIndex", "gram_matrix", "integrate",
    "kozyrev_wavelet", "modified_wavelet", "vladimirov_apply",
    "MellinCoefficient", "cp", "inverse_mellin", "mellin_transform",
    "DirichletCharacter", "character", "characters_mod", "gauss_sum",
    "CoefficientStream", "product_dirichlet_stream", "stream_from_descriptor", "tau_stream",
    "PartonState", "decompose", "hecke_apply", "inner_product_I", "inner_product_II", "reconstruct",
    "bessel_k0", "dirichlet_l", "product_l", "theta_series",
]
