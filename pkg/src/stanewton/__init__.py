"""Riemannian Newton methods for low-rank approximation of symmetric tensors."""
from .errors import *  # noqa: F401,F403
from .hankel import build_hankel, theta
from .initial import InitReport, random_init, shd_init
from .manifold import Decomposition, retract_product, retract_veronese, tangent_basis
from .objective import bundle, gradient_real, hessian_real, objective_value
from .poly import (
    HomPoly,
    apolar,
    apolar_norm,
    entries_to_poly,
    evaluate,
    from_decomposition,
    random_gaussian_poly,
    veronese,
)
from .rank1 import Rank1Result, best_rank1
from .solver import ApproxResult, SolverOptions, rns, rns_tr, solve

__version__ = "0.1.0"
