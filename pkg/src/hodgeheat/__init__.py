"""Hodge Laplacians of weighted simplicial complexes as signed Schrödinger operators.

Heat semigroups on finite complexes and numerical verification of kernel,
contraction, domination and resolvent-decay bounds.
"""

__version__ = "0.1.0"

from .complex import (ComplexError, WeightedComplex, build_complex, coboundary_apply,  # noqa: E402
                      boundary_apply, inner_product)
from .geometry import MetricData, fit_growth, simplex_metric, verify_intrinsic  # noqa: E402
from .heat import (contraction_check, dgg_check, domination_check, energy_monotonicity,  # noqa: E402
                   exhaustion_convergence, heat_kernel, heat_semigroup, l1_extension_check)
from .operators import (LaplacianMatrix, SchrodingerData, assemble_laplacian,  # noqa: E402
                        estimate_form_bound, extract_schrodinger, forman_curvature)
from .pipeline import prepare  # noqa: E402
from .reports import BoundReport  # noqa: E402
from .resolvent import resolvent, resolvent_decay_check  # noqa: E402
from .spectral import betti, spectrum  # noqa: E402

__all__ = [
    "BoundReport", "ComplexError", "LaplacianMatrix", "MetricData", "SchrodingerData",
    "WeightedComplex", "assemble_laplacian", "betti", "boundary_apply", "build_complex",
    "coboundary_apply", "contraction_check", "dgg_check", "domination_check",
    "energy_monotonicity", "estimate_form_bound", "exhaustion_convergence",
    "extract_schrodinger", "fit_growth", "forman_curvature", "heat_kernel", "heat_semigroup",
    "inner_product", "l1_extension_check", "prepare", "resolvent", "resolvent_decay_check",
    "simplex_metric", "spectrum", "verify_intrinsic",
]
