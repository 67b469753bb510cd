"""Desk-scale simulator of gradient descent over a block-encoding calculus.

The package exposes four layers: monomial objectives with exact symbolic
differentiation (polyfunc), the corner-block encoding calculus with resource
accounting (blockcalc), polynomial approximation of scalar derivatives
(chebyshev), and the descent engines plus the classical reference oracle
(descent, oracle).  The blockgd CLI batch-runs experiment configs and emits
traces, comparison reports, and cost tables.
"""

from .blockcalc import (
    AuditLog,
    BlockEncoding,
    PostSelection,
    ResourceCounter,
    amplify,
    apply_postselect,
    diag_encode,
    entry_project,
    identity_encoding,
    lcu,
    product,
    projector_encode,
    qsvt_transform,
    realize_dilation,
    scale_down,
    tensor,
)
from .chebyshev import (
    ChebyshevPoly,
    ScalarFunction,
    SeparableObjective,
    approx_derivative,
    load_scalar_function,
)
from .descent import (
    CostParams,
    DescentConfig,
    DescentTrace,
    build_gradient_be,
    build_partial_be,
    eta_generic,
    gd_step_generic,
    gd_step_separable,
    initial_state_uniform,
    resource_predict,
    run_generic,
    run_separable,
)
from .oracle import OracleTrace, classical_gd, finite_diff_grad
from .polyfunc import (
    BoundsReport,
    MonomialTerm,
    ObjectiveFunction,
    TermStats,
    load_objective,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "AuditLog",
    "BlockEncoding",
    "BoundsReport",
    "ChebyshevPoly",
    "CostParams",
    "DescentConfig",
    "DescentTrace",
    "MonomialTerm",
    "ObjectiveFunction",
    "OracleTrace",
    "PostSelection",
    "ResourceCounter",
    "ScalarFunction",
    "SeparableObjective",
    "TermStats",
    "amplify",
    "apply_postselect",
    "approx_derivative",
    "build_gradient_be",
    "build_partial_be",
    "classical_gd",
    "diag_encode",
    "entry_project",
    "errors",
    "eta_generic",
    "finite_diff_grad",
    "gd_step_generic",
    "gd_step_separable",
    "identity_encoding",
    "initial_state_uniform",
    "lcu",
    "load_objective",
    "load_scalar_function",
    "product",
    "projector_encode",
    "qsvt_transform",
    "realize_dilation",
    "resource_predict",
    "run_generic",
    "run_separable",
    "scale_down",
    "tensor",
]
