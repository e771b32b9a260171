"""Inverse of a matrix along another matrix, over C and over Z_n.

``b = a||d`` is the unique ``b`` with ``bab = b`` whose column and row spaces
are those of ``d``.  The package computes it by a block formula, spectral
resolvents, limits, Neumann series and an integral, specialises it to the
classical generalized inverses, and checks identities about it instance by
instance.
"""

from ._accel import backend
from .classical import (
    DrazinResult,
    WeightPair,
    drazin_inverse,
    group_inverse,
    make_weights,
    moore_penrose_via_mary,
    weighted_mp,
    weighted_mp_via_uv,
)
from .errors import (
    AlongInvError,
    BadInnerInverse,
    BudgetExceeded,
    ContractionFailed,
    ConvergenceError,
    InputError,
    MaxTermsExceeded,
    NotInvertible,
    NotInvertibleAlong,
    PreconditionViolated,
    QuadratureNotConverged,
    SingularResolvent,
    SpectrumViolation,
)
from .inner import InnerInverse, is_inner_inverse, moore_penrose, random_inner_inverse
from .mary import (
    ExistenceReport,
    MaryProblem,
    MaryResult,
    Method,
    definition_check,
    exists_along,
    inverse_along_block,
    inverse_along_spectral,
    inverse_along_spectral_mirror,
    make_problem,
    spectral_idempotent_ad,
    spectral_idempotent_da,
)
from .numeric import DEFAULT_TOL, Tolerance, cmatrix, expm, invert, op_norm, rank, spectrum
from .representations import (
    LimitSchedule,
    QuadParams,
    SeriesParams,
    auto_beta,
    inverse_along_integral,
    inverse_along_integral_mirror,
    inverse_along_limit,
    inverse_along_limit_mirror,
    inverse_along_series,
    limit_error_bound,
    limit_with_lhs,
    limit_with_rhs,
)
from .theorems import VerdictReport
from .zn import ZnMatrix, ZnScalar, zn_exists_along, zn_inner_inverses, zn_mary_inverse, zn_square_roots

__version__ = "0.1.0"
