"""H2-optimal model reduction of SISO LTI systems by rational Krylov
iteration, with numerical certification of fixed points for
state-space-symmetric systems."""

from .errors import (
    DegenerateError,
    FdMismatchWarning,
    IrkaLabError,
    MirroredShiftInvalid,
    NonZipReduced,
    NotAFixedPoint,
    PoleCollision,
    RankDeficientBasis,
    RepeatedPoles,
    ResidualTooLarge,
    SingularGramian,
    SingularShift,
    UnstableMatrix,
    UnstableSystem,
)
from .error_zeros import ErrorZeroReport, error_zeros, transmission_zeros
from .fileio import load_system, parse_system, save_system, system_to_dict
from .fixpoint import (
    AnalysisMatrices,
    FixedPointCertificate,
    assemble,
    certify,
    s_block_matrices,
    s_tilde_matrix,
    shift_map_jacobian_fd,
    verify_s_tilde_integral,
)
from .generators import diagonal_sss, random_sss, rc_ladder
from .h2 import H2ErrorReport, error_system, h2_error, h2_norm, lyapunov_solve
from .irka import (
    IrkaConfig,
    IterationTrace,
    initial_shifts,
    optimality_residuals,
    run_irka,
    shift_map,
)
from .projection import (
    HermiteResidual,
    ProjectionBasis,
    ShiftSet,
    build_bases,
    check_hermite,
    reduce,
)
from .systems import (
    Classification,
    PoleResidueForm,
    StateSpaceSystem,
    classify,
    eval_transfer,
    is_state_space_symmetric,
    minimal_sss_realization,
    to_pole_residue,
    transfer_values,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisMatrices",
    "Classification",
    "DegenerateError",
    "ErrorZeroReport",
    "FdMismatchWarning",
    "FixedPointCertificate",
    "H2ErrorReport",
    "HermiteResidual",
    "IrkaConfig",
    "IrkaLabError",
    "IterationTrace",
    "MirroredShiftInvalid",
    "NonZipReduced",
    "NotAFixedPoint",
    "PoleCollision",
    "PoleResidueForm",
    "ProjectionBasis",
    "RankDeficientBasis",
    "RepeatedPoles",
    "ResidualTooLarge",
    "ShiftSet",
    "SingularGramian",
    "SingularShift",
    "StateSpaceSystem",
    "UnstableMatrix",
    "UnstableSystem",
    "assemble",
    "build_bases",
    "certify",
    "check_hermite",
    "classify",
    "diagonal_sss",
    "error_system",
    "error_zeros",
    "eval_transfer",
    "h2_error",
    "h2_norm",
    "initial_shifts",
    "is_state_space_symmetric",
    "load_system",
    "lyapunov_solve",
    "minimal_sss_realization",
    "optimality_residuals",
    "parse_system",
    "random_sss",
    "rc_ladder",
    "reduce",
    "run_irka",
    "s_block_matrices",
    "s_tilde_matrix",
    "save_system",
    "shift_map",
    "shift_map_jacobian_fd",
    "system_to_dict",
    "to_pole_residue",
    "transfer_values",
    "transmission_zeros",
    "verify_s_tilde_integral",
]
