"""Fidelity-optimal quantum measurements.

Construct, classify and verify POVMs whose outcome statistics attain the
quantum fidelity (or the trace distance) between two density operators.
"""

__version__ = "0.1.0"

from .config import DEFAULT_TOL, PROFILES, ToleranceConfig, get_profile
from .divergences import (DivergenceReport, bhattacharyya, classical_fidelity,
                          divergence_report, fidelity, fvdg_bounds, helstrom_success,
                          induced_fidelity, induced_trace_distance, total_variation,
                          trace_distance)
from .errors import (DimensionError, FidoptError, IdenticalStatesError, InfeasibleError,
                     InvalidPovmError, InvalidStateError, NonFiniteError, NotHermitianError,
                     NotPSDError, OptimalityDiagnosticWarning, SingularSumError)
from .geomean import GeometricMeanReport, geometric_mean, gm_equivalence_flags
from .instances import InstanceSpec
from .optimal import (DichotomyReport, OptimalityVerdict, build_canonical_pvm,
                      classify_dichotomy, mixing_family, restrict_to_joint_support,
                      verify_f_optimal)
from .pencil import PencilEigensystem, PolarUnitary, construct_polar_unitary, pencil_eigensystem
from .pure import (ArcSpec, BlochPoint, arc_povm, bloch_roundtrip, on_major_arc,
                   pure_pencil_eigensystem, reduce_pure_mixed)
from .states import (CoarseGrainingMap, DensityOperator, OutcomeDistribution, Povm,
                     coarse_grain, equivalent, is_simple, measure, simplify)
from .trace import JordanSplit, jordan_split, minimal_t_optimal, verify_t_optimal

__all__ = [name for name in dir() if not name.startswith("_")]
