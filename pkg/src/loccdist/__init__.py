"""Statistical distance between pure multipartite states under global and LOCC measurements."""

__version__ = "0.1.0"

from .equidiag import EquiDiagResult, equi_diagonalize, numerical_range_contains, solve_pair_rotation
from .locc import Transcript, check_stage_cascade, discriminate_orthogonal, locc_distance, run_locc
from .measure import (Povm, ProbDist, bhattacharyya_angle, global_distance, measurement_distance,
                      outcome_distribution, validate_povm)
from .mixed import MixedState, bures_angle, mixed_measurement_distance, transition_equidiag_gap
from .oracle import SearchConfig, optimize_global_measurement, sample_bound_check
from .statekit import (Dyad, PartyLayout, PureState, condition_dyad, inner_product,
                       partial_trace_dyad, random_pure_state, random_state_pair)
