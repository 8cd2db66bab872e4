"""Cycles of projections onto closed convex sets in R^n.

Computes the gap displacement and gap vector of ``m`` convex sets by two
independent solvers and checks the associated set identity numerically.
"""

from .config import DEFAULT_TOL, Tolerances
from .exceptions import (ConsistencyError, CycleGapError, DimensionError, ScenarioError,
                         SetDefinitionError, SolverError)
from .hilbert import LinearSolver, inner_product, norm, solve_dense
from .operators import CycleOperators, cyclic_shift_matrix, identity_violations, isometry_defect
from .sets import (Affine, Ball, Box, ConvexSet, Halfspace, Hyperplane, ProductSet, Simplex,
                   Singleton, Translate, set_from_dict)
from .solvers import (CycleResult, GapResult, dr_gap_solve, gap_vector, km_fixed_point,
                      membership_D, saddle_residual, support_prox)
from .verify import (CheckRecord, check_cycle, check_pthm_equivalence, cycle_through,
                     d_bound_check, saddle_check, verify_geometry)
from .scenario import Scenario, load_scenario, run

__version__ = "0.1.0"
