"""Exact spectra, minimal control sets and controllability for Laplacian
dynamics on grid and cylinder grid graphs."""

from __future__ import annotations

__version__ = "0.1.0"

from .controllability import (
    ControllabilityReport,
    ControlSet,
    ModelParams,
    ModeRoots,
    SecondOrderSystem,
    build_second_order,
    in_degenerate_set,
    kalman_rank,
    lemma2_lower_bound,
    min_control_set,
    mode_roots,
    pbh_test,
    second_order_controllable,
)
from .diophantine import (
    Quadruple,
    RationalAngle,
    SolutionClass,
    SolutionKind,
    characteristic_parts_equal,
    classify_quadruple,
    enumerate_coincidences,
)
from .errors import (
    ConsistencyError,
    ContractError,
    DimensionError,
    GridCtrlError,
    InfeasiblePlanError,
    NodeIndexError,
    OutOfScopeError,
    ShapeError,
    UsageError,
)
from .graphs import GraphSpec, NodeIndex, Topology, build_laplacian, kronecker_sum, node_index
from .multiplicity import exact_multiplicity_report, phi, psi_cylinder, psi_grid, sporadic_determinant_check
from .sim import SteeringPlan, Trajectory, export_pattern, gramian_steer, integrate
from .spectra import EigenspaceBasis, ExactEigenvalue, eigenspaces, numeric_spectrum
