"""Controllability of Laplacian dynamics and of the linearized Turing model.

First-order system: ``ż = L z + B̄ u`` with ``B̄`` a 0/1 node-selection matrix.
Second-order (Turing) lift: state ``[z1; z2]`` with

    A  = [[-ν1 L + a I, b I], [c I, -ν2 L + d I]]
    B̃ = [[B, 0], [0, C]]

PBH tests run per exact eigenspace (rank of ``Uᵀ B̄`` for an orthonormal real
basis ``U``).  The Kalman rank is the independent oracle; for integer inputs it
is computed exactly over prime fields, otherwise by an orthogonalized block
Krylov iteration.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, DimensionError, OutOfScopeError, ShapeError
from .graphs import GraphSpec, NodeIndex, Topology, build_laplacian, node_from_linear, node_index
from .multiplicity import phi
from .spectra import EigenspaceBasis, ExactEigenvalue, eigenspaces

RANK_TOL = 1e-9
DEGENERACY_TOL = 1e-9

# Largest primes below 2**25: products of two residues stay below 2**50, so
# int64 dot products over up to 2**13 terms cannot overflow.
_PRIMES = (33554393, 33554383)


@dataclass(frozen=True)
class ControlSet:
    nodes: tuple[int, ...]
    node_count: int

    def __post_init__(self):
        nodes = tuple(int(i) for i in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise ContractError("a control set needs at least one node")
        if len(set(nodes)) != len(nodes):
            raise ContractError(f"control nodes must be distinct, got {nodes}")
        bad = [i for i in nodes if not 0 <= i < self.node_count]
        if bad:
            raise ContractError(f"control nodes {bad} outside [0, {self.node_count})")

    @classmethod
    def for_spec(cls, spec: GraphSpec, nodes: Iterable) -> "ControlSet":
        """Build from linear indices, :class:`NodeIndex` values or ``(outer, inner)`` pairs."""
        linear = []
        for node in nodes:
            if isinstance(node, NodeIndex):
                linear.append(node.linear)
            elif isinstance(node, (tuple, list)):
                linear.append(node_index(spec, *node).linear)
            else:
                linear.append(node_from_linear(spec, int(node)).linear)
        return cls(tuple(linear), spec.node_count)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def matrix(self) -> np.ndarray:
        M = np.zeros((self.node_count, len(self.nodes)), dtype=np.int64)
        M[list(self.nodes), np.arange(len(self.nodes))] = 1
        return M


def _as_control(spec: GraphSpec, control) -> ControlSet | None:
    if control is None:
        return None
    if isinstance(control, ControlSet):
        if control.node_count != spec.node_count:
            raise ContractError(f"control set is for {control.node_count} nodes, {spec} has {spec.node_count}")
        return control
    nodes = list(control)
    if not nodes:
        return None
    return ControlSet.for_spec(spec, nodes)


class Method(str, enum.Enum):
    PBH_EXACT = "pbh_exact"
    KALMAN_NUMERIC = "kalman_numeric"
    PROP1_REDUCTION = "prop1_reduction"
    PROP2_REDUCTION = "prop2_reduction"
    DIRECT_LIFT = "direct_lift"


@dataclass(frozen=True)
class ControllabilityReport:
    controllable: bool
    method: Method
    failing_eigenspace: ExactEigenvalue | None = None
    failing_multiplicity: int | None = None
    rank_found: int | None = None
    rank_required: int | None = None

    def __post_init__(self):
        if not self.controllable and self.method is Method.PBH_EXACT and self.failing_eigenspace is None:
            raise ContractError("an uncontrollable PBH verdict must name the failing eigenspace")

    def to_dict(self) -> dict:
        failing = None
        if self.failing_eigenspace is not None:
            ev = self.failing_eigenspace
            failing = {
                "t1": str(ev.t1),
                "t2": str(ev.t2),
                "value": ev.value,
                "multiplicity": self.failing_multiplicity,
            }
        return {
            "controllable": self.controllable,
            "method": self.method.value,
            "failing_eigenspace": failing,
            "rank_found": self.rank_found,
            "rank_required": self.rank_required,
        }


def _numeric_rank(M: np.ndarray, threshold: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.count_nonzero(s > threshold))


def pbh_test(spec: GraphSpec, control, tol: float = RANK_TOL) -> ControllabilityReport:
    """PBH test of ``(L, B̄)`` over the exact eigenspaces of ``spec``.

    ``rank_found`` is the summed per-eigenspace rank, i.e. the dimension of the
    controllable subspace; ``rank_required`` is ``N``.
    """
    control = _as_control(spec, control)
    if control is None:
        raise ContractError("pbh_test needs a non-empty control set")
    B = control.matrix.astype(float)
    # B̄ has orthonormal columns, so its largest singular value is 1
    threshold = tol
    total = 0
    failing: EigenspaceBasis | None = None
    for space in eigenspaces(spec):
        r = space.multiplicity
        rank = _numeric_rank(space.real_basis().T @ B, threshold)
        total += rank
        if rank < r and failing is None:
            failing = space
    return ControllabilityReport(
        controllable=failing is None,
        method=Method.PBH_EXACT,
        failing_eigenspace=None if failing is None else failing.eigenvalue,
        failing_multiplicity=None if failing is None else failing.multiplicity,
        rank_found=total,
        rank_required=spec.node_count,
    )


def controllability_matrix(L, B) -> np.ndarray:
    """``[B, L B, ..., L^{N-1} B]`` (for small systems and reference use)."""
    L, B = _check_pair(L, B)
    blocks = [B]
    for _ in range(L.shape[0] - 1):
        blocks.append(L @ blocks[-1])
    return np.hstack(blocks)


def _check_pair(L, B) -> tuple[np.ndarray, np.ndarray]:
    L = np.asarray(L)
    B = np.asarray(B)
    if B.ndim == 1:
        B = B[:, None]
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ShapeError(f"state matrix must be square, got {L.shape}")
    if B.ndim != 2 or B.shape[0] != L.shape[0]:
        raise ShapeError(f"input matrix with shape {B.shape} does not match state dimension {L.shape[0]}")
    return L, B


def _is_integral(X: np.ndarray) -> bool:
    if np.issubdtype(X.dtype, np.integer) or X.dtype == bool:
        return True
    return bool(np.all(np.isfinite(X)) and np.all(X == np.round(X)))


def _krylov_rank_mod_p(L: np.ndarray, B: np.ndarray, p: int) -> int:
    N = L.shape[0]
    basis = np.zeros((0, N), dtype=np.int64)  # reduced row echelon form mod p
    pivots: list[int] = []
    frontier = np.mod(B.T, p)
    while frontier.shape[0] and len(pivots) < N:
        added = []
        for v in frontier:
            if pivots:
                v = np.mod(v - v[pivots] @ basis, p)
            nz = np.flatnonzero(v)
            if nz.size == 0:
                continue
            c = int(nz[0])
            v = np.mod(v * pow(int(v[c]), p - 2, p), p)
            if pivots:
                basis = np.mod(basis - np.outer(basis[:, c], v), p)
            basis = np.vstack([basis, v])
            pivots.append(c)
            added.append(v)
            if len(pivots) == N:
                break
        if not added:
            break
        # L keeps its small signed entries; only the product is reduced
        frontier = np.mod(np.array(added) @ L.T, p)
    return len(pivots)


def _krylov_rank_numeric(A: np.ndarray, B: np.ndarray, tol: float) -> int:
    N = A.shape[0]
    scale = max(np.linalg.norm(A, 2), 1.0)
    U, s, _ = np.linalg.svd(B.astype(float), full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return 0
    Q = U[:, s > tol * s[0]]
    frontier = Q
    while Q.shape[1] < N and frontier.shape[1]:
        W = (A @ frontier) / scale
        for _ in range(2):
            W = W - Q @ (Q.T @ W)
        U, s, _ = np.linalg.svd(W, full_matrices=False)
        frontier = U[:, s > tol]
        Q = np.hstack([Q, frontier])
    return min(Q.shape[1], N)


def kalman_rank(L, B, tol: float = RANK_TOL, exact: bool | None = None) -> int:
    """Rank of the Kalman matrix ``[B, L B, ..., L^{N-1} B]``.

    The Krylov space is grown block by block instead of forming powers of
    ``L`` (whose columns lose all precision long before ``N = 100``).  With
    integer ``L`` and ``B`` (graph Laplacians, 0/1 inputs) the rank is exact:
    ranks modulo two large primes are lower bounds on the rational rank and
    coincide with it except on a negligible set of primes.  Otherwise new
    directions are kept when their orthogonalized norm exceeds ``tol``.
    """
    L, B = _check_pair(L, B)
    if exact is None:
        exact = _is_integral(L) and _is_integral(B)
    if exact:
        Li = np.round(L).astype(np.int64)
        Bi = np.round(B).astype(np.int64)
        if np.abs(Li).sum(axis=1).max(initial=0) * _PRIMES[0] >= 2**62:
            raise ContractError("integer entries too large for exact modular rank")
        return max(_krylov_rank_mod_p(Li, Bi, p) for p in _PRIMES)
    return _krylov_rank_numeric(np.asarray(L, dtype=float), np.asarray(B, dtype=float), tol)


def min_control_set(spec: GraphSpec) -> ControlSet:
    """Constructive minimal control set.

    Grid: the first ``psi`` nodes of row 0.  Cylinder: ``psi`` consecutive
    cycle positions at path index 0.
    """
    k = phi(spec)
    if spec.topology is Topology.GRID:
        if k > spec.n:
            raise DimensionError(f"{spec}: psi={k} exceeds the row length {spec.n}")
        nodes = [node_index(spec, 0, j) for j in range(k)]
    elif spec.topology is Topology.CYLINDER:
        if k > spec.m:
            raise DimensionError(f"{spec}: psi={k} exceeds the cycle length {spec.m}")
        nodes = [node_index(spec, i, 0) for i in range(k)]
    else:
        raise OutOfScopeError(f"minimal control sets are constructed for products only, not {spec}")
    return ControlSet.for_spec(spec, nodes)


def lemma2_lower_bound(spec: GraphSpec, control) -> EigenspaceBasis | None:
    """First eigenspace whose multiplicity exceeds ``rank(B̄) = |control|``.

    Such an eigenspace certifies that ``(L, B̄)`` is uncontrollable.
    """
    control = _as_control(spec, control)
    rho = 0 if control is None else len(control)
    for space in eigenspaces(spec):
        if space.multiplicity > rho:
            return space
    return None


@dataclass(frozen=True)
class ModelParams:
    a: float
    b: float
    c: float
    d: float
    nu1: float
    nu2: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "nu1", "nu2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ContractError(f"parameter {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.nu1 <= 0 or self.nu2 <= 0:
            raise ContractError(f"diffusion coefficients must be positive, got nu1={self.nu1}, nu2={self.nu2}")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "ModelParams":
        if len(values) != 6:
            raise ContractError(f"expected 6 parameters (a,b,c,d,nu1,nu2), got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.nu1, self.nu2)


@dataclass(frozen=True)
class ModeRoots:
    lam: float
    delta: float
    s1: complex
    s2: complex
    k1: complex | None
    k2: complex | None

    @property
    def k_defined(self) -> bool:
        return self.k1 is not None


def discriminant(params: ModelParams, lam) -> float:
    return ((params.nu2 - params.nu1) * lam + (params.a - params.d)) ** 2 + 4 * params.b * params.c


def mode_roots(params: ModelParams, lam: float) -> ModeRoots:
    """Eigenvalues ``s1, s2`` of ``A`` on the Laplacian mode ``lam`` and the
    left-eigenvector ratios ``k1, k2`` (undefined when ``c == 0``)."""
    p = params
    lam = float(lam)
    delta = discriminant(p, lam)
    root = cmath.sqrt(delta)
    trace = (-p.nu1 * lam + p.a) + (-p.nu2 * lam + p.d)
    s1 = (trace + root) / 2
    s2 = (trace - root) / 2
    if p.c == 0:
        k1 = k2 = None
    else:
        lin = (p.nu2 - p.nu1) * lam + (p.a - p.d)
        k1 = (-lin + root) / (2 * p.c)
        k2 = (-lin - root) / (2 * p.c)
    return ModeRoots(lam, delta, s1, s2, k1, k2)


@dataclass(frozen=True)
class DegeneracyReport:
    in_s1: bool
    in_s2: bool
    s1_witnesses: tuple = ()  # (lambda1, lambda2, j, l)
    s2_witnesses: tuple = ()  # lambda

    @property
    def degenerate(self) -> bool:
        return self.in_s1 or self.in_s2

    def to_dict(self) -> dict:
        return {
            "in_S1": self.in_s1,
            "in_S2": self.in_s2,
            "S1_witnesses": [list(w) for w in self.s1_witnesses],
            "S2_witnesses": list(self.s2_witnesses),
        }


def distinct_eigenvalues(spec: GraphSpec) -> list[float]:
    return [space.value for space in eigenspaces(spec)]


def in_degenerate_set(params: ModelParams, spec: GraphSpec, tol: float = DEGENERACY_TOL) -> DegeneracyReport:
    """Whether ``params`` sit (within ``tol``) on the exceptional sets S1 / S2.

    S2: ``Δ(λ) = 0`` for an eigenvalue ``λ`` of ``L``.  S1: ``s_j(λ1) = s_l(λ2)``
    for two distinct eigenvalues.
    """
    if tol <= 0:
        raise ContractError(f"tol must be positive, got {tol}")
    lams = distinct_eigenvalues(spec)
    roots = [mode_roots(params, lam) for lam in lams]
    s2 = tuple(r.lam for r in roots if abs(r.delta) <= tol)

    S = np.array([[r.s1, r.s2] for r in roots])  # K × 2 complex
    s1 = []
    for j in range(2):
        for l in range(2):
            diff = np.abs(S[:, j][:, None] - S[:, l][None, :])
            np.fill_diagonal(diff, np.inf)
            for i1, i2 in zip(*np.nonzero(diff <= tol)):
                if j == l and i1 > i2:
                    continue  # symmetric duplicate
                s1.append((lams[i1], lams[i2], j + 1, l + 1))
    return DegeneracyReport(bool(s1), bool(s2), tuple(s1), s2)


@dataclass(frozen=True)
class SecondOrderSystem:
    A: np.ndarray
    Btilde: np.ndarray
    spec: GraphSpec
    params: ModelParams
    B: ControlSet | None = None
    C: ControlSet | None = None

    @property
    def N(self) -> int:
        return self.spec.node_count

    @property
    def kappa(self) -> int:
        return 0 if self.B is None else len(self.B)

    @property
    def tau(self) -> int:
        return 0 if self.C is None else len(self.C)


def build_second_order(params: ModelParams, spec: GraphSpec, B=None, C=None) -> SecondOrderSystem:
    """Assemble ``A`` and ``B̃`` for the controlled linearized Turing model.

    An empty or missing ``B`` / ``C`` contributes zero columns.
    """
    B = _as_control(spec, B)
    C = _as_control(spec, C)
    if B is None and C is None:
        raise ContractError("at least one of B, C must be non-empty")
    N = spec.node_count
    L = build_laplacian(spec).astype(float)
    I = np.eye(N)
    A = np.block([[-params.nu1 * L + params.a * I, params.b * I], [params.c * I, -params.nu2 * L + params.d * I]])
    Bm = np.zeros((N, 0)) if B is None else B.matrix.astype(float)
    Cm = np.zeros((N, 0)) if C is None else C.matrix.astype(float)
    Btilde = np.block(
        [[Bm, np.zeros((N, Cm.shape[1]))], [np.zeros((N, Bm.shape[1])), Cm]]
    )
    return SecondOrderSystem(A, Btilde, spec, params, B, C)


def combined_control(spec: GraphSpec, B, C) -> ControlSet:
    """``[B C]`` with repeated nodes kept once."""
    B = _as_control(spec, B)
    C = _as_control(spec, C)
    nodes: list[int] = []
    for cs in (B, C):
        if cs is not None:
            nodes.extend(i for i in cs.nodes if i not in nodes)
    if not nodes:
        raise ContractError("at least one of B, C must be non-empty")
    return ControlSet(tuple(nodes), spec.node_count)


def second_order_controllable(
    params: ModelParams,
    spec: GraphSpec,
    B=None,
    C=None,
    tol: float = RANK_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> ControllabilityReport:
    """Controllability of ``(A, B̃)`` via the cheapest valid route.

    1. ``(L, [B C])`` must be controllable (necessary in all cases).
    2. ``B == C`` as node sets: equivalent to ``(L, B)``.
    3. ``b, c != 0`` and params clear of S1 ∪ S2: equivalent to ``(L, [B C])``.
    4. Otherwise: Kalman rank of ``(A, B̃)`` directly.
    """
    Bs = _as_control(spec, B)
    Cs = _as_control(spec, C)
    union = combined_control(spec, Bs, Cs)
    N = spec.node_count

    same = Bs is not None and Cs is not None and set(Bs.nodes) == set(Cs.nodes)
    if same:
        method = Method.PROP1_REDUCTION
    elif params.b != 0 and params.c != 0 and not in_degenerate_set(params, spec, degeneracy_tol).degenerate:
        method = Method.PROP2_REDUCTION
    else:
        method = Method.DIRECT_LIFT

    necessary = pbh_test(spec, union, tol)
    if not necessary.controllable or method is not Method.DIRECT_LIFT:
        return ControllabilityReport(
            controllable=necessary.controllable,
            method=method,
            failing_eigenspace=necessary.failing_eigenspace,
            failing_multiplicity=necessary.failing_multiplicity,
            rank_found=2 * necessary.rank_found,
            rank_required=2 * N,
        )

    system = build_second_order(params, spec, Bs, Cs)
    rank = kalman_rank(system.A, system.Btilde, tol)
    return ControllabilityReport(
        controllable=rank == 2 * N,
        method=Method.DIRECT_LIFT,
        rank_found=rank,
        rank_required=2 * N,
    )
