"""Closed-form Laplacian spectra for paths, cycles, grids and cylinder grids.

Eigenvalues are kept exact as ``4 - 2(cos(t1 π) + cos(t2 π))`` with rational
``t1, t2``; single factors use ``t2 = 0`` so the value is ``2 - 2 cos(t1 π)``.
Grouping into eigenspaces never compares floats: it goes through
:func:`gridctrl.diophantine.enumerate_coincidences`.  :func:`numeric_spectrum`
is the independent floating-point oracle.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diophantine import (
    RationalAngle,
    characteristic_parts_equal,
    enumerate_coincidences,
)
from .errors import ContractError, DimensionError, UsageError
from .graphs import GraphSpec, Topology

ZERO = RationalAngle(0, 1)


@dataclass(frozen=True, eq=False)
class ExactEigenvalue:
    t1: RationalAngle
    t2: RationalAngle = ZERO

    @property
    def value(self) -> float:
        return 4.0 - 2.0 * (self.t1.cos() + self.t2.cos())

    def __float__(self) -> float:
        return self.value

    def __eq__(self, other):
        if not isinstance(other, ExactEigenvalue):
            return NotImplemented
        return characteristic_parts_equal(self.t1, self.t2, other.t1, other.t2)

    __hash__ = None  # equality is not structural

    def __repr__(self) -> str:
        return f"ExactEigenvalue(4-2(cos({self.t1}π)+cos({self.t2}π)) ≈ {self.value:.12g})"


class FactorFamily(str, enum.Enum):
    PATH = "path"
    CYCLE = "cycle"


@dataclass(frozen=True)
class EigenvectorFactor:
    """Closed-form eigenvector of a path (``alpha = 0..m-1``) or cycle (``alpha = 1..m``)."""

    family: FactorFamily
    alpha: int
    m: int

    def entries(self) -> np.ndarray:
        """Entries for ``k = 1..m``; complex exponentials for cycles."""
        k = np.arange(1, self.m + 1)
        if self.family is FactorFamily.PATH:
            if self.alpha == 0:
                return np.full(self.m, 1.0 / math.sqrt(self.m))
            return math.sqrt(2.0 / self.m) * np.cos(self.alpha * (2 * k - 1) * np.pi / (2 * self.m))
        return np.exp(1j * 2 * np.pi * self.alpha * k / self.m)

    def real_entries(self) -> np.ndarray:
        """Real unit vector spanning the same (pairwise) eigenspace.

        For a cycle, ``alpha`` and ``m - alpha`` share an eigenvalue; the smaller
        index gets the cosine vector and the larger the sine vector, ``alpha = m``
        the constant vector and ``alpha = m/2`` the alternating one.
        """
        if self.family is FactorFamily.PATH:
            return self.entries()
        m, a = self.m, self.alpha
        k = np.arange(1, m + 1)
        if a % m == 0:
            return np.full(m, 1.0 / math.sqrt(m))
        if 2 * a == m:
            return (-1.0) ** k / math.sqrt(m)
        phase = 2 * np.pi * a * k / m
        if 2 * a < m:
            return math.sqrt(2.0 / m) * np.cos(phase)
        return math.sqrt(2.0 / m) * np.sin(phase)


def path_spectrum(m: int) -> list[tuple[ExactEigenvalue, EigenvectorFactor]]:
    if m < 1:
        raise DimensionError(f"path needs m >= 1, got {m}")
    return [
        (ExactEigenvalue(RationalAngle.of(a, m)), EigenvectorFactor(FactorFamily.PATH, a, m))
        for a in range(m)
    ]


def cycle_spectrum(m: int) -> list[tuple[ExactEigenvalue, EigenvectorFactor]]:
    if m < 3:
        raise DimensionError(f"cycle needs m >= 3, got {m}")
    return [
        (ExactEigenvalue(RationalAngle.folded(Fraction(2 * a, m))), EigenvectorFactor(FactorFamily.CYCLE, a, m))
        for a in range(1, m + 1)
    ]


@dataclass(frozen=True, eq=False)
class EigenspaceBasis:
    """One eigenvalue of ``spec`` with its closed-form eigenvector generators.

    ``members`` are ``(alpha, beta)`` pairs; for a single path or cycle
    ``beta`` is always 0.
    """

    spec: GraphSpec
    eigenvalue: ExactEigenvalue
    members: tuple[tuple[int, int], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def value(self) -> float:
        return self.eigenvalue.value

    def factors(self, member: tuple[int, int]) -> tuple[EigenvectorFactor, EigenvectorFactor | None]:
        alpha, beta = member
        topo = self.spec.topology
        outer_family = FactorFamily.PATH if topo in (Topology.PATH, Topology.GRID) else FactorFamily.CYCLE
        outer = EigenvectorFactor(outer_family, alpha, self.spec.m)
        inner = EigenvectorFactor(FactorFamily.PATH, beta, self.spec.n) if topo.is_product else None
        return outer, inner

    def vectors(self) -> list[np.ndarray]:
        """Closed-form eigenvectors (complex for cycle factors)."""
        out = []
        for member in self.members:
            outer, inner = self.factors(member)
            v = outer.entries()
            out.append(v if inner is None else np.kron(v, inner.entries()))
        return out

    @functools.cached_property
    def _real_basis(self) -> np.ndarray:
        cols = []
        for member in self.members:
            outer, inner = self.factors(member)
            v = outer.real_entries()
            cols.append(v if inner is None else np.kron(v, inner.real_entries()))
        basis = np.column_stack(cols)
        basis.flags.writeable = False
        return basis

    def real_basis(self) -> np.ndarray:
        """``N × r`` real matrix with orthonormal columns spanning the eigenspace (read-only)."""
        return self._real_basis


def _single_factor_spaces(spec: GraphSpec) -> list[EigenspaceBasis]:
    pairs = path_spectrum(spec.m) if spec.topology is Topology.PATH else cycle_spectrum(spec.m)
    # 2 - 2cos(tπ) is injective on [0, 1], so equal angles <=> equal eigenvalues
    groups: dict[RationalAngle, list[int]] = {}
    for ev, factor in pairs:
        groups.setdefault(ev.t1, []).append(factor.alpha)
    spaces = [
        EigenspaceBasis(spec, ExactEigenvalue(t), tuple((a, 0) for a in sorted(alphas)))
        for t, alphas in groups.items()
    ]
    return sorted(spaces, key=lambda s: s.eigenvalue.t1.fraction)


def _angle_pair(spec: GraphSpec, member: tuple[int, int]) -> ExactEigenvalue:
    alpha, beta = member
    if spec.topology is Topology.GRID:
        t1 = RationalAngle.of(alpha, spec.m)
    else:
        t1 = RationalAngle.folded(Fraction(2 * alpha, spec.m))
    return ExactEigenvalue(t1, RationalAngle.of(beta, spec.n))


@functools.lru_cache(maxsize=256)
def product_spectrum(spec: GraphSpec) -> tuple[EigenspaceBasis, ...]:
    """Eigenspaces of a grid or cylinder grid Laplacian, ascending by eigenvalue."""
    if not spec.topology.is_product:
        raise UsageError(f"{spec} is not a product graph; use path_spectrum/cycle_spectrum")
    return tuple(
        EigenspaceBasis(spec, _angle_pair(spec, cls[0]), cls)
        for cls in enumerate_coincidences(spec)
    )


def eigenspaces(spec: GraphSpec) -> tuple[EigenspaceBasis, ...]:
    """Exact eigenspaces for any of the four topologies (cached per spec)."""
    if spec.topology.is_product:
        return product_spectrum(spec)
    return tuple(_single_factor_spaces(spec))


@dataclass(frozen=True)
class NumericGroup:
    values: tuple[float, ...]

    @property
    def value(self) -> float:
        return float(np.mean(self.values))

    @property
    def multiplicity(self) -> int:
        return len(self.values)


def numeric_spectrum(L, tol: float = 1e-8) -> list[NumericGroup]:
    """Ascending eigenvalues of a symmetric matrix, chained into groups.

    Consecutive eigenvalues closer than ``tol`` land in the same group.
    """
    if tol <= 0:
        raise ContractError(f"tol must be positive, got {tol}")
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {L.shape}")
    if not np.array_equal(L, L.T):
        raise ContractError("numeric_spectrum needs a symmetric matrix")
    w = np.linalg.eigvalsh(L)
    groups: list[list[float]] = []
    for x in w:
        if groups and x - groups[-1][-1] <= tol:
            groups[-1].append(float(x))
        else:
            groups.append([float(x)])
    return [NumericGroup(tuple(g)) for g in groups]


def spectrum_rows(spec: GraphSpec) -> list[dict]:
    """One row per ``(alpha, beta)`` with exact angles, value and class id."""
    rows = []
    for class_id, space in enumerate(eigenspaces(spec)):
        for alpha, beta in space.members:
            if spec.topology.is_product:
                ev = _angle_pair(spec, (alpha, beta))
            else:
                ev = space.eigenvalue
            rows.append(
                {
                    "alpha": alpha,
                    "beta": beta,
                    "p1/q1": str(ev.t1),
                    "p2/q2": str(ev.t2),
                    "numeric_value": ev.value,
                    "multiplicity_class_id": class_id,
                }
            )
    return rows
