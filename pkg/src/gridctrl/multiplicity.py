"""Largest eigenvalue multiplicity and minimal control-node counts.

``psi_grid`` and ``psi_cylinder`` are the closed-form case tables for grid and
cylinder grid Laplacians.  :func:`exact_multiplicity_report` always recomputes
the same number by exact enumeration and raises on disagreement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diophantine import SolutionKind, characteristic_parts_relation
from .errors import ConsistencyError, ContractError, DimensionError, OutOfScopeError
from .graphs import GraphSpec, Topology
from .spectra import EigenspaceBasis, EigenvectorFactor, FactorFamily, product_spectrum

DEFAULT_NODE_CAP = 10_000


def _div(p: int, x: int) -> bool:
    return x % p == 0


def psi_grid(m: int, n: int) -> int:
    """Largest multiplicity of an eigenvalue of the ``m × n`` grid Laplacian."""
    if m < 1 or n < 1:
        raise DimensionError(f"grid needs m, n >= 1, got ({m}, {n})")
    d = math.gcd(m, n)
    if d >= 4:
        return d - 1
    if d == 3:
        return 3 if (_div(2, m) or _div(2, n)) else 2
    if d == 2:
        return 2
    if (
        (_div(2, m) and _div(3, n))
        or (_div(3, m) and _div(2, n))
        or (_div(3, m) and _div(5, n))
        or (_div(5, m) and _div(3, n))
    ):
        return 2
    return 1


def psi_cylinder(m: int, n: int) -> int:
    """Largest multiplicity of an eigenvalue of the cylinder grid ``C_m □ P_n``."""
    if m < 3 or n < 2:
        raise DimensionError(f"cylinder grid needs m >= 3, n >= 2, got ({m}, {n})")
    d = math.gcd(m, 2 * n)
    if d >= 6:
        return d - 1
    if d == 5:
        return 6 if (_div(15, m) and _div(10, n)) else 4
    four = (_div(10, m) and _div(3, n)) or (_div(12, m) and _div(5, n)) or (_div(6, m) and _div(2, n))
    if d == 4:
        return 4 if four else 3
    if d == 3:
        return 3
    if d == 2:
        if four:
            return 4
        if (_div(6, m) and _div(5, n)) or (_div(4, m) and _div(3, n)):
            return 3
        return 2
    return 2


def phi(spec: GraphSpec) -> int:
    """Minimal number of control nodes for ``(L, B̄)`` on a grid or cylinder grid."""
    if spec.topology is Topology.GRID:
        return psi_grid(spec.m, spec.n)
    if spec.topology is Topology.CYLINDER:
        return psi_cylinder(spec.m, spec.n)
    raise OutOfScopeError(f"minimal control counts are only available for products, not {spec}")


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ENUMERATED = "enumerated"


@dataclass(frozen=True)
class MultiplicityReport:
    spec: GraphSpec
    psi: int
    phi: int
    witness_class: EigenspaceBasis
    method: Method

    def to_dict(self) -> dict:
        return {
            "topology": self.spec.topology.value,
            "m": self.spec.m,
            "n": self.spec.n,
            "psi": self.psi,
            "phi": self.phi,
            "method": self.method.value,
            "witness_class": {
                "eigenvalue": self.witness_class.value,
                "t1": str(self.witness_class.eigenvalue.t1),
                "t2": str(self.witness_class.eigenvalue.t2),
                "members": [list(mb) for mb in self.witness_class.members],
            },
        }


def exact_multiplicity_report(spec: GraphSpec, node_cap: int = DEFAULT_NODE_CAP) -> MultiplicityReport:
    """Largest multiplicity by closed form AND by enumeration; they must agree."""
    if not spec.topology.is_product:
        raise OutOfScopeError(f"multiplicity reports cover grid/cylinder specs, not {spec}")
    if spec.node_count > node_cap:
        raise ContractError(f"{spec} has {spec.node_count} nodes, above the cap {node_cap}")
    closed = phi(spec)
    spaces = product_spectrum(spec)
    witness = max(spaces, key=lambda s: s.multiplicity)
    if witness.multiplicity != closed:
        raise ConsistencyError(
            f"{spec}: closed-form multiplicity {closed} but enumeration found {witness.multiplicity}"
        )
    return MultiplicityReport(spec, witness.multiplicity, closed, witness, Method.ENUMERATED)


@dataclass(frozen=True)
class DeterminantFinding:
    eigenspace: EigenspaceBasis
    determinant: float  # absolute value

    @property
    def nonzero(self) -> bool:
        return abs(self.determinant) > 1e-10


def _exceptional(space: EigenspaceBasis) -> bool:
    """True when some pair of members is related by a two-thirds or sporadic solution."""
    spec = space.spec
    members = space.members
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            (a1, b1), (a2, b2) = members[i], members[j]
            rel = characteristic_parts_relation(
                Fraction(a1, spec.m), Fraction(b1, spec.n), Fraction(a2, spec.m), Fraction(b2, spec.n)
            )
            if rel.kind in (SolutionKind.FAMILY_TWO_THIRDS, SolutionKind.SPORADIC):
                return True
    return False


def sporadic_determinant_check(spec: GraphSpec) -> list[DeterminantFinding]:
    """|det H| for every multiple eigenvalue of a grid that owes its
    multiplicity to a two-thirds or sporadic cosine identity.

    ``H[i, l] = w_{beta_i, l}`` for ``l = 1..r``: the first ``r`` entries of
    the path eigenvectors of the second factor.  A zero determinant is returned
    as a finding, not raised.
    """
    if spec.topology is not Topology.GRID:
        raise OutOfScopeError(f"determinant check is defined for grids, not {spec}")
    findings = []
    for space in product_spectrum(spec):
        r = space.multiplicity
        if r < 2 or not _exceptional(space):
            continue
        H = np.array(
            [EigenvectorFactor(FactorFamily.PATH, beta, spec.n).entries()[:r] for _, beta in space.members]
        )
        findings.append(DeterminantFinding(space, abs(float(np.linalg.det(H)))))
    return findings
