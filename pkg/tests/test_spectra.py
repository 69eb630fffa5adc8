from __future__ import annotations

import numpy as np
import pytest

from gridctrl.diophantine import RationalAngle
from gridctrl.errors import ContractError, UsageError
from gridctrl.graphs import GraphSpec, build_laplacian, cycle_laplacian, path_laplacian
from gridctrl.spectra import (
    EigenvectorFactor,
    ExactEigenvalue,
    FactorFamily,
    cycle_spectrum,
    eigenspaces,
    numeric_spectrum,
    path_spectrum,
    product_spectrum,
    spectrum_rows,
)


@pytest.mark.parametrize("m", range(1, 9))
def test_path_eigenpairs(m):
    L = path_laplacian(m)
    for ev, vec in path_spectrum(m):
        v = vec.entries()
        assert abs(np.linalg.norm(v) - 1) < 1e-12
        assert np.allclose(L @ v, ev.value * v, atol=1e-12)


@pytest.mark.parametrize("m", range(3, 10))
def test_cycle_eigenpairs(m):
    L = cycle_laplacian(m)
    for ev, vec in cycle_spectrum(m):
        for v in (vec.entries(), vec.real_entries()):
            assert np.allclose(L @ v, ev.value * v, atol=1e-12)


def test_path3_values():
    assert [round(ev.value, 12) for ev, _ in path_spectrum(3)] == [0.0, 1.0, 3.0]


SPECS = (
    [GraphSpec.path(m) for m in (1, 2, 5)]
    + [GraphSpec.cycle(m) for m in (3, 4, 6, 9)]
    + [GraphSpec.grid(m, n) for m, n in [(1, 1), (3, 3), (4, 6), (5, 5), (6, 9)]]
    + [GraphSpec.cylinder(m, n) for m, n in [(3, 2), (4, 2), (6, 3), (8, 4)]]
)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_real_basis_is_orthonormal_eigenbasis(spec):
    L = build_laplacian(spec).astype(float)
    spaces = eigenspaces(spec)
    assert sum(s.multiplicity for s in spaces) == spec.node_count
    full = np.hstack([s.real_basis() for s in spaces])
    assert np.allclose(full.T @ full, np.eye(spec.node_count), atol=1e-10)
    for s in spaces:
        U = s.real_basis()
        assert np.allclose(L @ U, s.value * U, atol=1e-10)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_exact_multiplicities_match_numeric_grouping(spec):
    groups = numeric_spectrum(build_laplacian(spec))
    spaces = eigenspaces(spec)
    assert [g.multiplicity for g in groups] == [s.multiplicity for s in spaces]
    assert np.allclose([g.value for g in groups], [s.value for s in spaces], atol=1e-10)


def test_grid44_has_multiplicity_three_at_four():
    space = max(eigenspaces(GraphSpec.grid(4, 4)), key=lambda s: s.multiplicity)
    assert space.multiplicity == 3
    assert abs(space.value - 4.0) < 1e-12


def test_exact_eigenvalue_equality_is_exact():
    a = ExactEigenvalue(RationalAngle(1, 3), RationalAngle(1, 3))
    b = ExactEigenvalue(RationalAngle(0, 1), RationalAngle(1, 2))
    c = ExactEigenvalue(RationalAngle(1, 5), RationalAngle(1, 3))
    assert a == b
    assert a != c


def test_numeric_spectrum_contracts():
    with pytest.raises(ContractError):
        numeric_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ContractError):
        numeric_spectrum(np.eye(2), tol=0)


def test_product_spectrum_rejects_single_factor():
    with pytest.raises(UsageError):
        product_spectrum(GraphSpec.path(4))


def test_spectrum_rows():
    spec = GraphSpec.grid(2, 3)
    rows = spectrum_rows(spec)
    assert len(rows) == 6
    assert set(rows[0]) == {"alpha", "beta", "p1/q1", "p2/q2", "numeric_value", "multiplicity_class_id"}
    # 4 - 2(cos(π/2) + cos(π/3)) = 3 = 4 - 2(cos 0 + cos(2π/3)): a shared class
    shared = [r for r in rows if abs(r["numeric_value"] - 3) < 1e-12]
    assert {(r["alpha"], r["beta"]) for r in shared} == {(0, 2), (1, 1)}
    assert len({r["multiplicity_class_id"] for r in shared}) == 1


def test_path_vector_formula():
    v = EigenvectorFactor(FactorFamily.PATH, 1, 4).entries()
    k = np.arange(1, 5)
    assert np.allclose(v, np.sqrt(0.5) * np.cos((2 * k - 1) * np.pi / 8))
