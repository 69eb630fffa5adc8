from __future__ import annotations

import math

import pytest

from gridctrl.errors import DimensionError, OutOfScopeError
from gridctrl.graphs import GraphSpec
from gridctrl.multiplicity import (
    exact_multiplicity_report,
    phi,
    psi_cylinder,
    psi_grid,
    sporadic_determinant_check,
)


@pytest.mark.parametrize(
    "m, n, expected",
    [(8, 12, 3), (6, 9, 3), (3, 9, 2), (2, 3, 2), (5, 7, 1), (3, 5, 2), (4, 4, 3), (1, 1, 1), (2, 2, 2), (3, 3, 2)],
)
def test_psi_grid_values(m, n, expected):
    assert psi_grid(m, n) == expected
    assert psi_grid(n, m) == expected


@pytest.mark.parametrize("n", range(4, 21))
def test_square_grids(n):
    assert psi_grid(n, n) == n - 1


@pytest.mark.parametrize("m, n, expected", [(6, 3, 5), (5, 5, 4), (3, 2, 2), (4, 2, 3), (15, 10, 6), (10, 3, 4)])
def test_psi_cylinder_values(m, n, expected):
    assert psi_cylinder(m, n) == expected


def test_ranges():
    with pytest.raises(DimensionError):
        psi_grid(0, 3)
    with pytest.raises(DimensionError):
        psi_cylinder(2, 3)
    with pytest.raises(OutOfScopeError):
        phi(GraphSpec.path(4))


@pytest.mark.parametrize(
    "spec",
    [GraphSpec.grid(m, n) for m in range(1, 13) for n in range(m, 13)]
    + [GraphSpec.cylinder(m, n) for m in range(3, 13) for n in range(2, 7)],
    ids=str,
)
def test_report_cross_checks(spec):
    report = exact_multiplicity_report(spec)
    assert report.psi == report.phi == phi(spec)
    assert report.witness_class.multiplicity == report.psi


def test_report_dict():
    d = exact_multiplicity_report(GraphSpec.grid(8, 12)).to_dict()
    assert d["psi"] == 3 and d["phi"] == 3
    assert len(d["witness_class"]["members"]) == 3


def test_node_cap():
    from gridctrl.errors import ContractError

    with pytest.raises(ContractError):
        exact_multiplicity_report(GraphSpec.grid(10, 10), node_cap=50)


def test_determinant_grid_3_2_by_hand():
    # class {(1,1), (2,0)}; H rows are the first two entries of the path
    # vectors w_1 = (1/√2, -1/√2) and w_0 = (1/√2, 1/√2): |det| = 1
    (finding,) = sporadic_determinant_check(GraphSpec.grid(3, 2))
    assert finding.eigenspace.members == ((1, 1), (2, 0))
    assert finding.determinant == pytest.approx(1.0, abs=1e-12)


def test_determinant_frozen_values():
    dets = {f.eigenspace.members: f.determinant for f in sporadic_determinant_check(GraphSpec.grid(6, 6))}
    assert dets[((0, 3), (2, 2), (3, 0))] == pytest.approx(1 / 6, rel=1e-12)
    assert dets[((0, 4), (2, 3), (3, 2), (4, 0))] == pytest.approx(1 / (2 * math.sqrt(3)), rel=1e-12)


@pytest.mark.slow
def test_no_vanishing_determinant_up_to_24():
    for m in range(1, 25):
        for n in range(1, 25):
            for f in sporadic_determinant_check(GraphSpec.grid(m, n)):
                assert f.nonzero, (m, n, f.eigenspace.members, f.determinant)


def test_determinant_check_is_grid_only():
    with pytest.raises(OutOfScopeError):
        sporadic_determinant_check(GraphSpec.cylinder(6, 3))
