"""Path, cycle, grid and cylinder grid graphs and their Laplacians.

Node ordering follows the Kronecker convention: for a product graph the first
Cartesian factor is the outer index, so node ``(outer, inner)`` has linear
index ``outer * n + inner``.  For ``Grid(m, n)`` this is "row r, column c"
with ``m`` rows and ``n`` columns; for ``CylinderGrid(m, n)`` the outer factor
is the cycle of length ``m`` and the inner factor the path of length ``n``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DimensionError, NodeIndexError, ShapeError


class Topology(str, enum.Enum):
    PATH = "path"
    CYCLE = "cycle"
    GRID = "grid"
    CYLINDER = "cylinder"

    @property
    def is_product(self) -> bool:
        return self in (Topology.GRID, Topology.CYLINDER)


@dataclass(frozen=True)
class GraphSpec:
    """Topology plus dimensions; fixes the node ordering used everywhere."""

    topology: Topology
    m: int
    n: int | None = None

    def __post_init__(self):
        topo = Topology(self.topology)
        object.__setattr__(self, "topology", topo)
        if not isinstance(self.m, (int, np.integer)) or isinstance(self.m, bool):
            raise DimensionError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if topo.is_product:
            if self.n is None or isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
                raise DimensionError(f"{topo.value} requires an integer n, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        elif self.n is not None:
            raise DimensionError(f"{topo.value} takes a single dimension, got n={self.n!r}")

        m, n = self.m, self.n
        if topo is Topology.PATH and m < 1:
            raise DimensionError(f"Path({m}): need m >= 1")
        if topo is Topology.CYCLE and m < 3:
            raise DimensionError(f"Cycle({m}): need m >= 3")
        if topo is Topology.GRID and (m < 1 or n < 1):
            raise DimensionError(f"Grid({m},{n}): need m, n >= 1")
        if topo is Topology.CYLINDER and (m < 3 or n < 2):
            raise DimensionError(f"CylinderGrid({m},{n}): need m >= 3, n >= 2")

    @classmethod
    def path(cls, m: int) -> "GraphSpec":
        return cls(Topology.PATH, m)

    @classmethod
    def cycle(cls, m: int) -> "GraphSpec":
        return cls(Topology.CYCLE, m)

    @classmethod
    def grid(cls, m: int, n: int) -> "GraphSpec":
        return cls(Topology.GRID, m, n)

    @classmethod
    def cylinder(cls, m: int, n: int) -> "GraphSpec":
        return cls(Topology.CYLINDER, m, n)

    @property
    def node_count(self) -> int:
        return self.m * (self.n if self.topology.is_product else 1)

    @property
    def inner_size(self) -> int:
        return self.n if self.topology.is_product else 1

    def __str__(self) -> str:
        names = {
            Topology.PATH: "Path",
            Topology.CYCLE: "Cycle",
            Topology.GRID: "Grid",
            Topology.CYLINDER: "CylinderGrid",
        }
        dims = f"{self.m}" if self.n is None else f"{self.m},{self.n}"
        return f"{names[self.topology]}({dims})"


@dataclass(frozen=True)
class NodeIndex:
    linear: int
    outer: int
    inner: int


def path_laplacian(m: int) -> np.ndarray:
    if m < 1:
        raise DimensionError(f"path needs m >= 1, got {m}")
    L = np.zeros((m, m), dtype=np.int64)
    for i in range(m - 1):
        L[i, i] += 1
        L[i + 1, i + 1] += 1
        L[i, i + 1] = -1
        L[i + 1, i] = -1
    return L


def cycle_laplacian(m: int) -> np.ndarray:
    if m < 3:
        raise DimensionError(f"cycle needs m >= 3, got {m}")
    L = 2 * np.eye(m, dtype=np.int64)
    for i in range(m):
        j = (i + 1) % m
        L[i, j] = -1
        L[j, i] = -1
    return L


def kronecker_sum(P, Q) -> np.ndarray:
    """Return ``P ⊗ I_n + I_m ⊗ Q`` for square ``P`` (m×m) and ``Q`` (n×n).

    Integer inputs give an integer result.
    """
    P = np.asarray(P)
    Q = np.asarray(Q)
    for name, X in (("P", P), ("Q", Q)):
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ShapeError(f"{name} must be square, got shape {X.shape}")
    m, n = P.shape[0], Q.shape[0]
    return np.kron(P, np.eye(n, dtype=P.dtype)) + np.kron(np.eye(m, dtype=Q.dtype), Q)


def build_laplacian(spec: GraphSpec) -> np.ndarray:
    """Integer Laplacian of ``spec`` in the canonical node ordering."""
    topo = spec.topology
    if topo is Topology.PATH:
        return path_laplacian(spec.m)
    if topo is Topology.CYCLE:
        return cycle_laplacian(spec.m)
    if topo is Topology.GRID:
        return kronecker_sum(path_laplacian(spec.m), path_laplacian(spec.n))
    return kronecker_sum(cycle_laplacian(spec.m), path_laplacian(spec.n))


def node_index(spec: GraphSpec, outer: int, inner: int = 0) -> NodeIndex:
    size = spec.inner_size
    if not 0 <= outer < spec.m:
        raise NodeIndexError(f"outer coordinate {outer} outside [0, {spec.m}) for {spec}")
    if not 0 <= inner < size:
        raise NodeIndexError(f"inner coordinate {inner} outside [0, {size}) for {spec}")
    return NodeIndex(outer * size + inner, outer, inner)


def node_from_linear(spec: GraphSpec, linear: int) -> NodeIndex:
    if not 0 <= linear < spec.node_count:
        raise NodeIndexError(f"node {linear} outside [0, {spec.node_count}) for {spec}")
    outer, inner = divmod(linear, spec.inner_size)
    return NodeIndex(linear, outer, inner)


def edges(spec: GraphSpec) -> Iterator[tuple[int, int]]:
    """Undirected edge list of ``spec`` as linear-index pairs ``(i, j)``, ``i < j``."""
    m = spec.m
    topo = spec.topology
    if topo is Topology.PATH:
        for i in range(m - 1):
            yield i, i + 1
        return
    if topo is Topology.CYCLE:
        for i in range(m - 1):
            yield i, i + 1
        yield 0, m - 1
        return

    n = spec.n
    wrap = topo is Topology.CYLINDER
    for r in range(m):
        for c in range(n):
            here = r * n + c
            if c + 1 < n:
                yield here, here + 1
            if r + 1 < m:
                yield here, here + n
    if wrap:
        for c in range(n):
            yield c, (m - 1) * n + c


def laplacian_from_edges(node_count: int, edge_list: Iterable[tuple[int, int]]) -> np.ndarray:
    L = np.zeros((node_count, node_count), dtype=np.int64)
    for i, j in edge_list:
        if i == j:
            raise DimensionError(f"self-loop at node {i}")
        if L[i, j] != 0:
            raise DimensionError(f"duplicate edge ({i}, {j})")
        L[i, j] = L[j, i] = -1
        L[i, i] += 1
        L[j, j] += 1
    return L
