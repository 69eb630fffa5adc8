"""Time integration, minimum-energy steering and pattern export for the
linearized Turing model ``ż = A z + B̃ u``."""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .controllability import SecondOrderSystem
from .errors import ContractError, InfeasiblePlanError, OutOfScopeError
from .graphs import GraphSpec

COND_LIMIT = 1e14


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time, z1 stacked over z2

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ContractError(f"{len(self.times)} times but {len(self.states)} states")
        if len(self.times) == 0 or self.times[0] != 0:
            raise ContractError("trajectories start at t = 0")
        if np.any(np.diff(self.times) <= 0):
            raise ContractError("trajectory times must increase")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _finite(name: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ContractError(f"{name} contains non-finite values")
    return x


def _input_signal(u, width: int) -> Callable[[float], np.ndarray]:
    if u is None:
        zero = np.zeros(width)
        return lambda t: zero
    if callable(u):
        def signal(t):
            v = np.asarray(u(t), dtype=float).reshape(-1)
            if v.shape != (width,):
                raise ContractError(f"control returned {v.shape[0]} inputs, system has {width}")
            return v
        return signal
    const = _finite("u", u).reshape(-1)
    if const.shape != (width,):
        raise ContractError(f"constant control has {const.shape[0]} inputs, system has {width}")
    return lambda t: const


def integrate(system: SecondOrderSystem, u, z0, T: float, dt: float, record_every: int = 1) -> Trajectory:
    """Classical RK4 on ``[0, T]``.

    The step is ``T / ceil(T / dt)`` so it never exceeds ``dt`` and lands on
    ``T`` exactly.  ``u`` may be ``None`` (zero input), a constant vector or a
    callable ``t -> input``.
    """
    A = _finite("A", system.A)
    Bt = _finite("Btilde", system.Btilde)
    z = _finite("z0", z0).reshape(-1).copy()
    if z.shape[0] != A.shape[0]:
        raise ContractError(f"z0 has length {z.shape[0]}, state dimension is {A.shape[0]}")
    T = float(T)
    dt = float(dt)
    if not (math.isfinite(T) and math.isfinite(dt)) or T <= 0 or dt <= 0:
        raise ContractError(f"need finite T > 0 and dt > 0, got T={T}, dt={dt}")
    if dt > T:
        raise ContractError(f"dt={dt} exceeds the horizon T={T}")
    steps = max(1, math.ceil(T / dt - 1e-9))
    h = T / steps
    signal = _input_signal(u, Bt.shape[1])

    def f(t, x):
        return A @ x + Bt @ signal(t)

    times = [0.0]
    states = [z.copy()]
    for k in range(steps):
        t = k * h
        k1 = f(t, z)
        k2 = f(t + h / 2, z + h / 2 * k1)
        k3 = f(t + h / 2, z + h / 2 * k2)
        k4 = f(t + h, z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % record_every == 0 or k + 1 == steps:
            times.append((k + 1) * h)
            states.append(z.copy())
    if not np.all(np.isfinite(z)):
        raise ContractError("integration diverged to non-finite values")
    return Trajectory(np.array(times), np.array(states))


def controllability_gramian(A: np.ndarray, Bt: np.ndarray, T: float, steps: int) -> np.ndarray:
    """``∫₀ᵀ e^{At} B̃ B̃ᵀ e^{Aᵀt} dt`` by composite Simpson on ``steps`` panels.

    When ``steps`` is divisible by 4 one Richardson step against the
    half-resolution Simpson sum removes the ``h⁴`` error term.
    """
    if steps < 2 or steps % 2:
        raise ContractError(f"Simpson quadrature needs an even step count >= 2, got {steps}")
    h = T / steps
    E = expm(A * h)
    F = Bt.astype(float)
    snaps = np.empty((steps + 1, A.shape[0], A.shape[0]))
    for k in range(steps + 1):
        snaps[k] = F @ F.T
        F = E @ F

    def simpson(S, width):
        w = np.ones(len(S))
        w[1:-1:2] = 4
        w[2:-1:2] = 2
        return np.tensordot(w, S, axes=1) * width / 3

    W = simpson(snaps, h)
    if steps % 4 == 0:
        W = (16 * W - simpson(snaps[::2], 2 * h)) / 15
    return (W + W.T) / 2


@dataclass(frozen=True)
class SteeringPlan:
    T: float
    eta: np.ndarray  # costate at t = T: W⁻¹ (z_target − e^{AT} z0)
    A: np.ndarray
    Btilde: np.ndarray
    predicted_final: np.ndarray
    gramian_condition: float

    def control(self, t: float) -> np.ndarray:
        """``u(t) = B̃ᵀ e^{Aᵀ(T−t)} η``."""
        return self.Btilde.T @ (expm(self.A.T * (self.T - t)) @ self.eta)

    def __call__(self, t: float) -> np.ndarray:
        return self.control(t)

    def control_samples(self, count: int = 101) -> list[tuple[float, np.ndarray]]:
        return [(float(t), self.control(t)) for t in np.linspace(0.0, self.T, count)]


def gramian_steer(
    system: SecondOrderSystem,
    z0,
    z_target,
    T: float,
    steps: int = 2000,
    cond_limit: float = COND_LIMIT,
) -> SteeringPlan:
    """Minimum-energy open-loop control taking ``z0`` to ``z_target`` at ``T``.

    Raises :class:`InfeasiblePlanError` when the Gramian is numerically
    singular; the error carries the least-controllable state direction.
    """
    A = _finite("A", system.A)
    Bt = _finite("Btilde", system.Btilde)
    z0 = _finite("z0", z0).reshape(-1)
    zt = _finite("z_target", z_target).reshape(-1)
    if not z0.shape == zt.shape == (A.shape[0],):
        raise ContractError(f"z0 and z_target must have length {A.shape[0]}")
    if not T > 0:
        raise ContractError(f"horizon must be positive, got {T}")

    W = controllability_gramian(A, Bt, float(T), int(steps))
    U, s, _ = np.linalg.svd(W)
    cond = math.inf if s[-1] <= 0 else float(s[0] / s[-1])
    if cond > cond_limit:
        direction = U[:, -1]
        raise InfeasiblePlanError(
            f"controllability Gramian is numerically singular (cond={cond:.3g}); "
            f"least controllable direction has largest entry at state {int(np.argmax(np.abs(direction)))}",
            direction=direction,
            condition=cond,
        )
    free = expm(A * T) @ z0
    eta = np.linalg.solve(W, zt - free)
    predicted = free + W @ eta
    return SteeringPlan(float(T), eta, A, Bt, predicted, cond)


class PatternFormat(str, enum.Enum):
    CSV = "csv"
    PGM = "pgm"


def pattern_grid(state, spec: GraphSpec, channel: int = 1) -> np.ndarray:
    """Channel ``1`` (z1) or ``2`` (z2) of a stacked state reshaped ``m × n``."""
    if not spec.topology.is_product:
        raise OutOfScopeError(f"patterns are defined for grid and cylinder specs, not {spec}")
    if channel not in (1, 2):
        raise ContractError(f"channel must be 1 or 2, got {channel}")
    state = np.asarray(state, dtype=float).reshape(-1)
    N = spec.node_count
    if state.shape[0] != 2 * N:
        raise ContractError(f"state has length {state.shape[0]}, expected {2 * N}")
    if np.any(np.isnan(state)):
        raise ContractError("state contains NaN")
    values = state[(channel - 1) * N : channel * N]
    return values.reshape(spec.m, spec.n)


def to_pgm_bytes(grid: np.ndarray) -> bytes:
    lo, hi = float(grid.min()), float(grid.max())
    if hi > lo:
        pixels = np.rint((grid - lo) / (hi - lo) * 255)
    else:
        pixels = np.full(grid.shape, 128)
    header = f"P5\n{grid.shape[1]} {grid.shape[0]}\n255\n".encode("ascii")
    return header + pixels.astype(np.uint8).tobytes()


def export_pattern(state, spec: GraphSpec, channel: int, path, fmt: PatternFormat | str = PatternFormat.CSV) -> str:
    """Write one channel of ``state`` as CSV (``row,col,value``) or binary PGM."""
    grid = pattern_grid(state, spec, channel)
    fmt = PatternFormat(fmt)
    path = os.fspath(path)
    if fmt is PatternFormat.PGM:
        with open(path, "wb") as fh:
            fh.write(to_pgm_bytes(grid))
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "value"])
            for (r, c), v in np.ndenumerate(grid):
                writer.writerow([r, c, repr(float(v))])
    return path


def read_pattern_csv(path, spec: GraphSpec) -> np.ndarray:
    grid = np.full((spec.m, spec.n), np.nan)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            grid[int(row["row"]), int(row["col"])] = float(row["value"])
    return grid
