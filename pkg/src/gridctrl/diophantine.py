"""Exact decisions about sums of cosines at rational multiples of pi.

Every rational quadruple ``{f1, f2, f3, f4}`` in ``[0, 1]`` with
``cos(f1 π) + cos(f2 π) + cos(f3 π) + cos(f4 π) == 0`` is one of

* a *pair* solution ``{x, y, 1 - x, 1 - y}``,
* a *two-thirds* solution ``{θ, 2/3 - θ, 2/3 + θ, 1/2}`` with ``0 < θ < 1/3``,
* one of twelve sporadic quadruples (``SPORADIC_QUADRUPLES``).

The classifier checks the three kinds in that order and works on integers
scaled to a common denominator, so nothing here touches floating point.
Equality of two eigenvalue characteristic parts
``cos(a1 π) + cos(b1 π) == cos(a2 π) + cos(b2 π)`` reduces to classifying
``{a1, b1, 1 - a2, 1 - b2}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import ContractError, UsageError
from .graphs import GraphSpec, Topology


@dataclass(frozen=True, order=False)
class RationalAngle:
    """The angle ``p π / q`` with ``gcd(p, q) == 1`` and ``0 <= p <= q``."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not isinstance(p, (int, np.integer)) or not isinstance(q, (int, np.integer)):
            raise ContractError(f"angle components must be integers, got {p!r}/{q!r}")
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "q", int(q))
        if q <= 0 or p < 0 or p > q:
            raise ContractError(f"angle {p}/{q} outside [0, 1]")
        if math.gcd(p, q) != 1:
            raise ContractError(f"angle {p}/{q} is not reduced")

    @classmethod
    def of(cls, p: int, q: int) -> "RationalAngle":
        """Reduce ``p/q`` (which must lie in [0, 1])."""
        return cls.from_fraction(Fraction(p, q))

    @classmethod
    def from_fraction(cls, x) -> "RationalAngle":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @classmethod
    def folded(cls, x) -> "RationalAngle":
        """Fold any rational ``x`` into [0, 1] keeping ``cos(x π)`` unchanged."""
        x = Fraction(x) % 2
        if x > 1:
            x = 2 - x
        return cls.from_fraction(x)

    @classmethod
    def parse(cls, text: str) -> "RationalAngle":
        text = text.strip()
        num, sep, den = text.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError as exc:
            raise ContractError(f"cannot parse angle {text!r}; expected 'p/q'") from exc
        return cls(p, q)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def supplement(self) -> "RationalAngle":
        """``1 - x``, the angle whose cosine is ``-cos(x π)``."""
        return RationalAngle(self.q - self.p, self.q)

    def cos(self) -> float:
        return math.cos(math.pi * self.p / self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def _value(a: RationalAngle) -> Fraction:
    return a.fraction


def _sorted_angles(angles) -> tuple[int, list[int], tuple[RationalAngle, ...]]:
    """Common denominator ``D``, ascending numerators over ``D`` and the angles in that order."""
    D = math.lcm(*(a.q for a in angles))
    keyed = sorted((a.p * (D // a.q), i) for i, a in enumerate(angles))
    return D, [k for k, _ in keyed], tuple(angles[i] for _, i in keyed)


def _angles(values: Iterable) -> tuple[RationalAngle, ...]:
    out = []
    for v in values:
        if isinstance(v, RationalAngle):
            out.append(v)
        elif isinstance(v, str):
            out.append(RationalAngle.parse(v))
        else:
            x = Fraction(v)
            out.append(RationalAngle(x.numerator, x.denominator))
    return tuple(out)


@dataclass(frozen=True)
class Quadruple:
    """Unordered multiset of four angles, stored sorted by value."""

    angles: tuple[RationalAngle, ...]

    def __init__(self, angles: Iterable):
        vals = _angles(angles)
        if len(vals) != 4:
            raise ContractError(f"a quadruple needs exactly four angles, got {len(vals)}")
        object.__setattr__(self, "angles", _sorted_angles(vals)[2])

    def cosine_sum(self) -> float:
        return sum(a.cos() for a in self.angles)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.angles) + "}"


class SolutionKind(str, enum.Enum):
    NOT_A_SOLUTION = "not_a_solution"
    FAMILY_PAIRS = "family_pairs"
    FAMILY_TWO_THIRDS = "family_two_thirds"
    SPORADIC = "sporadic"


@dataclass(frozen=True)
class SolutionClass:
    """Classifier verdict.

    ``witness`` is ``(gamma, delta)`` with ``gamma <= delta <= 1/2`` for pair
    solutions, ``(theta,)`` for two-thirds solutions, ``(k,)`` with the 1-based
    sporadic index for sporadic ones and ``()`` otherwise.
    """

    kind: SolutionKind
    witness: tuple = ()

    @property
    def is_solution(self) -> bool:
        return self.kind is not SolutionKind.NOT_A_SOLUTION

    def to_dict(self) -> dict:
        if self.kind is SolutionKind.SPORADIC:
            witness = {"index": self.witness[0]}
        elif self.kind is SolutionKind.FAMILY_PAIRS:
            witness = {"gamma": str(self.witness[0]), "delta": str(self.witness[1])}
        elif self.kind is SolutionKind.FAMILY_TWO_THIRDS:
            witness = {"theta": str(self.witness[0])}
        else:
            witness = None
        return {"kind": self.kind.value, "witness": witness}


_SPORADIC_RAW = (
    ("1/3", "1", "1/2", "1/3"),
    ("2/3", "0", "1/2", "2/3"),
    ("2/5", "4/5", "1/2", "1/3"),
    ("3/5", "1/5", "1/2", "2/3"),
    ("1/5", "3/5", "1", "1/3"),
    ("4/5", "2/5", "0", "2/3"),
    ("2/5", "7/15", "13/15", "1/3"),
    ("3/5", "8/15", "2/15", "2/3"),
    ("1/15", "4/5", "11/15", "1/3"),
    ("14/15", "1/5", "4/15", "2/3"),
    ("2/7", "4/7", "6/7", "1/3"),
    ("5/7", "3/7", "1/7", "2/3"),
)

SPORADIC_QUADRUPLES: tuple[Quadruple, ...] = tuple(Quadruple(q) for q in _SPORADIC_RAW)

# keyed by (common denominator, ascending numerators)
_SPORADIC_INDEX = {
    (lambda D, nums, _: (D, tuple(nums)))(*_sorted_angles(quad.angles)): k
    for k, quad in enumerate(SPORADIC_QUADRUPLES, start=1)
}


_NO_SOLUTION = SolutionClass(SolutionKind.NOT_A_SOLUTION)


def classify_quadruple(quad) -> SolutionClass:
    """Decide exactly whether the four cosines sum to zero, and why.

    Accepts a :class:`Quadruple` or any iterable of four angles
    (``RationalAngle``, ``Fraction``, int or ``"p/q"`` strings).
    """
    if isinstance(quad, Quadruple):
        angles = quad.angles
    else:
        angles = tuple(quad)
        if len(angles) != 4 or not all(type(a) is RationalAngle for a in angles):
            angles = Quadruple(angles).angles
    D, nums, ordered = _sorted_angles(angles)

    for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        if nums[i] + nums[j] == D and nums[k] + nums[l] == D:
            gamma = Fraction(min(nums[i], nums[j]), D)
            delta = Fraction(min(nums[k], nums[l]), D)
            gamma, delta = sorted((gamma, delta))
            return SolutionClass(SolutionKind.FAMILY_PAIRS, (gamma, delta))

    half = D // 2
    if D % 2 == 0 and half in nums:
        rest = list(nums)
        rest.remove(half)
        # rest is sorted; compare 3*x against 2*D to stay in integers
        x, y, z = rest
        if 0 < 3 * x < D and 3 * (x + y) == 2 * D and 3 * (z - x) == 2 * D:
            return SolutionClass(SolutionKind.FAMILY_TWO_THIRDS, (Fraction(x, D),))

    k = _SPORADIC_INDEX.get((D, tuple(nums)))
    if k is not None:
        return SolutionClass(SolutionKind.SPORADIC, (k,))
    return _NO_SOLUTION


def characteristic_parts_relation(a1, b1, a2, b2) -> SolutionClass:
    """Classify ``cos(a1 π) + cos(b1 π) == cos(a2 π) + cos(b2 π)``.

    The trivial identity ``{a1, b1} == {a2, b2}`` is reported as a pair
    solution with the corresponding witness.
    """
    a1, b1, a2, b2 = _angles((a1, b1, a2, b2))
    return classify_quadruple(Quadruple((a1, b1, a2.supplement(), b2.supplement())))


def characteristic_parts_equal(a1, b1, a2, b2) -> bool:
    a1, b1, a2, b2 = _angles((a1, b1, a2, b2))
    if sorted((a1, b1), key=_value) == sorted((a2, b2), key=_value):
        return True
    return characteristic_parts_relation(a1, b1, a2, b2).is_solution


def index_angles(spec: GraphSpec) -> list[tuple[tuple[int, int], RationalAngle, RationalAngle]]:
    """All ``(alpha, beta)`` index pairs of a product graph with their angles.

    Grid: ``alpha = 0..m-1`` with angle ``alpha/m``.  Cylinder: ``alpha = 1..m``
    with angle ``2 alpha / m`` folded into [0, 1].  ``beta = 0..n-1`` with
    angle ``beta/n`` in both cases.
    """
    if spec.topology is Topology.GRID:
        alphas = [(a, RationalAngle.of(a, spec.m)) for a in range(spec.m)]
    elif spec.topology is Topology.CYLINDER:
        alphas = [(a, RationalAngle.folded(Fraction(2 * a, spec.m))) for a in range(1, spec.m + 1)]
    else:
        raise UsageError(f"{spec} is not a product graph")
    betas = [(b, RationalAngle.of(b, spec.n)) for b in range(spec.n)]
    return [((a, b), ta, tb) for a, ta in alphas for b, tb in betas]


# Exact equality implies float closeness to within a few ulps; this window is
# only a prefilter, every candidate pair is decided by the exact classifier.
_PREFILTER = 1e-9


def enumerate_coincidences(spec: GraphSpec) -> list[tuple[tuple[int, int], ...]]:
    """Partition all ``(alpha, beta)`` pairs of ``spec`` into exact-equality classes.

    Classes are sorted by eigenvalue (ascending), members by index.
    """
    items = index_angles(spec)
    keys = np.array([ta.cos() + tb.cos() for _, ta, tb in items])
    order = np.argsort(-keys, kind="stable")  # descending part = ascending eigenvalue

    classes: list[list[int]] = []
    window: list[int] = []  # class ids whose representative is still within range
    for pos in order:
        k = keys[pos]
        window = [c for c in window if keys[classes[c][0]] - k <= _PREFILTER]
        _, ta, tb = items[pos]
        for c in window:
            _, ra, rb = items[classes[c][0]]
            if characteristic_parts_equal(ra, rb, ta, tb):
                classes[c].append(pos)
                break
        else:
            classes.append([pos])
            window.append(len(classes) - 1)

    out = [tuple(sorted(items[i][0] for i in cls)) for cls in classes]
    return out


def iter_reduced_angles(max_denominator: int) -> list[RationalAngle]:
    """Every reduced angle ``p/q`` in [0, 1] with ``q <= max_denominator``, ascending."""
    fracs = {Fraction(p, q) for q in range(1, max_denominator + 1) for p in range(q + 1)}
    return [RationalAngle.from_fraction(f) for f in sorted(fracs)]
