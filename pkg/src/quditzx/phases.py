"""Exact and approximate phase arithmetic for spider decorations.

A phase is a point on the circle, stored either as an exact fraction of a
full turn or as a float in radians. A spider in dimension D carries a
vector of D-1 phases (alpha_1 .. alpha_{D-1}); alpha_0 is fixed to zero
and is never stored.

Exactness is contagious downward only: combining two exact phases stays
exact, combining anything with an approximate phase yields an approximate
phase. Rule matching that must recognize special angles (classical
points) only ever fires on exact values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence, Union

TAU = 2.0 * math.pi

# Snap width used only when canonicalizing float angles onto [0, 2*pi).
_WRAP_EPS = 1e-12


class Turn:
    """An angle: exact fraction of a turn in [0,1) or float radians in [0,2*pi)."""

    __slots__ = ("_frac", "_rad")

    def __init__(self, frac: Fraction | None, rad: float | None):
        if (frac is None) == (rad is None):
            raise ValueError("Turn needs exactly one of fraction / radians")
        self._frac = frac
        self._rad = rad

    @classmethod
    def exact(cls, numerator: int, denominator: int = 1) -> "Turn":
        f = Fraction(numerator, denominator) % 1
        return cls(f, None)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "Turn":
        return cls(Fraction(f) % 1, None)

    @classmethod
    def approx(cls, radians: float) -> "Turn":
        r = math.fmod(float(radians), TAU)
        if r < 0.0:
            r += TAU
        if r < _WRAP_EPS or TAU - r < _WRAP_EPS:
            r = 0.0
        return cls(None, r)

    @classmethod
    def zero(cls) -> "Turn":
        return cls(Fraction(0), None)

    @property
    def is_exact(self) -> bool:
        return self._frac is not None

    @property
    def fraction(self) -> Fraction:
        """Exact value in turns; raises on approximate phases."""
        if self._frac is None:
            raise ValueError("approximate phase has no exact fraction")
        return self._frac

    @property
    def radians(self) -> float:
        if self._frac is not None:
            return float(self._frac) * TAU
        return self._rad

    @property
    def is_zero(self) -> bool:
        if self._frac is not None:
            return self._frac == 0
        return self._rad == 0.0

    def __add__(self, other: "Turn") -> "Turn":
        if not isinstance(other, Turn):
            return NotImplemented
        if self._frac is not None and other._frac is not None:
            return Turn.from_fraction(self._frac + other._frac)
        return Turn.approx(self.radians + other.radians)

    def __sub__(self, other: "Turn") -> "Turn":
        if not isinstance(other, Turn):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Turn":
        if self._frac is not None:
            return Turn.from_fraction(-self._frac)
        return Turn.approx(-self._rad)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Turn):
            return NotImplemented
        if self.is_exact != other.is_exact:
            return False
        if self.is_exact:
            return self._frac == other._frac
        return self._rad == other._rad

    def __hash__(self) -> int:
        if self._frac is not None:
            return hash(("turn-exact", self._frac))
        return hash(("turn-approx", self._rad))

    def __repr__(self) -> str:
        if self._frac is not None:
            return f"Turn.exact({self._frac.numerator}, {self._frac.denominator})"
        return f"Turn.approx({self._rad!r})"

    def __str__(self) -> str:
        if self._frac is not None:
            if self._frac == 0:
                return "0"
            return f"{self._frac.numerator}/{self._frac.denominator}"
        return f"{self._rad:.6g}rad"

    def to_json(self) -> dict:
        if self._frac is not None:
            return {"exact": [self._frac.numerator, self._frac.denominator]}
        return {"approx": self._rad}

    @classmethod
    def from_json(cls, obj: dict) -> "Turn":
        if not isinstance(obj, dict):
            raise ValueError(f"phase entry must be an object, got {obj!r}")
        if "exact" in obj:
            num, den = obj["exact"]
            return cls.exact(int(num), int(den))
        if "approx" in obj:
            return cls.approx(float(obj["approx"]))
        raise ValueError(f"phase entry needs 'exact' or 'approx': {obj!r}")


TurnLike = Union[Turn, Fraction, int, float]


def _coerce_turn(value: TurnLike) -> Turn:
    if isinstance(value, Turn):
        return value
    if isinstance(value, (Fraction, int)):
        return Turn.from_fraction(Fraction(value))
    if isinstance(value, float):
        return Turn.approx(value * TAU)
    raise TypeError(f"cannot interpret {value!r} as a Turn")


class PhaseVector:
    """The D-1 phases alpha_1..alpha_{D-1} decorating a spider of dimension D."""

    __slots__ = ("_dim", "_entries")

    def __init__(self, dim: int, entries: Sequence[TurnLike]):
        if dim < 2:
            raise ValueError(f"dimension must be >= 2, got {dim}")
        turns = tuple(_coerce_turn(e) for e in entries)
        if len(turns) != dim - 1:
            raise ValueError(
                f"phase vector for dimension {dim} needs {dim - 1} entries, "
                f"got {len(turns)}"
            )
        self._dim = dim
        self._entries = turns

    @classmethod
    def zero(cls, dim: int) -> "PhaseVector":
        return cls(dim, [Turn.zero()] * (dim - 1))

    @classmethod
    def from_radians(cls, dim: int, radians: Sequence[float]) -> "PhaseVector":
        return cls(dim, [Turn.approx(r) for r in radians])

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def entries(self) -> tuple:
        return self._entries

    @property
    def is_exact(self) -> bool:
        return all(t.is_exact for t in self._entries)

    @property
    def is_zero(self) -> bool:
        return all(t.is_zero for t in self._entries)

    def alpha(self, k: int) -> Turn:
        """alpha_k for k in 0..D-1, with alpha_0 = 0 by convention."""
        k %= self._dim
        if k == 0:
            return Turn.zero()
        return self._entries[k - 1]

    def radians_full(self) -> list:
        """All D angles [alpha_0=0, alpha_1, ..., alpha_{D-1}] in radians."""
        return [0.0] + [t.radians for t in self._entries]

    def __iter__(self) -> Iterator[Turn]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhaseVector):
            return NotImplemented
        return self._dim == other._dim and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self._dim, self._entries))

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return phase_add(self, other)

    def __neg__(self) -> "PhaseVector":
        return phase_invert(self)

    def __repr__(self) -> str:
        return f"PhaseVector({self._dim}, [{', '.join(map(str, self._entries))}])"

    def to_json(self) -> list:
        return [t.to_json() for t in self._entries]

    @classmethod
    def from_json(cls, dim: int, obj: list) -> "PhaseVector":
        return cls(dim, [Turn.from_json(t) for t in obj])


def phase_add(a: PhaseVector, b: PhaseVector) -> PhaseVector:
    """Componentwise sum mod a full turn. The phase-torus group operation."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return PhaseVector(a.dim, [x + y for x, y in zip(a, b)])


def phase_invert(a: PhaseVector) -> PhaseVector:
    """Componentwise negation mod a full turn (group inverse)."""
    return PhaseVector(a.dim, [-t for t in a])


def phase_neg_transform(a: PhaseVector, k: int) -> PhaseVector:
    """The cyclic difference vector with entries alpha_{(k+i) mod D} - alpha_k.

    This is the transformation a degree-k classical point induces on the
    phase of a spider it commutes past (rule K2). k = 0 is the identity.
    Composing the transforms for k and l gives the transform for k+l mod D,
    so the D transforms realize an action of Z_D on phase vectors.
    """
    d = a.dim
    if not 0 <= k <= d - 1:
        raise ValueError(f"k must be in 0..{d - 1}, got {k}")
    if k == 0:
        return a
    ak = a.alpha(k)
    return PhaseVector(d, [a.alpha((k + i) % d) - ak for i in range(1, d)])


def cyclic_vector(dim: int, t: int) -> PhaseVector:
    """The exact phase vector with entries t*j/dim turns, j = 1..dim-1.

    These D vectors form the Z_D subgroup of the phase torus realized by
    classical points; t = 0 is the zero vector.
    """
    t %= dim
    return PhaseVector(dim, [Turn.exact(t * j, dim) for j in range(1, dim)])


def cyclic_value(pv: PhaseVector) -> int | None:
    """Inverse of cyclic_vector: the t with pv == cyclic_vector(dim, t), or None.

    Only exact phase vectors are ever recognized.
    """
    if not pv.is_exact:
        return None
    for t in range(pv.dim):
        if pv == cyclic_vector(pv.dim, t):
            return t
    return None
