"""Epistemically restricted classical theory on the discrete phase space
(Z_d)^{2n}.

Points are interleaved coordinate tuples (x_1, p_1, ..., x_n, p_n).  Dual
vectors are canonical variables F = a_1 X_1 + b_1 P_1 + ... stored as the
coefficient tuple (a_1, b_1, ...).  The symplectic form is

    {F, G} = sum_j (a_j d_j - b_j c_j) = F^T J G,
    J = direct sum of [[0, 1], [-1, 0]] blocks,

so that {X_1, P_1} = +1, matching the finite-difference Poisson bracket on
functional tables.  An epistemic state is an isotropic set of known
variables V plus a valuation, stored as one representative point; its
distribution is uniform over the coset V-perp + v_rep with exact rational
weights.  Valid transformations are affine symplectic maps m -> Sm + a.

`encode_ontic` bridges phase-space points to the 1-based ontic labels of
the relational model (x*d + p + 1 per system, mixed-radix for up to three
systems).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._modp import is_prime, nullspace_mod, rank_mod

__all__ = [
    "OnticPoint",
    "DualVector",
    "EpistemicState",
    "SymplecticAffine",
    "symplectic_form",
    "symplectic_product",
    "linear_table",
    "poisson_bracket",
    "orthocomplement",
    "epistemic_distribution",
    "apply_transform",
    "basis_indicators",
    "measure_probabilities",
    "encode_ontic",
    "decode_ontic",
    "random_symplectic",
    "all_maximal_states",
]

_BRIDGE_ARITY = 3


def _reduced(values: Sequence[int], d: int) -> tuple:
    return tuple(int(v) % d for v in values)


@dataclass(frozen=True)
class OnticPoint:
    """A phase-space point (x_1, p_1, ..., x_n, p_n) over Z_d."""

    d: int
    coords: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if len(self.coords) % 2 != 0 or not self.coords:
            raise ValueError("coordinates must have even positive length")
        object.__setattr__(self, "coords", _reduced(self.coords, self.d))

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class DualVector:
    """A canonical variable a_1 X_1 + b_1 P_1 + ... over Z_d."""

    d: int
    coeffs: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if len(self.coeffs) % 2 != 0 or not self.coeffs:
            raise ValueError("coefficients must have even positive length")
        object.__setattr__(self, "coeffs", _reduced(self.coeffs, self.d))

    @property
    def n(self) -> int:
        return len(self.coeffs) // 2

    def __call__(self, m) -> int:
        coords = m.coords if isinstance(m, OnticPoint) else tuple(m)
        if len(coords) != len(self.coeffs):
            raise ValueError("point and variable sizes differ")
        return sum(a * int(x) for a, x in zip(self.coeffs, coords)) % self.d

    def __iter__(self):
        return iter(self.coeffs)


def _coerce_dual(F, d: int, n: int) -> DualVector:
    if isinstance(F, DualVector):
        if F.d != d or F.n != n:
            raise ValueError("dual vector has mismatched d or n")
        return F
    return DualVector(d, tuple(F))


def symplectic_form(n: int, d: int) -> np.ndarray:
    """The 2n x 2n matrix J with {F, G} = F^T J G."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for j in range(n):
        J[2 * j, 2 * j + 1] = 1
        J[2 * j + 1, 2 * j] = d - 1
    return J


def symplectic_product(F, G, d: int | None = None) -> int:
    """{F, G} = sum_j (a_j d_j - b_j c_j) mod d."""
    if isinstance(F, DualVector):
        d = F.d
    if d is None:
        raise ValueError("dimension required for raw coefficient input")
    fc = tuple(F.coeffs if isinstance(F, DualVector) else F)
    gc = tuple(G.coeffs if isinstance(G, DualVector) else G)
    if len(fc) != len(gc) or len(fc) % 2 != 0:
        raise ValueError("dual vector sizes differ or are odd")
    total = 0
    for j in range(0, len(fc), 2):
        total += fc[j] * gc[j + 1] - fc[j + 1] * gc[j]
    return total % d


def linear_table(F: DualVector) -> np.ndarray:
    """Full table of a linear functional, shape (d,) * 2n."""
    d, size = F.d, len(F.coeffs)
    table = np.zeros((d,) * size, dtype=np.int64)
    for m in product(range(d), repeat=size):
        table[m] = F(m)
    return table


def poisson_bracket(F_table: np.ndarray, G_table: np.ndarray, m,
                    d: int) -> int:
    """Finite-difference Poisson bracket of two functional tables at m."""
    F_table = np.asarray(F_table)
    G_table = np.asarray(G_table)
    if F_table.shape != G_table.shape:
        raise ValueError("functional tables have different shapes")
    coords = tuple(m.coords if isinstance(m, OnticPoint) else m)
    if len(coords) != F_table.ndim:
        raise ValueError("point size does not match table arity")

    def shifted(table, pos):
        idx = list(coords)
        idx[pos] = (idx[pos] + 1) % d
        return int(table[tuple(idx)])

    f0 = int(F_table[coords])
    g0 = int(G_table[coords])
    total = 0
    for j in range(len(coords) // 2):
        xj, pj = 2 * j, 2 * j + 1
        total += (shifted(F_table, xj) - f0) * (shifted(G_table, pj) - g0)
        total -= (shifted(F_table, pj) - f0) * (shifted(G_table, xj) - g0)
    return total % d


def orthocomplement(V: Sequence, d: int, n: int) -> list:
    """Basis of {m : F^T m = 0 for all F in V} over prime d."""
    if not is_prime(d):
        raise ValueError("orthocomplement needs prime d")
    duals = [_coerce_dual(F, d, n) for F in V]
    if not duals:
        basis = np.eye(2 * n, dtype=np.int64)
    else:
        rows = np.array([F.coeffs for F in duals], dtype=np.int64)
        basis = nullspace_mod(rows, d)
    return [tuple(int(v) for v in row) for row in basis]


class EpistemicState:
    """Knowledge of an isotropic set of canonical variables.

    V is the list of known variables; the valuation is carried by one
    representative point v_rep with F(v_rep) = v(F).  The constructor
    rejects non-commuting V (classical complementarity).
    """

    __slots__ = ("d", "n", "V", "v_rep")

    def __init__(self, d: int, n: int, V: Sequence, v_rep):
        if not is_prime(d):
            raise ValueError("epistemic states need prime d")
        if n < 1:
            raise ValueError("n must be at least 1")
        duals = tuple(_coerce_dual(F, d, n) for F in V)
        for i, F in enumerate(duals):
            for G in duals[i + 1:]:
                if symplectic_product(F, G) != 0:
                    raise ValueError(
                        "V is not isotropic: variables "
                        f"{F.coeffs} and {G.coeffs} have nonzero bracket")
        point = (v_rep if isinstance(v_rep, OnticPoint)
                 else OnticPoint(d, tuple(v_rep)))
        if point.n != n:
            raise ValueError("v_rep has the wrong number of systems")
        self.d = d
        self.n = n
        self.V = duals
        self.v_rep = point

    def valuation(self, F) -> int:
        return _coerce_dual(F, self.d, self.n)(self.v_rep)

    def support(self) -> list:
        """All consistent points, sorted: the coset V-perp + v_rep."""
        d = self.d
        basis = orthocomplement(self.V, d, self.n)
        points = set()
        for combo in product(range(d), repeat=len(basis)):
            shift = [0] * (2 * self.n)
            for c, vec in zip(combo, basis):
                for i, entry in enumerate(vec):
                    shift[i] += c * entry
            points.add(tuple((s + v) % d
                             for s, v in zip(shift, self.v_rep.coords)))
        return sorted(points)

    def distribution(self) -> dict:
        """Uniform exact distribution over the support."""
        points = self.support()
        weight = Fraction(1, len(points))
        return {m: weight for m in points}

    def labels(self) -> frozenset:
        """Support as 1-based ontic labels (bridge encoding)."""
        return frozenset(encode_ontic(OnticPoint(self.d, m), self.n)
                         for m in self.support())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EpistemicState):
            return NotImplemented
        return (self.d == other.d and self.n == other.n
                and self.support() == other.support())

    def __repr__(self) -> str:
        known = ", ".join(str(F.coeffs) for F in self.V)
        return (f"EpistemicState(d={self.d}, n={self.n}, V=[{known}], "
                f"v_rep={self.v_rep.coords})")

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "V": [list(F.coeffs) for F in self.V],
            "v_rep": list(self.v_rep.coords),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "EpistemicState":
        return cls(int(obj["d"]), int(obj["n"]), obj["V"], obj["v_rep"])

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "EpistemicState":
        return cls.from_json_dict(json.loads(text))


def epistemic_distribution(s: EpistemicState) -> dict:
    return s.distribution()


class SymplecticAffine:
    """An affine symplectic map m -> Sm + a on (Z_d)^{2n}."""

    __slots__ = ("d", "n", "S", "a")

    def __init__(self, d: int, S, a=None):
        S = np.asarray(S, dtype=np.int64) % d
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2 != 0:
            raise ValueError("S must be a square matrix of even size")
        n = S.shape[0] // 2
        J = symplectic_form(n, d)
        if not np.array_equal((S.T @ J @ S) % d, J):
            raise ValueError("S is not symplectic: S^T J S != J")
        if a is None:
            a = np.zeros(2 * n, dtype=np.int64)
        a = np.asarray(a, dtype=np.int64) % d
        if a.shape != (2 * n,):
            raise ValueError("translation vector has the wrong size")
        self.d = d
        self.n = n
        self.S = S
        self.a = a

    @classmethod
    def identity(cls, d: int, n: int) -> "SymplecticAffine":
        return cls(d, np.eye(2 * n, dtype=np.int64))

    def __call__(self, m):
        coords = np.asarray(
            m.coords if isinstance(m, OnticPoint) else tuple(m),
            dtype=np.int64)
        out = (self.S @ coords + self.a) % self.d
        return tuple(int(v) for v in out)

    def compose(self, other: "SymplecticAffine") -> "SymplecticAffine":
        """self after other: m -> self(other(m))."""
        if self.d != other.d or self.n != other.n:
            raise ValueError("transform sizes differ")
        return SymplecticAffine(self.d, (self.S @ other.S) % self.d,
                                (self.S @ other.a + self.a) % self.d)

    def __repr__(self) -> str:
        return f"SymplecticAffine(d={self.d}, n={self.n})"


def apply_transform(s: EpistemicState, t: SymplecticAffine
                    ) -> EpistemicState:
    """Push an epistemic state through an affine symplectic map: the new
    known variables are S^{-T} V and the support maps pointwise."""
    if s.d != t.d or s.n != t.n:
        raise ValueError("state and transform sizes differ")
    d = s.d
    J = symplectic_form(s.n, d)
    # for symplectic S the inverse transpose is J S J^{-1} = -J S J mod d
    s_inv_t = (-(J @ t.S @ J)) % d
    new_V = [DualVector(d, tuple(int(v) for v in (s_inv_t @ F.coeffs) % d))
             for F in s.V]
    out = EpistemicState(d, s.n, new_V, t(s.v_rep))
    assert sorted(t(m) for m in s.support()) == out.support(), \
        "transformed coset does not match pointwise image"
    return out


def basis_indicators(F, d: int, n: int) -> list:
    """The d indicator tables of measuring one canonical variable."""
    dual = _coerce_dual(F, d, n)
    table = linear_table(dual)
    return [(table == k).astype(np.int64) for k in range(d)]


def measure_probabilities(mu, indicators: Sequence[np.ndarray]) -> list:
    """Outcome probabilities p_k = sum_m mu(m) xi_k(m), exact.

    mu is a mapping point-tuple -> Fraction (as produced by
    epistemic_distribution); indicators are 0/1 tables that must sum to
    the all-ones table.
    """
    if not indicators:
        raise ValueError("at least one indicator required")
    stack = [np.asarray(x, dtype=np.int64) for x in indicators]
    shape = stack[0].shape
    for x in stack:
        if x.shape != shape:
            raise ValueError("indicator tables have different shapes")
        if not np.isin(x, (0, 1)).all():
            raise ValueError("indicators must be 0/1 valued")
    total = sum(stack)
    if not (total == 1).all():
        raise ValueError("indicators do not partition phase space")
    probs = []
    for x in stack:
        p = Fraction(0)
        for m, w in mu.items():
            p += w * int(x[tuple(m)])
        probs.append(p)
    if sum(probs) != 1:
        raise AssertionError("measurement probabilities do not sum to 1")
    return probs


def encode_ontic(m, n: int = 1) -> int:
    """1-based ontic label of a point: x*d + p + 1 per system, mixed-radix
    with system 1 most significant; bridge supports n <= 3."""
    if not isinstance(m, OnticPoint):
        raise TypeError("encode_ontic expects an OnticPoint")
    if m.n != n:
        raise ValueError("point has the wrong number of systems")
    if n > _BRIDGE_ARITY:
        raise ValueError(f"bridge supports at most {_BRIDGE_ARITY} systems")
    d = m.d
    flat = 0
    for j in range(n):
        x, p = m.coords[2 * j], m.coords[2 * j + 1]
        flat = flat * d * d + (x * d + p)
    return flat + 1


def decode_ontic(label: int, d: int, n: int = 1) -> OnticPoint:
    """Inverse of encode_ontic."""
    if n > _BRIDGE_ARITY:
        raise ValueError(f"bridge supports at most {_BRIDGE_ARITY} systems")
    size = (d * d) ** n
    if not 1 <= label <= size:
        raise ValueError(f"label {label} out of range 1..{size}")
    rest = label - 1
    coords = []
    for _ in range(n):
        per = rest % (d * d)
        coords.extend((per // d, per % d))
        rest //= d * d
    pairs = list(reversed([tuple(coords[i:i + 2])
                           for i in range(0, len(coords), 2)]))
    flat = [c for pair in pairs for c in pair]
    return OnticPoint(d, tuple(flat))


def _elementary_symplectics(d: int, n: int) -> list:
    """Generating set for the symplectic group on (Z_d)^{2n}."""
    gens = []
    for j in range(n):
        for q in range(1, d):
            # x-shear and p-shear on system j
            for upper in (True, False):
                S = np.eye(2 * n, dtype=np.int64)
                if upper:
                    S[2 * j, 2 * j + 1] = q
                else:
                    S[2 * j + 1, 2 * j] = q
                gens.append(S % d)
        # quarter rotation on system j
        S = np.eye(2 * n, dtype=np.int64)
        S[2 * j, 2 * j] = 0
        S[2 * j + 1, 2 * j + 1] = 0
        S[2 * j, 2 * j + 1] = d - 1
        S[2 * j + 1, 2 * j] = 1
        gens.append(S)
    for i in range(n):
        for j in range(i + 1, n):
            # CZ-type coupling: p_i += x_j, p_j += x_i
            S = np.eye(2 * n, dtype=np.int64)
            S[2 * i + 1, 2 * j] = 1
            S[2 * j + 1, 2 * i] = 1
            gens.append(S)
            # CNOT-type coupling: x_j += x_i, p_i -= p_j
            S = np.eye(2 * n, dtype=np.int64)
            S[2 * j, 2 * i] = 1
            S[2 * i + 1, 2 * j + 1] = d - 1
            gens.append(S)
            # swap systems i and j
            S = np.zeros((2 * n, 2 * n), dtype=np.int64)
            for k in range(n):
                t = j if k == i else i if k == j else k
                S[2 * t, 2 * k] = 1
                S[2 * t + 1, 2 * k + 1] = 1
            gens.append(S)
    return gens


def random_symplectic(d: int, n: int, rng: random.Random,
                      factors: int = 12, affine: bool = True
                      ) -> SymplecticAffine:
    """A random affine symplectic map, built as a product of elementary
    generators (validated by the constructor)."""
    gens = _elementary_symplectics(d, n)
    S = np.eye(2 * n, dtype=np.int64)
    for _ in range(factors):
        S = (rng.choice(gens) @ S) % d
    a = [rng.randrange(d) for _ in range(2 * n)] if affine else None
    return SymplecticAffine(d, S, a)


def all_maximal_states(d: int) -> list:
    """All single-system states of maximal knowledge: one known variable
    (d + 1 directions) with each of its d valuations."""
    if not is_prime(d):
        raise ValueError("state enumeration needs prime d")
    directions = [(0, 1)] + [(1, b) for b in range(d)]
    states = []
    for a, b in directions:
        F = DualVector(d, (a, b))
        for t in range(d):
            # pick any representative with F(v) = t
            if a != 0:
                v_rep = (t * pow(a, -1, d) % d, 0)
            else:
                v_rep = (0, t * pow(b, -1, d) % d)
            states.append(EpistemicState(d, 1, [F], v_rep))
    return states
