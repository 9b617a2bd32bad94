"""Executable equivalence check between the trit toy theory and qutrit
stabilizer theory.

Both sides are built independently.  The toy side runs on relations and
exact rational phase-space distributions; the quantum side runs on exact
cyclotomic arithmetic in Z[eta] (eta = exp(2*pi*i/3), eta^2 = -1 - eta),
so every comparison below is zero-tolerance.

The twelve single-trit states of maximal knowledge are matched to the
twelve qutrit stabilizer states by the unique dictionary that is a group
homomorphism on both phase tori:

    z_t      <->  X-spider state, red phases  t * (2/3, 1/3)   (|t>)
    x_a      <->  Z-spider state, green phases a * (1/3, 2/3)
    (xz)_t   <->  Z-spider state, green phases (1/3, 1/3) + t * (1/3, 2/3)
    (xz^2)_t <->  Z-spider state, green phases (2/3, 2/3) + t * (1/3, 2/3)

`run_equivalence_checks` verifies, exhaustively: possibilistic agreement of
all 144 state/effect pairs (toy composite relation nonempty iff quantum
inner product nonzero), exact measurement probabilities (all values in
{0, 1/3, 1}, toy coset counting vs quantum Born rule), both phase groups
equal to Z_3 x Z_3 with the dictionary a group isomorphism, and
equivariance of the dictionary under all 18 phase maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import phasespace as ps
from . import toyrel as tr
from .phases import PhaseVector, Turn
from .stabilizer import phase_group

__all__ = [
    "STATE_NAMES",
    "FAMILIES",
    "Cyclotomic",
    "StateEntry",
    "build_3spek_states",
    "build_dictionary",
    "run_equivalence_checks",
]

STATE_NAMES = ("z_0", "z_1", "z_2", "x_0", "x_1", "x_2",
               "xz_0", "xz_1", "xz_2", "xz2_0", "xz2_1", "xz2_2")

# family name -> canonical variable whose level sets are the supports
FAMILIES = {
    "z": (1, 0),
    "x": (0, 1),
    "xz": (1, 1),
    "xz2": (2, 1),
}

_KET_NAMES = {
    "z_0": "0", "z_1": "1", "z_2": "2",
    "x_0": "plus", "x_1": "top", "x_2": "bot",
    "xz_0": "times", "xz_1": "ltimes", "xz_2": "rtimes",
    "xz2_0": "minus", "xz2_1": "vdash", "xz2_2": "dashv",
}


class Cyclotomic:
    """Exact arithmetic in Q(eta), eta = exp(2*pi*i/3), as a + b*eta."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def eta_power(cls, k: int) -> "Cyclotomic":
        k %= 3
        if k == 0:
            return cls(1, 0)
        if k == 1:
            return cls(0, 1)
        return cls(-1, -1)

    def __add__(self, other: "Cyclotomic") -> "Cyclotomic":
        return Cyclotomic(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Cyclotomic") -> "Cyclotomic":
        return Cyclotomic(self.a - other.a, self.b - other.b)

    def __mul__(self, other: "Cyclotomic") -> "Cyclotomic":
        # (a1 + b1 e)(a2 + b2 e) with e^2 = -1 - e
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return Cyclotomic(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2 - b1 * b2)

    def conj(self) -> "Cyclotomic":
        return Cyclotomic(self.a - self.b, -self.b)

    def norm2(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __complex__(self) -> complex:
        import cmath
        return complex(self.a) + complex(self.b) * cmath.exp(2j * cmath.pi / 3)

    def __repr__(self) -> str:
        return f"({self.a} + {self.b}*eta)"


def _eta(k: int) -> Cyclotomic:
    return Cyclotomic.eta_power(k)


def _inner(e, s) -> Cyclotomic:
    """<e|s> = sum conj(e_j) * s_j."""
    out = Cyclotomic(0)
    for ej, sj in zip(e, s):
        out = out + ej.conj() * sj
    return out


def _proportional(v, w) -> bool:
    """Exact test that v = lambda * w for some nonzero complex lambda."""
    if all(x.is_zero() for x in v) or all(x.is_zero() for x in w):
        return False
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            if not (v[i] * w[j] - v[j] * w[i]).is_zero():
                return False
    # matching zero patterns (cross products miss a zero vs zero mismatch)
    return all(x.is_zero() == y.is_zero() for x, y in zip(v, w))


def _green_ket(u: int, v: int) -> tuple:
    """Unnormalized Z-spider state (1, eta^u, eta^v); squared norm 3."""
    return (_eta(0), _eta(u), _eta(v))


def _red_ket(c: int, d: int) -> tuple:
    """Unnormalized X-spider state sqrt(3)*F*(1, eta^c, eta^d): the j-th
    entry is sum_k eta^(j*k + gamma_k) with gamma = (0, c, d); squared
    norm 9."""
    gamma = (0, c, d)
    out = []
    for j in range(3):
        acc = Cyclotomic(0)
        for k in range(3):
            acc = acc + _eta(j * k + gamma[k])
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class StateEntry:
    """One dictionary row: a toy support matched to a spider state."""

    name: str
    family: str
    index: int
    support: frozenset
    color: str          # spider color of the quantum state
    phases: PhaseVector  # exact phase vector of that spider
    ket: tuple          # unnormalized exact ket in Z[eta]
    norm2: Fraction
    ket_name: str


def _printed_supports() -> dict:
    """The twelve single-trit supports (1-based ontic labels)."""
    return {
        "z_0": frozenset({1, 2, 3}),
        "z_1": frozenset({4, 5, 6}),
        "z_2": frozenset({7, 8, 9}),
        "x_0": frozenset({1, 4, 7}),
        "x_1": frozenset({2, 5, 8}),
        "x_2": frozenset({3, 6, 9}),
        "xz_0": frozenset({1, 6, 8}),
        "xz_1": frozenset({2, 4, 9}),
        "xz_2": frozenset({3, 5, 7}),
        "xz2_0": frozenset({1, 5, 9}),
        "xz2_1": frozenset({2, 6, 7}),
        "xz2_2": frozenset({3, 4, 8}),
    }


def _phasespace_state(name: str) -> ps.EpistemicState:
    family, idx = name.rsplit("_", 1)
    t = int(idx)
    a, b = FAMILIES[family]
    F = ps.DualVector(3, (a, b))
    for point in product(range(3), repeat=2):
        if F(point) == t:
            return ps.EpistemicState(3, 1, [F], point)
    raise AssertionError("canonical variable has no level-t point")


def build_3spek_states() -> dict:
    """Name -> support for the twelve toy states, derived from the
    epistemic restriction and cross-checked against the literal lists."""
    literal = _printed_supports()
    derived = {name: _phasespace_state(name).labels()
               for name in STATE_NAMES}
    if derived != literal:
        raise AssertionError("phase-space derivation disagrees with the "
                             "literal support table")
    enumerated = {s.labels() for s in ps.all_maximal_states(3)}
    if enumerated != set(literal.values()):
        raise AssertionError("maximal-state enumeration disagrees with the "
                             "support table")
    return literal


def _dictionary_phases(name: str) -> tuple:
    """(color, (u, v)) with u, v in thirds of a turn."""
    family, idx = name.rsplit("_", 1)
    t = int(idx)
    if family == "z":
        return "X", (2 * t % 3, t % 3)
    if family == "x":
        return "Z", (t % 3, 2 * t % 3)
    if family == "xz":
        return "Z", ((1 + t) % 3, (1 + 2 * t) % 3)
    if family == "xz2":
        return "Z", ((2 + t) % 3, (2 + 2 * t) % 3)
    raise ValueError(f"unknown family {family!r}")


def build_dictionary() -> list:
    """The twelve matched state pairs, in STATE_NAMES order."""
    supports = build_3spek_states()
    entries = []
    for name in STATE_NAMES:
        family, idx = name.rsplit("_", 1)
        color, (u, v) = _dictionary_phases(name)
        ket = _red_ket(u, v) if color == "X" else _green_ket(u, v)
        norm2 = sum((x.norm2() for x in ket), Fraction(0))
        entries.append(StateEntry(
            name=name,
            family=family,
            index=int(idx),
            support=supports[name],
            color=color,
            phases=PhaseVector(3, [Turn.exact(u, 3), Turn.exact(v, 3)]),
            ket=ket,
            norm2=norm2,
            ket_name=_KET_NAMES[name],
        ))
    return entries


# ---------------------------------------------------------------------------
# phase maps on both sides


def _toy_phase_index(color: str, name: str) -> tuple | None:
    """(sigma, t) of a named state inside the color's phase group, or None
    if the state is not unbiased for that color."""
    family, idx = name.rsplit("_", 1)
    t = int(idx)
    if color == "Z":
        if family == "x":
            return (0, t)
        if family == "xz":
            return (1, t)
        if family == "xz2":
            return (2, t)
        return None
    if family == "z":
        return (0, t)
    if family == "xz":
        return (1, t)
    if family == "xz2":
        return (2, 2 * t % 3)
    return None


def _phi(color: str, sigma: int, t: int) -> tuple:
    """Dictionary image of the (sigma, t) unbiased point, as integer
    thirds on the matching torus."""
    if color == "Z":
        return ((sigma + t) % 3, (sigma + 2 * t) % 3)
    return ((2 * sigma + 2 * t) % 3, (2 * sigma + t) % 3)


def _quantum_phase_matrix(color: str, u: int, v: int) -> list:
    """Exact 3x3 matrix of the phase map with phases (u, v) thirds; the X
    matrix carries a harmless overall factor of 3."""
    gamma = (0, u, v)
    if color == "Z":
        rows = []
        for j in range(3):
            rows.append([_eta(gamma[j]) if j == m else Cyclotomic(0)
                         for m in range(3)])
        return rows
    rows = []
    for j in range(3):
        row = []
        for m in range(3):
            acc = Cyclotomic(0)
            for k in range(3):
                acc = acc + _eta((j - m) * k + gamma[k])
            row.append(acc)
        rows.append(row)
    return rows


def _apply(matrix: list, ket: tuple) -> tuple:
    out = []
    for row in matrix:
        acc = Cyclotomic(0)
        for mv, kv in zip(row, ket):
            acc = acc + mv * kv
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# the check battery


def run_equivalence_checks() -> dict:
    entries = build_dictionary()
    by_name = {e.name: e for e in entries}
    by_support = {e.support: e.name for e in entries}
    report: dict = {"dim": 3}

    # 1. possibilistic agreement on all 144 pairs, toy side computed as an
    # honest relational composite effect . state
    toy_states = {e.name: tr.Rel.state(3, e.support) for e in entries}
    failures = []
    for e in entries:
        effect = toy_states[e.name].converse()
        for s in entries:
            toy_possible = (effect @ toy_states[s.name]).scalar_true()
            quantum_possible = not _inner(e.ket, s.ket).is_zero()
            if toy_possible != quantum_possible:
                failures.append({"effect": e.name, "state": s.name,
                                 "toy": toy_possible,
                                 "quantum": quantum_possible})
    report["possibilistic"] = {"pairs": 144, "failures": failures}

    # 2. exact probabilities: toy coset measurement vs quantum Born rule
    prob_failures = []
    values_seen = set()
    allowed = {Fraction(0), Fraction(1, 3), Fraction(1)}
    for family, coeffs in FAMILIES.items():
        indicators = ps.basis_indicators(coeffs, 3, 1)
        effect_names = [f"{family}_{k}" for k in range(3)]
        for s in entries:
            mu = _phasespace_state(s.name).distribution()
            toy_probs = ps.measure_probabilities(mu, indicators)
            for k, effect_name in enumerate(effect_names):
                e = by_name[effect_name]
                toy_p = toy_probs[k]
                braket = _inner(e.ket, s.ket)
                quantum_p = braket.norm2() / (e.norm2 * s.norm2)
                values_seen.update({toy_p, quantum_p})
                if toy_p != quantum_p or toy_p not in allowed:
                    prob_failures.append({"effect": effect_name,
                                          "state": s.name,
                                          "toy": str(toy_p),
                                          "quantum": str(quantum_p)})
    report["probabilities"] = {
        "pairs": 144,
        "failures": prob_failures,
        "valuesSeen": sorted(str(v) for v in values_seen),
    }

    # 3. phase groups: toy (Z_3)^2 composition tables, quantum divisor
    # profile, and the dictionary a homomorphism on each torus
    group_ok = True
    homomorphism_ok = True
    for color in ("Z", "X"):
        for s1, t1, s2, t2 in product(range(3), repeat=4):
            lhs = tr.phase_map(color, 3, s1, t1) @ \
                tr.phase_map(color, 3, s2, t2)
            if lhs != tr.phase_map(color, 3, s1 + s2, t1 + t2):
                group_ok = False
            u1, v1 = _phi(color, s1, t1)
            u2, v2 = _phi(color, s2, t2)
            if _phi(color, s1 + s2, t1 + t2) != ((u1 + u2) % 3,
                                                 (v1 + v2) % 3):
                homomorphism_ok = False
        # the dictionary's phase coordinates agree with _phi on every
        # unbiased named state
        for e in entries:
            idx = _toy_phase_index(color, e.name)
            if idx is None:
                continue
            u, v = _phi(color, *idx)
            if color == e.color:
                got = (e.phases.alpha(1), e.phases.alpha(2))
                if got != (Turn.exact(u, 3), Turn.exact(v, 3)):
                    homomorphism_ok = False
            # the named support really is that unbiased point
            psi = tr.phase_state(color, 3, *idx)
            if psi.support() != e.support:
                homomorphism_ok = False
    quantum_group = phase_group(3)
    report["phaseGroups"] = {
        "toyGroupLaw": group_ok,
        "toyFactors": [3, 3],
        "quantumFactors": quantum_group["factors"],
        "dictionaryHomomorphism": homomorphism_ok,
        "isomorphic": (group_ok and homomorphism_ok
                       and quantum_group["factors"] == [3, 3]),
    }

    # 4. equivariance of the dictionary under all 18 phase maps
    equiv_failures = []
    checks = 0
    for color in ("Z", "X"):
        for sigma, t in product(range(3), repeat=2):
            toy_map = tr.phase_map(color, 3, sigma, t)
            mat = _quantum_phase_matrix(color, *_phi(color, sigma, t))
            for s in entries:
                checks += 1
                image_support = (toy_map @ toy_states[s.name]).support()
                target_name = by_support.get(image_support)
                if target_name is None:
                    equiv_failures.append({"color": color,
                                           "map": [sigma, t],
                                           "state": s.name,
                                           "reason": "image not a state"})
                    continue
                image_ket = _apply(mat, s.ket)
                if not _proportional(image_ket,
                                     by_name[target_name].ket):
                    equiv_failures.append({"color": color,
                                           "map": [sigma, t],
                                           "state": s.name,
                                           "target": target_name,
                                           "reason": "kets not parallel"})
    report["equivariance"] = {"maps": 18, "stateChecks": checks,
                              "failures": equiv_failures}

    report["passed"] = (not failures and not prob_failures
                        and report["phaseGroups"]["isomorphic"]
                        and not equiv_failures)
    return report
