"""Small dense linear algebra over the prime field Z_p.

Everything works on numpy int64 arrays with entries reduced mod p.
p is assumed prime; inverses come from Fermat's little theorem.
"""

from __future__ import annotations

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def rref_mod(a, p: int):
    """Row-reduced echelon form mod p; returns (R, pivot_columns)."""
    r = np.array(a, dtype=np.int64) % p
    rows, cols = r.shape
    pivots = []
    lead = 0
    for col in range(cols):
        if lead >= rows:
            break
        pivot = None
        for i in range(lead, rows):
            if r[i, col] % p:
                pivot = i
                break
        if pivot is None:
            continue
        r[[lead, pivot]] = r[[pivot, lead]]
        r[lead] = (r[lead] * inv_mod(int(r[lead, col]), p)) % p
        for i in range(rows):
            if i != lead and r[i, col] % p:
                r[i] = (r[i] - r[i, col] * r[lead]) % p
        pivots.append(col)
        lead += 1
    return r, pivots


def rank_mod(a, p: int) -> int:
    _, pivots = rref_mod(a, p)
    return len(pivots)


def solve_mod(a, b, p: int):
    """One solution x of a @ x = b mod p, or None if inconsistent."""
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    rows, cols = a.shape
    aug = np.concatenate([a, b.reshape(rows, 1)], axis=1)
    r, pivots = rref_mod(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for row, col in enumerate(pivots):
        x[col] = r[row, cols]
    return x


def nullspace_mod(a, p: int):
    """Basis of the right null space mod p, as rows of the result."""
    a = np.array(a, dtype=np.int64) % p
    _, cols = a.shape
    r, pivots = rref_mod(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for row, col in enumerate(pivots):
            v[col] = (-r[row, f]) % p
        basis.append(v)
    if basis:
        return np.array(basis, dtype=np.int64)
    return np.zeros((0, cols), dtype=np.int64)


def inv_matrix_mod(a, p: int):
    """Matrix inverse mod p; raises if singular."""
    a = np.array(a, dtype=np.int64) % p
    n, m = a.shape
    if n != m:
        raise ValueError("only square matrices invert")
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    r, pivots = rref_mod(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError(f"matrix is singular mod {p}")
    return r[:, n:]


def span_mod(basis, p: int):
    """Every vector in the row span of basis, as a list of tuples.

    The basis rows need not be independent; duplicates collapse.
    """
    basis = np.array(basis, dtype=np.int64) % p
    basis, pivots = rref_mod(basis, p)
    basis = basis[: len(pivots)]
    k, n = basis.shape
    points = []
    for idx in range(p ** k):
        coeffs = []
        rest = idx
        for _ in range(k):
            coeffs.append(rest % p)
            rest //= p
        v = np.zeros(n, dtype=np.int64)
        for c, row in zip(coeffs, basis):
            v = (v + c * row) % p
        points.append(tuple(int(t) for t in v))
    return sorted(set(points))
