"""Dense matrix oracles for small registers (qubit 0 is the leftmost tensor factor)."""

from __future__ import annotations

from functools import reduce

import numpy as np

from foliate.pauli import PauliOperator

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
Y = 1j * X @ Z
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
LETTER = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def dense(p: PauliOperator) -> np.ndarray:
    """i^k prod X^x Z^z, with X before Z on every qubit."""
    mats = []
    for j in range(p.n):
        m = I2
        if p.xbits >> j & 1:
            m = m @ X
        if p.zbits >> j & 1:
            m = m @ Z
        mats.append(m)
    return (1j ** p.phase_k) * kron_all(mats)


def single(n: int, q: int, m: np.ndarray) -> np.ndarray:
    return kron_all([m if j == q else I2 for j in range(n)])


def cz(n: int, a: int, b: int) -> np.ndarray:
    d = np.ones(2 ** n, dtype=complex)
    for idx in range(2 ** n):
        bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
        if bits[a] and bits[b]:
            d[idx] = -1
    return np.diag(d)


def gate_matrix(n: int, gate: tuple) -> np.ndarray:
    name = gate[0].upper()
    if name == "CZ":
        return cz(n, gate[1], gate[2])
    return single(n, gate[1], {"H": H, "S": S, "SDG": S.conj().T}[name])


def stabilizer_state(gens) -> np.ndarray:
    """Unique joint +1 eigenvector of n independent commuting generators."""
    n = gens[0].n
    P = np.eye(2 ** n, dtype=complex)
    for g in gens:
        P = P @ (np.eye(2 ** n) + dense(g)) / 2
    col = np.argmax(np.linalg.norm(P, axis=0))
    v = P[:, col]
    return v / np.linalg.norm(v)
