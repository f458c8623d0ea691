"""Sign-tracked stabilizer tableau used as the ground-truth oracle.

Rows are stored as packed integers (bit q is qubit q) together with a phase
exponent in the canonical i^k X^x Z^z convention of ``foliate.pauli``.
Destabilizer rows are kept so that every measurement costs O(n) row
operations.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .pauli import PauliOperator, PauliSpan, _popcount

__all__ = ["Tableau", "init_product", "apply_cz", "measure_pauli", "expectation", "make_rng"]

_BASIS_LETTERS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class Tableau:
    """Pure n-qubit stabilizer state with destabilizers.

    The state is mutated in place by the gate and measurement methods;
    use :meth:`copy` to branch.
    """

    __slots__ = ("n", "sx", "sz", "sk", "dx", "dz")

    def __init__(self, n: int, sx, sz, sk, dx, dz) -> None:
        self.n = n
        self.sx, self.sz, self.sk = list(sx), list(sz), list(sk)
        self.dx, self.dz = list(dx), list(dz)

    # construction -----------------------------------------------------------
    @classmethod
    def product(cls, bases: Sequence[str]) -> "Tableau":
        """Product of single-qubit eigenstates, e.g. ["X+", "Y-", "Z+"]."""
        n = len(bases)
        sx, sz, sk, dx, dz = [], [], [], [], []
        for q, b in enumerate(bases):
            letter, sgn = b[0].upper(), b[1:] or "+"
            if letter not in _BASIS_LETTERS or sgn not in ("+", "-"):
                raise ValueError(f"bad basis label {b!r}")
            x, z = _BASIS_LETTERS[letter]
            sx.append(x << q)
            sz.append(z << q)
            sk.append((x & z) + (2 if sgn == "-" else 0))
            # destabilizer: Z for X/Y states, X for Z states
            dx.append((0 if x else 1) << q)
            dz.append((1 if x else 0) << q)
        return cls(n, sx, sz, sk, dx, dz)

    @classmethod
    def from_stabilizers(cls, gens: Sequence[PauliOperator]) -> "Tableau":
        """State stabilized by n independent commuting Hermitian generators."""
        if not gens:
            return cls(0, [], [], [], [], [])
        n = gens[0].n
        if len(gens) != n:
            raise ValueError(f"need {n} generators, got {len(gens)}")
        for g in gens:
            if not g.is_hermitian:
                raise ValueError(f"{g} is not Hermitian")
        span = PauliSpan(n, tuple(gens))
        if span.rank != n:
            raise ValueError("generators are not independent")
        if not span.is_abelian:
            raise ValueError("generators do not commute")
        span.check_consistent()
        stabs = list(gens)
        pool = [PauliOperator(n, 1 << q, 0) for q in range(n)] + [PauliOperator(n, 0, 1 << q) for q in range(n)]
        destabs = []
        for i in range(n):
            a = stabs[i]
            j = next(j for j, u in enumerate(pool) if not a.commutes(u))
            b = pool.pop(j)
            destabs.append(b)
            for m in range(i + 1, n):
                if not stabs[m].commutes(b):
                    stabs[m] = stabs[m] * a
            new = []
            for u in pool:
                ux, uz = u.xbits, u.zbits
                if not u.commutes(b):
                    ux, uz = ux ^ a.xbits, uz ^ a.zbits
                    u = PauliOperator(n, ux, uz)
                if not u.commutes(a):
                    u = PauliOperator(n, u.xbits ^ b.xbits, u.zbits ^ b.zbits)
                new.append(u)
            pool = new
        return cls(
            n,
            [s.xbits for s in stabs],
            [s.zbits for s in stabs],
            [s.phase_k for s in stabs],
            [d.xbits for d in destabs],
            [d.zbits for d in destabs],
        )

    def copy(self) -> "Tableau":
        return Tableau(self.n, self.sx, self.sz, self.sk, self.dx, self.dz)

    # inspection ---------------------------------------------------------------
    def stabilizers(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, x, z, k) for x, z, k in zip(self.sx, self.sz, self.sk)]

    def check_invariants(self) -> None:
        """O(n^2) consistency check of the stabilizer/destabilizer structure."""
        n = self.n
        S = self.stabilizers()
        Dz = [PauliOperator(n, x, z) for x, z in zip(self.dx, self.dz)]
        for i in range(n):
            if not S[i].is_hermitian:
                raise AssertionError(f"row {i} not Hermitian")
            for j in range(n):
                if not S[i].commutes(S[j]):
                    raise AssertionError(f"stabilizers {i},{j} anticommute")
                if not Dz[i].commutes(Dz[j]):
                    raise AssertionError(f"destabilizers {i},{j} anticommute")
                if S[i].commutes(Dz[j]) == (i == j):
                    raise AssertionError(f"pairing broken at {i},{j}")
        if PauliSpan(n, tuple(S)).rank != n:
            raise AssertionError("stabilizer rows are dependent")

    # gates --------------------------------------------------------------------
    def apply_cz(self, a: int, b: int) -> "Tableau":
        if a == b or not (0 <= a < self.n and 0 <= b < self.n):
            raise IndexError(f"bad CZ pair ({a}, {b}) on {self.n} qubits")
        ma, mb = 1 << a, 1 << b
        sx, sz, sk = self.sx, self.sz, self.sk
        for i in range(self.n):
            x = sx[i]
            xa, xb = x & ma, x & mb
            if xa or xb:
                if xa and xb:
                    sk[i] = (sk[i] + 2) % 4
                if xb:
                    sz[i] ^= ma
                if xa:
                    sz[i] ^= mb
            x = self.dx[i]
            if x & ma:
                self.dz[i] ^= mb
            if x & mb:
                self.dz[i] ^= ma
        return self

    def apply_h(self, q: int) -> "Tableau":
        m = 1 << q
        for i in range(self.n):
            x, z = self.sx[i] & m, self.sz[i] & m
            if x and z:
                self.sk[i] = (self.sk[i] + 2) % 4
            if bool(x) != bool(z):
                self.sx[i] ^= m
                self.sz[i] ^= m
            x, z = self.dx[i] & m, self.dz[i] & m
            if bool(x) != bool(z):
                self.dx[i] ^= m
                self.dz[i] ^= m
        return self

    def apply_s(self, q: int) -> "Tableau":
        m = 1 << q
        for i in range(self.n):
            if self.sx[i] & m:
                self.sk[i] = (self.sk[i] + 1) % 4
                self.sz[i] ^= m
            if self.dx[i] & m:
                self.dz[i] ^= m
        return self

    def apply_pauli(self, p: PauliOperator) -> "Tableau":
        """Conjugate the state by a Pauli error: flips the signs of anticommuting rows."""
        for i in range(self.n):
            if _popcount((self.sx[i] & p.zbits) ^ (self.sz[i] & p.xbits)) & 1:
                self.sk[i] = (self.sk[i] + 2) % 4
        return self

    # measurement ------------------------------------------------------------
    def _row_product(self, idx: Sequence[int]) -> tuple[int, int, int]:
        x = z = k = 0
        for i in idx:
            k += self.sk[i] + 2 * _popcount(z & self.sx[i])
            x ^= self.sx[i]
            z ^= self.sz[i]
        return x, z, k % 4

    def expectation(self, p: PauliOperator) -> int:
        """+1 or -1 if p (Hermitian) has a definite value, else 0."""
        if p.n != self.n:
            raise ValueError("qubit counts differ")
        px, pz = p.xbits, p.zbits
        for i in range(self.n):
            if _popcount((self.sx[i] & pz) ^ (self.sz[i] & px)) & 1:
                return 0
        idx = [i for i in range(self.n) if _popcount((self.dx[i] & pz) ^ (self.dz[i] & px)) & 1]
        x, z, k = self._row_product(idx)
        assert x == px and z == pz
        d = (p.phase_k - k) % 4
        if d % 2:
            raise ValueError(f"{p} is not Hermitian")
        return 1 if d == 0 else -1

    def measure(self, p: PauliOperator, forced: int | None = None,
                rng: np.random.Generator | None = None) -> tuple[int, bool]:
        """Projective measurement of Hermitian p; returns (outcome, deterministic)."""
        if not p.is_hermitian:
            raise ValueError(f"{p} is not Hermitian")
        px, pz = p.xbits, p.zbits
        sx, sz, sk = self.sx, self.sz, self.sk
        n = self.n
        anti = [i for i in range(n) if _popcount((sx[i] & pz) ^ (sz[i] & px)) & 1]
        if not anti:
            val = self.expectation(p)
            if forced is not None and forced != val:
                raise ValueError(f"forced outcome {forced} contradicts deterministic value {val}")
            return val, True
        if forced is None:
            if rng is None:
                raise ValueError("random outcome needs an rng or a forced value")
            outcome = 1 if rng.integers(2) == 0 else -1
        else:
            if forced not in (1, -1):
                raise ValueError("forced outcome must be +1 or -1")
            outcome = forced
        r = anti[0]
        rx, rz, rk = sx[r], sz[r], sk[r]
        for i in anti[1:]:
            sk[i] = (sk[i] + rk + 2 * _popcount(sz[i] & rx)) % 4
            sx[i] ^= rx
            sz[i] ^= rz
        dx, dz = self.dx, self.dz
        for i in range(n):
            if i != r and _popcount((dx[i] & pz) ^ (dz[i] & px)) & 1:
                dx[i] ^= rx
                dz[i] ^= rz
        dx[r], dz[r] = rx, rz
        sx[r], sz[r] = px, pz
        sk[r] = (p.phase_k + (0 if outcome == 1 else 2)) % 4
        return outcome, False

    def measure_single(self, q: int, basis: str, forced: int | None = None,
                       rng: np.random.Generator | None = None) -> tuple[int, bool]:
        return self.measure(PauliOperator.single(self.n, q, basis), forced, rng)

    def reduced_stabilizers(self, keep: Sequence[int]) -> list[PauliOperator]:
        """Generators of the stabilizer subgroup supported on ``keep``.

        Each generator is returned on the len(keep)-qubit register, ordered as
        ``keep``.  When the kept qubits are unentangled from the rest (as after
        measuring every other qubit) the list has len(keep) elements.
        """
        keepset = set(keep)
        other = [q for q in range(self.n) if q not in keepset]
        rows = list(zip(self.sx, self.sz, self.sk))
        # eliminate columns of the discarded qubits (x then z), phase-exact
        cols = [(q, 0) for q in other] + [(q, 1) for q in other]
        used = [False] * len(rows)
        for q, part in cols:
            piv = None
            for i, (x, z, _) in enumerate(rows):
                if not used[i] and ((x if part == 0 else z) >> q & 1):
                    piv = i
                    break
            if piv is None:
                continue
            used[piv] = True
            px, pz, pk = rows[piv]
            for i, (x, z, k) in enumerate(rows):
                if i != piv and ((x if part == 0 else z) >> q & 1):
                    rows[i] = (x ^ px, z ^ pz, (k + pk + 2 * _popcount(z & px)) % 4)
        out = []
        for i, (x, z, k) in enumerate(rows):
            if used[i]:
                continue
            op = PauliOperator(self.n, x, z, k)
            out.append(op.restrict(keep))
        return out


def init_product(bases: Sequence[str]) -> Tableau:
    return Tableau.product(bases)


def apply_cz(t: Tableau, a: int, b: int) -> Tableau:
    """Functional CZ: returns a new tableau."""
    return t.copy().apply_cz(a, b)


def measure_pauli(t: Tableau, p: PauliOperator, forced: int | None = None,
                  rng_seed: int | np.random.Generator | None = None) -> tuple[int, bool, Tableau]:
    """Functional measurement: (outcome, deterministic, new tableau)."""
    t2 = t.copy()
    rng = None if forced is not None else make_rng(rng_seed)
    out, det = t2.measure(p, forced, rng)
    return out, det, t2


def expectation(t: Tableau, p: PauliOperator) -> int:
    return t.expectation(p)
