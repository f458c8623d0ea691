"""Phase-exact Pauli algebra and GF(2) symplectic linear algebra.

An n-qubit Pauli operator is stored in canonical form

    P = i^k  X^{x_0} Z^{z_0} (x) ... (x) X^{x_{n-1}} Z^{z_{n-1}}

with the x and z parts packed into Python integers (bit j is qubit j).
With this convention Y = iXZ, and the product of two canonical operators is

    (i^a X^x1 Z^z1)(i^b X^x2 Z^z2) = i^(a+b) (-1)^(z1.x2) X^(x1^x2) Z^(z1^z2).

Indices are 0-based everywhere in code; the text format and all reports
shown to users are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PauliOperator",
    "PauliSpan",
    "GaugeGroup",
    "InconsistentGroupError",
    "vectorize",
    "devectorize",
    "symplectic_form",
    "multiply",
    "member_with_witness",
    "centralizer",
    "stabilizer_of_gauge",
    "logical_pairs",
    "conjugate_by_circuit",
    "conjugate",
    "commuting_subgroup",
    "intersection",
    "quotient_basis",
    "symplectic_gram_schmidt",
]

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return v.bit_count()


class InconsistentGroupError(ValueError):
    """Raised when -1 lies in the span of a set of supposedly stabilizing operators."""


@dataclass(frozen=True)
class PauliOperator:
    """Phase-tracked Pauli operator i^phase_k * prod_j X^{x_j} Z^{z_j}."""

    n: int
    xbits: int = 0
    zbits: int = 0
    phase_k: int = 0

    def __post_init__(self) -> None:
        mask = (1 << self.n) - 1
        if self.n < 0 or self.xbits & ~mask or self.zbits & ~mask:
            raise ValueError(f"bits outside an {self.n}-qubit register")
        object.__setattr__(self, "phase_k", self.phase_k % 4)

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_str(cls, text: str) -> "PauliOperator":
        """Parse e.g. "-iXYZI"; the optional sign prefix is one of +, -, +i, -i."""
        s = text.strip().replace("−", "-")
        k = 0
        if s.startswith(("+i", "-i")):
            k = 1 if s[0] == "+" else 3
            s = s[2:]
        elif s.startswith("i"):
            k, s = 1, s[1:]
        elif s.startswith(("+", "-")):
            k = 0 if s[0] == "+" else 2
            s = s[1:]
        x = z = 0
        for j, c in enumerate(s):
            if c == "X":
                x |= 1 << j
            elif c == "Z":
                z |= 1 << j
            elif c == "Y":
                x |= 1 << j
                z |= 1 << j
                k += 1
            elif c != "I":
                raise ValueError(f"bad Pauli letter {c!r} in {text!r}")
        return cls(len(s), x, z, k)

    @classmethod
    def from_sparse(cls, n: int, ops: dict[int, str] | Iterable[tuple[int, str]], sign: int = 1) -> "PauliOperator":
        """Build from {qubit: letter}; the result is Hermitian times ``sign``."""
        items = ops.items() if isinstance(ops, dict) else ops
        x = z = 0
        k = 0 if sign == 1 else 2
        for j, c in items:
            bit = 1 << j
            if c in "XY":
                x ^= bit
            if c in "ZY":
                z ^= bit
            if c == "Y":
                k += 1
            if c not in "XYZI":
                raise ValueError(f"bad Pauli letter {c!r}")
        return cls(n, x, z, k)

    @classmethod
    def single(cls, n: int, j: int, letter: str) -> "PauliOperator":
        return cls.from_sparse(n, {j: letter})

    @classmethod
    def from_bits(cls, n: int, x: int, z: int, sign: int = 1) -> "PauliOperator":
        """Hermitian operator with the given bits, times ``sign``."""
        return cls(n, x, z, _popcount(x & z) + (0 if sign == 1 else 2))

    # text ------------------------------------------------------------------
    def letters(self) -> str:
        return "".join(_LETTERS[(self.xbits >> j & 1, self.zbits >> j & 1)] for j in range(self.n))

    def __str__(self) -> str:
        k = (self.phase_k - _popcount(self.xbits & self.zbits)) % 4
        return _PREFIX[k] + self.letters()

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def sparse_str(self) -> str:
        """1-based sparse form, e.g. "-X1 Z3"."""
        k = (self.phase_k - _popcount(self.xbits & self.zbits)) % 4
        body = " ".join(f"{c}{j + 1}" for j, c in enumerate(self.letters()) if c != "I")
        return _PREFIX[k] + (body or "I")

    # algebra ---------------------------------------------------------------
    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.xbits, self.zbits, self.phase_k + 2)

    def scaled(self, k: int) -> "PauliOperator":
        """Multiply by i^k."""
        return PauliOperator(self.n, self.xbits, self.zbits, self.phase_k + k)

    def commutes(self, other: "PauliOperator") -> bool:
        return _popcount((self.xbits & other.zbits) ^ (self.zbits & other.xbits)) % 2 == 0

    @property
    def is_hermitian(self) -> bool:
        return (self.phase_k + _popcount(self.xbits & self.zbits)) % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators relative to the plain letter string."""
        k = (self.phase_k - _popcount(self.xbits & self.zbits)) % 4
        if k % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if k == 0 else -1

    def unsigned(self) -> "PauliOperator":
        """The Hermitian operator with the same bits and sign +1."""
        return PauliOperator.from_bits(self.n, self.xbits, self.zbits)

    @property
    def is_identity(self) -> bool:
        return self.xbits == 0 and self.zbits == 0

    @property
    def support(self) -> list[int]:
        s = self.xbits | self.zbits
        return [j for j in range(self.n) if s >> j & 1]

    @property
    def weight(self) -> int:
        return _popcount(self.xbits | self.zbits)

    def letter(self, j: int) -> str:
        return _LETTERS[(self.xbits >> j & 1, self.zbits >> j & 1)]

    def vec(self) -> int:
        """Packed symplectic vector: x in the low n bits, z in the high n bits."""
        return self.xbits | (self.zbits << self.n)

    def same_bits(self, other: "PauliOperator") -> bool:
        return self.xbits == other.xbits and self.zbits == other.zbits

    def embed(self, n_total: int, positions: Sequence[int]) -> "PauliOperator":
        """Place qubit j of self on qubit positions[j] of an n_total register."""
        x = z = 0
        for j, p in enumerate(positions):
            if self.xbits >> j & 1:
                x |= 1 << p
            if self.zbits >> j & 1:
                z |= 1 << p
        return PauliOperator(n_total, x, z, self.phase_k)

    def restrict(self, positions: Sequence[int]) -> "PauliOperator":
        """Inverse of embed on the listed positions; the sign relative to the letters is kept."""
        x = z = 0
        for j, p in enumerate(positions):
            if self.xbits >> p & 1:
                x |= 1 << j
            if self.zbits >> p & 1:
                z |= 1 << j
        k = self.phase_k - _popcount(self.xbits & self.zbits) + _popcount(x & z)
        return PauliOperator(len(positions), x, z, k)

    def xvec(self) -> np.ndarray:
        return np.array([self.xbits >> j & 1 for j in range(self.n)], dtype=np.uint8)

    def zvec(self) -> np.ndarray:
        return np.array([self.zbits >> j & 1 for j in range(self.n)], dtype=np.uint8)


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Canonical-form product p*q with exact phase."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    k = p.phase_k + q.phase_k + 2 * _popcount(p.zbits & q.xbits)
    return PauliOperator(p.n, p.xbits ^ q.xbits, p.zbits ^ q.zbits, k)


def product(ops: Iterable[PauliOperator], n: int) -> PauliOperator:
    out = PauliOperator(n)
    for op in ops:
        out = multiply(out, op)
    return out


def vectorize(p: PauliOperator) -> np.ndarray:
    """v(P) = (p^X | p^Z) as a length-2n uint8 vector; the phase is dropped."""
    return np.concatenate([p.xvec(), p.zvec()])


def devectorize(bits: Sequence[int]) -> PauliOperator:
    """Hermitian Pauli with sign +1 for a (x | z) vector."""
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) % 2:
        raise ValueError("symplectic vectors have even length")
    n = len(bits) // 2
    x = sum(int(b) << j for j, b in enumerate(bits[:n]))
    z = sum(int(b) << j for j, b in enumerate(bits[n:]))
    return PauliOperator.from_bits(n, x, z)


def symplectic_form(p: Sequence[int], q: Sequence[int]) -> int:
    """p^X.q^Z + p^Z.q^X mod 2."""
    p = np.asarray(p, dtype=np.int64)
    q = np.asarray(q, dtype=np.int64)
    if p.shape != q.shape or len(p) % 2:
        raise ValueError("symplectic vectors must have equal even length")
    n = len(p) // 2
    return int((p[:n] @ q[n:] + p[n:] @ q[:n]) % 2)


# ---------------------------------------------------------------------------
# GF(2) elimination on packed integers


class _Reducer:
    """Incremental reduced row echelon form over GF(2).

    Each stored row carries a ``combo`` bitmask naming the input vectors
    (by insertion index) whose sum it is.  Rows are kept fully reduced so
    membership is a single pass.
    """

    def __init__(self) -> None:
        self.rows: list[tuple[int, int, int]] = []  # (pivot bit, vector, combo)
        self.count = 0

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        for piv, row, c in self.rows:
            if v >> piv & 1:
                v ^= row
                combo ^= c
        return v, combo

    def add(self, v: int) -> tuple[bool, int]:
        """Insert vector; returns (independent, combo of earlier inputs if dependent)."""
        idx = self.count
        self.count += 1
        r, combo = self.reduce(v)
        combo ^= 1 << idx
        if r == 0:
            return False, combo
        piv = r.bit_length() - 1
        new_rows = []
        for p, row, c in self.rows:
            if row >> piv & 1:
                row ^= r
                c ^= combo
            new_rows.append((p, row, c))
        new_rows.append((piv, r, combo))
        self.rows = new_rows
        return True, 0

    @property
    def rank(self) -> int:
        return len(self.rows)


def _kernel(vectors: Sequence[int]) -> list[int]:
    """Basis of coefficient masks c with sum_i c_i v_i = 0."""
    red = _Reducer()
    out = []
    for v in vectors:
        ok, combo = red.add(v)
        if not ok:
            out.append(combo)
    return out


def _nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {v : popcount(r & v) even for all rows r}."""
    red = _Reducer()
    for r in rows:
        red.add(r)
    pivots = {p for p, _, _ in red.rows}
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = 1 << f
        for p, row, _ in red.rows:
            if row >> f & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def _swap_halves(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


def _from_vec(v: int, n: int) -> PauliOperator:
    mask = (1 << n) - 1
    return PauliOperator.from_bits(n, v & mask, v >> n)


# ---------------------------------------------------------------------------
# spans


@dataclass(frozen=True)
class PauliSpan:
    """Group generated by a list of Pauli operators, with a cached GF(2) reduction."""

    n: int
    generators: tuple[PauliOperator, ...] = ()
    _red: _Reducer = field(init=False, repr=False, compare=False)
    _independent: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        for g in gens:
            if g.n != self.n:
                raise ValueError("generator on the wrong number of qubits")
        object.__setattr__(self, "generators", gens)
        red = _Reducer()
        indep = []
        for i, g in enumerate(gens):
            ok, _ = red.add(g.vec())
            if ok:
                indep.append(i)
        object.__setattr__(self, "_red", red)
        object.__setattr__(self, "_independent", tuple(indep))

    @classmethod
    def from_strs(cls, strs: Sequence[str], n: int | None = None) -> "PauliSpan":
        ops = [PauliOperator.from_str(s) for s in strs]
        if n is None:
            if not ops:
                raise ValueError("need n for an empty span")
            n = ops[0].n
        return cls(n, tuple(ops))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    @property
    def rank(self) -> int:
        return self._red.rank

    @property
    def is_abelian(self) -> bool:
        g = self.generators
        return all(g[i].commutes(g[j]) for i in range(len(g)) for j in range(i))

    def basis(self) -> "PauliSpan":
        """Independent sub-list of the generators (first occurrences kept)."""
        return PauliSpan(self.n, tuple(self.generators[i] for i in self._independent))

    def contains(self, p: PauliOperator) -> bool:
        """Membership up to phase."""
        r, _ = self._red.reduce(p.vec())
        return r == 0

    def witness(self, p: PauliOperator) -> list[int] | None:
        """Indices of generators whose product equals p up to phase."""
        r, combo = self._red.reduce(p.vec())
        if r:
            return None
        return [i for i in range(len(self.generators)) if combo >> i & 1]

    def product_of(self, idx: Iterable[int]) -> PauliOperator:
        return product((self.generators[i] for i in sorted(idx)), self.n)

    def phase_of(self, p: PauliOperator) -> int | None:
        """k such that p = i^k * (product of a witness); None if p is outside the span."""
        w = self.witness(p)
        if w is None:
            return None
        return (p.phase_k - self.product_of(w).phase_k) % 4

    def sign_of(self, p: PauliOperator) -> int | None:
        """+1 if p is in the (Abelian) group, -1 if -p is, None otherwise."""
        k = self.phase_of(p)
        if k is None:
            return None
        if k % 2:
            return None
        return 1 if k == 0 else -1

    def __add__(self, other: "PauliSpan") -> "PauliSpan":
        """Free product of generating sets, realized as list concatenation."""
        if other.n != self.n:
            raise ValueError("spans on different registers")
        return PauliSpan(self.n, self.generators + other.generators)

    def check_consistent(self) -> None:
        """Raise InconsistentGroupError if -1 (or +-i) is a product of generators."""
        gens = self.generators
        for combo in _kernel([g.vec() for g in gens]):
            prod = product((gens[i] for i in range(len(gens)) if combo >> i & 1), self.n)
            if prod.phase_k != 0:
                raise InconsistentGroupError(
                    "generators multiply to " + {1: "i", 2: "-1", 3: "-i"}[prod.phase_k]
                )

    def strs(self) -> list[str]:
        return [str(g) for g in self.generators]


def member_with_witness(p: PauliOperator, span: PauliSpan, phase_exact: bool = False) -> list[int] | None:
    """Generator indices whose product is p (up to phase, or exactly).

    Generators that depend on earlier ones are never used, which picks the
    lexicographically-first solution under the generator ordering.
    """
    if p.n != span.n:
        raise ValueError("qubit counts differ")
    w = span.witness(p)
    if w is None:
        return None
    if phase_exact and span.product_of(w).phase_k != p.phase_k:
        return None
    return w


def centralizer(span: PauliSpan) -> PauliSpan:
    """All Paulis commuting with every generator (Hermitian, sign +1)."""
    n = span.n
    rows = [_swap_halves(g.vec(), n) for g in span.generators]
    basis = _nullspace(rows, 2 * n)
    return PauliSpan(n, tuple(_from_vec(v, n) for v in basis))


def commuting_subgroup(a: PauliSpan, b: PauliSpan) -> PauliSpan:
    """Elements of span(a) commuting with every generator of b; phases come from a."""
    sig = []
    for g in a.generators:
        s = 0
        for j, h in enumerate(b.generators):
            if not g.commutes(h):
                s |= 1 << j
        sig.append(s)
    out = []
    for combo in _kernel(sig):
        out.append(_hermitian(product((a.generators[i] for i in range(len(sig)) if combo >> i & 1), a.n)))
    return PauliSpan(a.n, tuple(o for o in out if not o.is_identity)).basis()


def _hermitian(p: PauliOperator) -> PauliOperator:
    """Fold a phase of +-i into a Hermitian operator (used for products of anticommuting terms)."""
    return p if p.is_hermitian else p.scaled(3)


def intersection(a: PauliSpan, b: PauliSpan) -> PauliSpan:
    """span(a) and span(b) intersected, up to phase; phases taken from a."""
    n = a.n
    na = len(a.generators)
    vecs = [g.vec() for g in a.generators] + [g.vec() for g in b.generators]
    out = []
    mask = (1 << na) - 1
    for combo in _kernel(vecs):
        ca = combo & mask
        if ca:
            out.append(_hermitian(product((a.generators[i] for i in range(na) if ca >> i & 1), n)))
    return PauliSpan(n, tuple(o for o in out if not o.is_identity)).basis()


def quotient_basis(z: PauliSpan, w: PauliSpan) -> PauliSpan:
    """Generators of z that are independent modulo span(w) (greedy, in order)."""
    red = _Reducer()
    for g in w.generators:
        red.add(g.vec())
    out = []
    for g in z.generators:
        ok, _ = red.add(g.vec())
        if ok:
            out.append(g)
    return PauliSpan(z.n, tuple(out))


def symplectic_gram_schmidt(ops: Sequence[PauliOperator]) -> tuple[list[tuple[PauliOperator, PauliOperator]], list[PauliOperator]]:
    """Split ops into anticommuting pairs and a commuting remainder.

    Returns (pairs, isotropic) where pairs[j] = (a_j, b_j) satisfy
    a_j b_l anticommute iff j = l, a's and b's commute among themselves,
    and every isotropic element commutes with everything returned.
    """
    pool = list(ops)
    pairs = []
    iso = []
    while pool:
        a = pool.pop(0)
        if a.is_identity:
            continue
        partner = next((i for i, q in enumerate(pool) if not a.commutes(q)), None)
        if partner is None:
            iso.append(a)
            continue
        b = pool.pop(partner)
        new = []
        for q in pool:
            if not q.commutes(b):
                q = _hermitian(q * a)
            if not q.commutes(a):
                q = _hermitian(q * b)
            new.append(q)
        pool = new
        pairs.append((a, b))
    return pairs, iso


# ---------------------------------------------------------------------------
# gauge groups


@dataclass(frozen=True)
class GaugeGroup:
    """A (possibly non-Abelian) gauge group with derived stabilizer and logicals."""

    span: PauliSpan

    @property
    def n(self) -> int:
        return self.span.n

    def stabilizer(self) -> PauliSpan:
        return stabilizer_of_gauge(self)

    def logical_pairs(self) -> list[tuple[PauliOperator, PauliOperator]]:
        return logical_pairs(self)

    def gauge_qubits(self) -> int:
        return (self.span.rank - self.stabilizer().rank) // 2


def stabilizer_of_gauge(g: GaugeGroup | PauliSpan) -> PauliSpan:
    """C(G) intersected with G, with signs from the generator products.

    For an Abelian G the result is a basis of G itself and -1 in G raises
    InconsistentGroupError.  For non-Abelian G every element is a product of
    generators in index order, folded to a Hermitian phase.
    """
    span = g.span if isinstance(g, GaugeGroup) else g
    if span.is_abelian:
        span.check_consistent()
        return span.basis()
    s = commuting_subgroup(span, span)
    s.check_consistent()
    return s


def logical_pairs(g: GaugeGroup | PauliSpan) -> list[tuple[PauliOperator, PauliOperator]]:
    """Symplectic basis (Xbar_j, Zbar_j) of C(G) modulo the stabilizer."""
    span = g.span if isinstance(g, GaugeGroup) else g
    stab = stabilizer_of_gauge(span)
    cent = centralizer(span)
    cands = sorted(quotient_basis(cent, stab).generators, key=lambda p: (p.weight, p.vec()))
    pairs, iso = symplectic_gram_schmidt(cands)
    if iso:
        raise ValueError("centralizer modulo stabilizer is degenerate")
    return pairs


# ---------------------------------------------------------------------------
# Clifford conjugation (CZ, H, S and S^dagger only)


def conjugate(p: PauliOperator, gate: tuple) -> PauliOperator:
    """U p U^dagger for one gate ("CZ", a, b), ("H", q), ("S", q) or ("SDG", q)."""
    name = gate[0].upper()
    x, z, k = p.xbits, p.zbits, p.phase_k
    qs = gate[1:]
    for q in qs:
        if not 0 <= q < p.n:
            raise IndexError(f"qubit {q} outside register of {p.n}")
    if name == "CZ":
        a, b = qs
        if a == b:
            raise ValueError("CZ needs two distinct qubits")
        xa, xb = x >> a & 1, x >> b & 1
        k += 2 * (xa & xb)
        z ^= (xb << a) | (xa << b)
    elif name == "H":
        (q,) = qs
        xq, zq = x >> q & 1, z >> q & 1
        k += 2 * (xq & zq)
        x = (x & ~(1 << q)) | (zq << q)
        z = (z & ~(1 << q)) | (xq << q)
    elif name in ("S", "SDG"):
        (q,) = qs
        xq, zq = x >> q & 1, z >> q & 1
        if name == "S":
            k += xq
        else:
            # S^dag X S = -Y = -i X Z ;  X^x Z^z -> (-i)^x X^x Z^(z+x), with Z^z Z^x ordering free
            k += 3 * xq
        z ^= xq << q
        del zq
    else:
        raise ValueError(f"unsupported gate {gate[0]!r}")
    return PauliOperator(p.n, x, z, k)


def conjugate_by_circuit(span: PauliSpan, circuit: Sequence[tuple]) -> PauliSpan:
    """Conjugate every generator gate by gate, tracking phases exactly."""
    out = []
    for g in span.generators:
        for gate in circuit:
            g = conjugate(g, gate)
        out.append(g)
    return PauliSpan(span.n, tuple(out))
