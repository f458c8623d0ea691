"""One-dimensional cluster-state wires: layouts, index maps and Sigma operators.

A wire of D intervals is an open chain of N qubits with sites numbered
1..N along the chain (1-based, as in reports).  Site 1 carries the input,
site N is the output.

TypeI wires (measured in X) use two sites per interval:
    Z(t) = 2t - 1,  X(t) = 2t,  output Z(D+1) = 2D + 1.
TypeII wires (measured in Y) use three:
    Z(t) = 3t - 2,  Y(t) = 3t - 1,  X(t) = 3t,  output Z(D+1) = 3D + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .pauli import PauliOperator, PauliSpan

__all__ = [
    "WireKind",
    "WireLayout",
    "site_index",
    "chain_cluster_span",
    "chain_circuit",
    "sigma_support",
    "wire_logical_rep",
    "encoded_logical",
]


class WireKind(str, Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"

    @classmethod
    def parse(cls, s: "str | WireKind") -> "WireKind":
        if isinstance(s, WireKind):
            return s
        key = s.strip().lower().replace("-", "").replace("_", "")
        if key in ("typei", "i", "1"):
            return cls.TYPE_I
        if key in ("typeii", "ii", "2"):
            return cls.TYPE_II
        raise ValueError(f"unknown wire kind {s!r}")


@dataclass(frozen=True)
class WireLayout:
    kind: WireKind
    D: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", WireKind.parse(self.kind))
        if self.D < 1:
            raise ValueError("a wire needs D >= 1")

    @property
    def per_interval(self) -> int:
        return 2 if self.kind is WireKind.TYPE_I else 3

    @property
    def N(self) -> int:
        return self.per_interval * self.D + 1

    @property
    def output_site(self) -> int:
        return self.N

    @property
    def roles(self) -> tuple[str, ...]:
        return ("Z", "X") if self.kind is WireKind.TYPE_I else ("Z", "Y", "X")

    @property
    def basis(self) -> str:
        """Single-qubit measurement basis of every non-output site."""
        return "X" if self.kind is WireKind.TYPE_I else "Y"

    def site_index(self, role: str, t: int) -> int:
        return site_index(self, role, t)

    def role_of(self, site: int) -> tuple[str, int]:
        """Inverse of site_index."""
        if site == self.N:
            return "Z", self.D + 1
        if not 1 <= site < self.N:
            raise IndexError(f"site {site} outside 1..{self.N}")
        m = self.per_interval
        t = (site - 1) // m + 1
        return self.roles[(site - 1) % m], t


def site_index(layout: WireLayout, role: str, t: int) -> int:
    """1-based chain coordinate of (role, t)."""
    role = role.upper()
    if role not in layout.roles:
        raise ValueError(f"role {role} does not exist on a {layout.kind.value} wire")
    if role == "Z" and t == layout.D + 1:
        return layout.N
    if not 1 <= t <= layout.D:
        raise IndexError(f"interval {t} outside 1..{layout.D}")
    if layout.kind is WireKind.TYPE_I:
        return 2 * t - 1 if role == "Z" else 2 * t
    return {"Z": 3 * t - 2, "Y": 3 * t - 1, "X": 3 * t}[role]


def chain_circuit(N: int) -> list[tuple]:
    return [("CZ", mu, mu + 1) for mu in range(N - 1)]


def chain_cluster_span(N: int) -> PauliSpan:
    """C[mu] = Z_{mu-1} X_mu Z_{mu+1} for mu = 2..N (site 1 is the encoded input)."""
    if N < 2:
        raise ValueError("a chain needs N >= 2")
    gens = []
    for mu in range(1, N):
        ops = {mu: "X", mu - 1: "Z"}
        if mu + 1 < N:
            ops[mu + 1] = "Z"
        gens.append(PauliOperator.from_sparse(N, ops))
    return PauliSpan(N, tuple(gens))


def encoded_logical(N: int, letter: str) -> PauliOperator:
    """Logical operators of the chain with the input on site 1: X = X1 Z2, Z = Z1, Y = iXZ."""
    letter = letter.upper()
    if letter == "X":
        return PauliOperator.from_sparse(N, {0: "X", 1: "Z"})
    if letter == "Z":
        return PauliOperator.from_sparse(N, {0: "Z"})
    if letter == "Y":
        return PauliOperator.from_sparse(N, {0: "Y", 1: "Z"})
    raise ValueError(letter)


def _sites_op(layout: WireLayout, sites: list[int]) -> PauliOperator:
    b = layout.basis
    return PauliOperator.from_sparse(layout.N, [(s - 1, b) for s in sites])


def sigma_sites(layout: WireLayout, P: str, t: int) -> list[int]:
    """1-based sites whose wire-basis outcomes multiply into Sigma^P(t)."""
    P = P.upper()
    if not 1 <= t <= layout.D + 1:
        raise IndexError(f"interval {t} outside 1..{layout.D + 1}")
    s = layout.site_index
    if layout.kind is WireKind.TYPE_I:
        if P == "X":
            if t > layout.D:
                raise IndexError("Sigma^X is defined for t <= D")
            return [s("Z", mu) for mu in range(1, t + 1)]
        if P == "Z":
            return [s("X", mu) for mu in range(1, t)]
        raise ValueError("TypeI wires have no Sigma^Y; use the two-target coupling")
    if P != "Z" and t > layout.D:
        raise IndexError(f"Sigma^{P} is defined for t <= D")
    if P == "X":
        return [q for mu in range(1, t + 1) for q in (s("Y", mu), s("Z", mu))]
    if P == "Y":
        return [s("Z", t)] + [q for mu in range(1, t) for q in (s("X", mu), s("Z", mu))]
    if P == "Z":
        return [q for mu in range(1, t) for q in (s("X", mu), s("Y", mu))]
    raise ValueError(P)


def sigma_support(layout: WireLayout, P: str, t: int) -> PauliOperator:
    """Sigma^P(t) as a product of wire-basis operators on the chain."""
    return _sites_op(layout, sigma_sites(layout, P, t))


def wire_logical_rep(layout: WireLayout, P: str, t: int) -> PauliOperator:
    """Sigma^P(t) sigma^Z[P(t)], signed so that it equals the encoded logical
    times an element of the chain stabilizer group exactly."""
    P = P.upper()
    rep = sigma_support(layout, P, t) * PauliOperator.single(layout.N, layout.site_index(P, t) - 1, "Z")
    rep = rep.unsigned() if rep.is_hermitian else rep.scaled(1).unsigned()
    chain = chain_cluster_span(layout.N)
    logical = encoded_logical(layout.N, P)
    k = chain.phase_of(rep * logical)
    if k is None or k % 2:
        raise AssertionError(f"rep of {P} at t={t} is not equivalent to the logical")
    return rep if k == 0 else -rep
