"""Heisenberg-picture relations of a measured graph state.

A measured graph system has vertices, CZ edges, a list of input vertices
(carrying an arbitrary input state) and single-qubit measurement bases on
every vertex that is not an output.  Non-input vertices start in |+>.

A relation is a tuple (support S, out O, inp Q, sign s) such that

    U (Q_in (x) X^a) U^dagger = s * prod_{v in S} B_v (x) O_out,

so that after measuring, prod_{v in S} m_v * s * <O> on the outputs equals
<Q> on the input.  Relations are found by GF(2) elimination over the
generators U X_v U^dagger (non-input v) and U X_v U^dagger, U Z_v U^dagger
(input v).  This is the generic oracle behind output frames, logical
tracking, measured inputs and the full check space.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .pauli import PauliOperator, PauliSpan, _Reducer, _popcount

__all__ = ["Relation", "GraphSystem", "conjugate_by_graph"]


@dataclass(frozen=True)
class Relation:
    support: frozenset[int]
    out: PauliOperator
    inp: PauliOperator
    sign: int

    def frame(self, outcomes: Mapping[int, int]) -> int:
        """sign times the product of recorded outcomes over the support."""
        s = self.sign
        for v in self.support:
            s *= outcomes[v]
        return s


def _letters_op(n: int, x: int, z: int) -> PauliOperator:
    """Hermitian letter-form operator (Y as a letter, sign +1)."""
    return PauliOperator(n, x, z, _popcount(x & z) % 4)


def conjugate_by_graph(p: PauliOperator, adj: Sequence[int]) -> PauliOperator:
    """Conjugate p by the product of all CZ gates of a graph (adjacency bitmasks).

    Each CZ maps X_a to X_a Z_b and fixes Z, so U (i^k X^x Z^z) U is
    i^k prod_{v in x} (X_v Z_{N(v)}) Z^z with the product taken phase-exactly.
    """
    out = PauliOperator(p.n, 0, 0, p.phase_k)
    q = p.xbits
    while q:
        low = q & -q
        out = out * PauliOperator(p.n, low, adj[low.bit_length() - 1], 0)
        q ^= low
    return out * PauliOperator(p.n, 0, p.zbits, 0)


class GraphSystem:
    """Measured graph state with designated input and output vertices."""

    def __init__(self, nv: int, edges: Sequence[tuple[int, int]], inputs: Sequence[int],
                 bases: Mapping[int, str], outputs: Sequence[int]) -> None:
        self.nv = nv
        self.edges = tuple(edges)
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.bases = dict(bases)
        adj = [0] * nv
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self edge at {a}")
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        self.adj = adj
        outset = set(self.outputs)
        for v in range(nv):
            if (v in self.bases) == (v in outset):
                raise ValueError(f"vertex {v} must be either measured or an output")
        self.measured = tuple(sorted(self.bases))
        self._meas_pos = {v: i for i, v in enumerate(self.measured)}
        self._in_pos = {v: i for i, v in enumerate(self.inputs)}
        self._out_pos = {v: i for i, v in enumerate(self.outputs)}
        self._bx = 0
        self._bz = 0
        for v, b in self.bases.items():
            b = b.upper()
            if b not in ("X", "Y", "Z"):
                raise ValueError(f"bad basis {b} at vertex {v}")
            if b in ("X", "Y"):
                self._bx |= 1 << v
            if b in ("Y", "Z"):
                self._bz |= 1 << v
        self._rows = self._build_rows()
        self._cache: dict = {}

    # rows -------------------------------------------------------------------
    def _build_rows(self) -> list[tuple[PauliOperator, PauliOperator]]:
        nv = self.nv
        rows = []
        inset = set(self.inputs)
        for v in range(nv):
            rows.append((PauliOperator(nv, 1 << v, 0), PauliOperator(nv, 1 << v, self.adj[v])))
            if v in inset:
                rows.append((PauliOperator(nv, 0, 1 << v), PauliOperator(nv, 0, 1 << v)))
        return rows

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    def _feature(self, x: int, z: int, px: int, pz: int) -> int:
        """Packed (meas | in | out) feature vector, meas most significant."""
        no, ni = self.n_out, self.n_in
        out = 0
        for i, v in enumerate(self.outputs):
            out |= ((x >> v) & 1) << i
            out |= ((z >> v) & 1) << (no + i)
        inp = 0
        for i, v in enumerate(self.inputs):
            inp |= ((px >> v) & 1) << i
            inp |= ((pz >> v) & 1) << (ni + i)
        anti = (x & self._bz) ^ (z & self._bx)
        meas = 0
        for i, v in enumerate(self.measured):
            meas |= ((anti >> v) & 1) << i
        return out | (inp << (2 * no)) | (meas << (2 * no + 2 * ni))

    @cached_property
    def _features(self) -> list[int]:
        return [self._feature(img.xbits, img.zbits, pre.xbits, pre.zbits) for pre, img in self._rows]

    def _in_vec(self, q: PauliOperator) -> int:
        ni = self.n_in
        return (q.xbits | (q.zbits << ni)) << (2 * self.n_out)

    def _out_vec(self, o: PauliOperator) -> int:
        return o.xbits | (o.zbits << self.n_out)

    def _reducer(self, allowed: PauliSpan | None) -> tuple[_Reducer, list[int]]:
        """Reducer over real rows followed by pseudo rows for the allowed input span.

        allowed=None means every input Pauli is allowed.
        """
        key = None if allowed is None else tuple(g.vec() for g in allowed.generators)
        if key in self._cache:
            return self._cache[key]
        red = _Reducer()
        kernel = []
        for f in self._features:
            ok, combo = red.add(f)
            if not ok:
                kernel.append(combo)
        if allowed is None:
            ni = self.n_in
            pseudo = [1 << (2 * self.n_out + i) for i in range(2 * ni)]
        else:
            if allowed.n != self.n_in:
                raise ValueError("allowed span lives on the wrong register")
            pseudo = [self._in_vec(g) for g in allowed.generators]
        for f in pseudo:
            ok, combo = red.add(f)
            if not ok:
                kernel.append(combo)
        self._cache[key] = (red, kernel)
        return red, kernel

    # relations ----------------------------------------------------------------
    def relation_from_combo(self, combo: int) -> Relation:
        nv = self.nv
        pre = PauliOperator.identity(nv)
        img = PauliOperator.identity(nv)
        i = 0
        c = combo
        nreal = len(self._rows)
        while c and i < nreal:
            if c & 1:
                p, m = self._rows[i]
                pre = pre * p
                img = img * m
            c >>= 1
            i += 1
        return self._relation(pre, img)

    def _relation(self, pre: PauliOperator, img: PauliOperator) -> Relation:
        nv = self.nv
        anti = (img.xbits & self._bz) ^ (img.zbits & self._bx)
        if anti:
            v = (anti & -anti).bit_length() - 1
            raise ValueError(f"operator does not commute with the measurement at vertex {v}")
        herm_img = _letters_op(nv, img.xbits, img.zbits)
        herm_pre = _letters_op(nv, pre.xbits, pre.zbits)
        k = ((img.phase_k - herm_img.phase_k) - (pre.phase_k - herm_pre.phase_k)) % 4
        if k % 2:
            raise AssertionError("relation with imaginary sign")
        meas_mask = 0
        for v in self.measured:
            meas_mask |= 1 << v
        supp_bits = (img.xbits | img.zbits) & meas_mask
        support = frozenset(v for v in self.measured if supp_bits >> v & 1)
        out = herm_img.restrict(self.outputs)
        inp = herm_pre.restrict(self.inputs)
        return Relation(support, out, inp, 1 if k == 0 else -1)

    def relation_for_support(self, support, out: PauliOperator | None = None) -> tuple[PauliOperator, Relation]:
        """Pre-image of prod_{v in support} B_v (x) out under the CZ circuit.

        Returns (pre-image, relation).  The pre-image is a valid relation only
        if it carries no Z on non-input vertices; callers check this with
        :meth:`pre_is_valid`.
        """
        nv = self.nv
        x = z = 0
        for v in support:
            b = self.bases[v].upper()
            if b in ("X", "Y"):
                x |= 1 << v
            if b in ("Y", "Z"):
                z |= 1 << v
        img = _letters_op(nv, x, z)
        if out is not None:
            img = img * out.embed(nv, self.outputs)
        pre = conjugate_by_graph(img, self.adj)
        return pre, self._relation(pre, img) if self.pre_is_valid(pre) else None

    def pre_is_valid(self, pre: PauliOperator) -> bool:
        mask = 0
        for v in self.inputs:
            mask |= 1 << v
        return (pre.zbits & ~mask) == 0

    def solve_output(self, out: PauliOperator, allowed: PauliSpan | None) -> Relation | None:
        """Relation with the given output operator and input in the allowed span."""
        red, _ = self._reducer(allowed)
        r, combo = red.reduce(self._out_vec(out))
        if r:
            return None
        return self.relation_from_combo(combo)

    def solve_input(self, q: PauliOperator, allowed: PauliSpan | None) -> Relation | None:
        """Relation whose input equals q modulo the allowed span (output chosen canonically)."""
        red, _ = self._reducer(allowed)
        r, combo = red.reduce(self._in_vec(q))
        if r >> (2 * self.n_out):
            return None
        return self.relation_from_combo(combo)

    def check_relations(self, allowed: PauliSpan) -> list[Relation]:
        """Basis of relations with trivial output and input in the allowed span."""
        _, kernel = self._reducer(allowed)
        nreal = len(self._rows)
        out = []
        for combo in kernel:
            if combo & ((1 << nreal) - 1):
                out.append(self.relation_from_combo(combo))
        return out

    def output_stabilizer_relations(self, allowed: PauliSpan) -> list[Relation]:
        """Relations whose outputs generate the output stabilizer group."""
        red, _ = self._reducer(allowed)
        lim = 2 * self.n_out
        return [self.relation_from_combo(c) for piv, _, c in red.rows if piv < lim]

    def output_span_relations(self) -> list[Relation]:
        """Relations with arbitrary input whose outputs span every propagated operator."""
        red, _ = self._reducer(None)
        lim = 2 * self.n_out
        return [self.relation_from_combo(c) for piv, _, c in red.rows if piv < lim]
