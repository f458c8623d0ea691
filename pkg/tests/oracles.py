"""Simulation oracles that do not use the relation solver."""

from __future__ import annotations

import numpy as np

from foliate.foliation import ChannelSpec, assemble
from foliate.pauli import PauliOperator, PauliSpan, logical_pairs
from foliate.sim import Tableau


def purified_output_group(spec: ChannelSpec, seed: int, graph=None) -> PauliSpan:
    """Stabilizer group on the output wires when every input logical is
    maximally entangled with a reference qubit; signs are the raw frame."""
    g = graph or assemble(spec)
    nv = len(g.vertices)
    pairs = logical_pairs(spec.G_in)
    total = nv + len(pairs)
    gens = [s.embed(total, list(g.inputs)) for s in spec.G_in.basis().generators]
    for j, (xb, zb) in enumerate(pairs):
        ref = nv + j
        gens.append(xb.embed(total, list(g.inputs)) * PauliOperator.single(total, ref, "X"))
        gens.append(zb.embed(total, list(g.inputs)) * PauliOperator.single(total, ref, "Z"))
    inputs = set(g.inputs)
    gens += [PauliOperator.single(total, v, "X") for v in range(nv) if v not in inputs]
    T = Tableau.from_stabilizers(gens)
    for a, b in g.edges:
        T.apply_cz(a, b)
    rng = np.random.default_rng(seed)
    for v in sorted(g.basis):
        T.measure_single(v, g.basis[v], rng=rng)
    return PauliSpan(spec.n, tuple(T.reduced_stabilizers(list(g.outputs))))


def random_abelian(n: int, count: int, rng: np.random.Generator) -> PauliSpan:
    gens: list[PauliOperator] = []
    for _ in range(20 * count):
        if len(gens) == count:
            break
        x, z = int(rng.integers(2 ** n)), int(rng.integers(2 ** n))
        p = PauliOperator(n, x, z, bin(x & z).count("1") + 2 * int(rng.integers(2)))
        if p.is_identity or not all(p.commutes(q) for q in gens):
            continue
        if PauliSpan(n, tuple(gens)).contains(p):
            continue
        gens.append(p)
    return PauliSpan(n, tuple(gens))
