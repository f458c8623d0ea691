import numpy as np
import pytest

from foliate.pauli import PauliOperator, PauliSpan, conjugate_by_circuit
from foliate.sim import init_product
from foliate.wire import (
    WireKind,
    WireLayout,
    chain_circuit,
    chain_cluster_span,
    encoded_logical,
    sigma_sites,
    sigma_support,
    site_index,
    wire_logical_rep,
)

P = PauliOperator.from_str
T1, T2 = WireKind.TYPE_I, WireKind.TYPE_II


def test_site_index_examples():
    assert site_index(WireLayout(T1, 3), "Z", 1) == 1
    assert site_index(WireLayout(T1, 3), "X", 1) == 2
    assert site_index(WireLayout(T2, 3), "Y", 2) == 5
    lay = WireLayout(T1, 4)
    assert site_index(lay, "Z", 5) == 9 == lay.N
    with pytest.raises(ValueError):
        site_index(lay, "Y", 1)
    for kind in (T1, T2):
        lay = WireLayout(kind, 3)
        for s in range(1, lay.N + 1):
            role, t = lay.role_of(s)
            assert site_index(lay, role, t) == s


def test_chain_cluster_span_examples():
    assert chain_cluster_span(3).generators == (P("ZXZ"), P("IZX"))
    assert chain_cluster_span(2).generators == (P("ZX"),)
    for N in (2, 3, 5):
        plus = PauliSpan(N, tuple(PauliOperator.single(N, q, "X") for q in range(1, N)))
        assert conjugate_by_circuit(plus, chain_circuit(N)).generators == chain_cluster_span(N).generators


def test_sigma_support_examples():
    assert sigma_sites(WireLayout(T1, 3), "Z", 3) == [2, 4]
    assert sigma_sites(WireLayout(T1, 3), "X", 1) == [1]
    assert sorted(sigma_sites(WireLayout(T2, 3), "Y", 2)) == [1, 3, 4]
    op = sigma_support(WireLayout(T2, 2), "Y", 2)
    assert all(op.letter(q) in "IY" for q in range(op.n))
    with pytest.raises(ValueError):
        sigma_sites(WireLayout(T1, 2), "Y", 1)


def test_wire_logical_rep_examples():
    lay = WireLayout(T1, 3)
    assert wire_logical_rep(lay, "X", 1) == P("XZIIIII")
    assert wire_logical_rep(lay, "Z", 1) == P("ZIIIIII")


@pytest.mark.parametrize("kind", [T1, T2])
def test_wire_logical_rep_equivalent(kind):
    for D in (1, 2, 3):
        lay = WireLayout(kind, D)
        chain = chain_cluster_span(lay.N)
        letters = "XZ" if kind is T1 else "XYZ"
        for P_ in letters:
            for t in range(1, D + 1):
                rep = wire_logical_rep(lay, P_, t)
                assert chain.sign_of(rep * encoded_logical(lay.N, P_)) == 1


@pytest.mark.parametrize("kind", [T1, T2])
@pytest.mark.parametrize("D", [1, 2, 3, 4])
def test_teleportation_with_sigma_frames(kind, D):
    """Bare chain oracle: output = input after the Sigma frame, for all six eigenstates."""
    lay = WireLayout(kind, D)
    N = lay.N
    for L in "XYZ":
        for sign in (1, -1):
            for seed in range(10):
                rng = np.random.default_rng(seed)
                t = init_product([L + ("+" if sign == 1 else "-")] + ["X+"] * (N - 1))
                for a in range(N - 1):
                    t.apply_cz(a, a + 1)
                m = {q + 1: t.measure_single(q, lay.basis, rng=rng)[0] for q in range(N - 1)}
                fz = int(np.prod([m[s] for s in sigma_sites(lay, "Z", D + 1)]))
                fx = int(np.prod([m[s] for s in sigma_sites(lay, "X", D)]))
                frame = {"X": fx, "Z": fz, "Y": fx * fz}[L]
                assert t.expectation(PauliOperator.single(N, N - 1, L)) * frame == sign
