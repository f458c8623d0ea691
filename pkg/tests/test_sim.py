import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dense import dense, gate_matrix, stabilizer_state
from foliate.pauli import PauliOperator
from foliate.sim import apply_cz, expectation, init_product, measure_pauli
from foliate.wire import chain_cluster_span

P = PauliOperator.from_str


def test_init_product_examples():
    assert init_product(["X+"] * 3).stabilizers() == [P("XII"), P("IXI"), P("IIX")]
    assert init_product(["Z-"]).stabilizers() == [P("-Z")]
    assert init_product(["X+", "Y-", "Z+"]).stabilizers() == [P("XII"), P("-IYI"), P("IIZ")]


def test_cz_examples():
    t = apply_cz(init_product(["X+", "X+"]), 0, 1)
    assert t.stabilizers() == [P("XZ"), P("ZX")]
    assert expectation(t, P("XZ")) == 1
    assert apply_cz(t, 0, 1).stabilizers() == [P("XI"), P("IX")]
    chain = init_product(["X+"] * 4)
    for a in range(3):
        chain.apply_cz(a, a + 1)
    expected = [P("XZII"), P("ZXZI"), P("IZXZ"), P("IIZX")]
    assert chain.stabilizers() == expected
    assert chain_cluster_span(4).generators == tuple(expected[1:])


def test_measure_examples():
    t = init_product(["X+"])
    assert measure_pauli(t, P("X"), rng_seed=0)[:2] == (1, True)
    out, det, _ = measure_pauli(t, P("Z"), forced=-1)
    assert (out, det) == (-1, False)
    with pytest.raises(ValueError):
        measure_pauli(init_product(["Z+"]), P("Z"), forced=-1)
    assert expectation(t, P("Z")) == 0
    assert expectation(init_product(["Z-"]), P("-Z")) == 1


def test_chain_x_logical_from_outcomes():
    # X ~ x1 Z2: the X1 outcome times the Z2 outcome reproduces the input X eigenvalue
    for sign in (1, -1):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            t = init_product(["X+" if sign == 1 else "X-", "X+", "X+"])
            t.apply_cz(0, 1).apply_cz(1, 2)
            m1, _ = t.measure_single(0, "X", rng=rng)
            m2, _ = t.measure_single(1, "Z", rng=rng)
            assert m1 * m2 == sign


def test_repeat_measurement_deterministic():
    t = init_product(["X+", "Z+"])
    rng = np.random.default_rng(3)
    a, det1 = t.measure(P("ZX"), rng=rng)
    b, det2 = t.measure(P("ZX"), rng=rng)
    assert a == b and not det1 and det2


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 3))
    bases = draw(st.lists(st.sampled_from(["X+", "X-", "Y+", "Y-", "Z+", "Z-"]), min_size=n, max_size=n))
    ops = []
    for _ in range(draw(st.integers(0, 8))):
        kind = draw(st.sampled_from(["H", "S", "CZ"] if n > 1 else ["H", "S"]))
        if kind == "CZ":
            a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            ops.append(("CZ", a, b))
        else:
            ops.append((kind, draw(st.integers(0, n - 1))))
    return n, bases, ops


def _run(n, bases, ops):
    t = init_product(bases)
    for g in ops:
        {"CZ": lambda: t.apply_cz(g[1], g[2]), "H": lambda: t.apply_h(g[1]), "S": lambda: t.apply_s(g[1])}[g[0]]()
    psi = stabilizer_state([PauliOperator.from_sparse(n, {q: b[0]}, sign=1 if b[1] == "+" else -1) for q, b in enumerate(bases)])
    for g in ops:
        psi = gate_matrix(n, g) @ psi
    return t, psi


@settings(max_examples=150, deadline=None)
@given(circuits(), st.data())
def test_tableau_matches_statevector(circ, data):
    n, bases, ops = circ
    t, psi = _run(n, bases, ops)
    t.check_invariants()
    for _ in range(4):
        x = data.draw(st.integers(0, 2 ** n - 1))
        z = data.draw(st.integers(0, 2 ** n - 1))
        p = PauliOperator(n, x, z, bin(x & z).count("1"))
        ev = np.real(np.vdot(psi, dense(p) @ psi))
        e = t.expectation(p)
        if e == 0:
            assert abs(ev) < 1e-9
        else:
            assert abs(ev - e) < 1e-9


def test_outcome_statistics_match_statevector():
    # Born probabilities of a random-outcome measurement are 1/2; check within 3 sigma
    rng = np.random.default_rng(7)
    n, bases, ops = 3, ["X+", "Y-", "Z+"], [("CZ", 0, 1), ("H", 2), ("CZ", 1, 2), ("S", 0)]
    t0, psi = _run(n, bases, ops)
    p = P("ZXY")
    ev = np.real(np.vdot(psi, dense(p) @ psi))
    prob_plus = (1 + ev) / 2
    trials = 2000
    plus = sum(t0.copy().measure(p, rng=rng)[0] == 1 for _ in range(trials))
    sigma = np.sqrt(trials * prob_plus * (1 - prob_plus)) or 1
    assert abs(plus - trials * prob_plus) <= 3 * sigma
