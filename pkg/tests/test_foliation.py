import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foliate.codes import bacon_shor, merged_rect, planar_surface
from foliate.foliation import (
    ChannelSpec,
    Mode,
    ValidationError,
    assemble,
    boundary_check,
    bulk_check,
    channel_checks,
    correlation_operator,
    measured_inputs,
    measurement_basis,
    output_code,
    output_logicals,
    validate,
    xi_decomposition,
)
from foliate.pauli import PauliOperator, PauliSpan
from foliate.verify import eval_checks, fix_input, initial_tableau, run_channel
from foliate.wire import WireLayout, WireKind, sigma_sites

P = PauliOperator.from_str
S = PauliSpan.from_strs


def span_eq(a, b):
    return a.rank == b.rank == (a + b).rank


def single_wire(D=2, kind="TypeI"):
    return ChannelSpec(1, S(["Z"]), (P("Z"),), D, wire_kinds=(kind,))


def test_single_wire_assembly():
    g = assemble(single_wire())
    wires = [v for v in g.vertices if v.kind == "wire"]
    anc = [v for v in g.vertices if v.kind == "ancilla"]
    assert len(wires) == 5 and len(anc) == 2
    for t in (1, 2):
        a = g.ancilla(0, t)
        assert tuple(sorted((a, g.wire_vertex(0, "Z", t)))) in g.edges
        assert g.basis[a] == "X"
    assert all(b == "X" for b in g.basis.values())
    assert g.outputs == (4,)
    g.check_wellformed()


def test_yy_coupling():
    spec = ChannelSpec(2, S(["YY"]), (P("YY"),), 2)
    g = assemble(spec)
    a = g.ancilla(0, 1)
    nbrs = {b if x == a else x for x, b in g.edges if a in (x, b)}
    expected = {g.wire_vertex(j, r, 1) for j in (0, 1) for r in ("X", "Z")}
    assert nbrs == expected
    assert g.basis[a] == "X"


def test_measurement_basis_examples():
    assert measurement_basis(P("XXII")) == "X"
    assert measurement_basis(P("YY")) == "X"
    assert measurement_basis(P("ZZYX")) == "Y"


def test_validate_examples():
    with pytest.raises(ValidationError) as e:
        validate(ChannelSpec(2, S(["ZZ"]), (P("XI"), P("ZI")), 1))
    assert "XI" in str(e.value) and "ZI" in str(e.value)
    validate(ChannelSpec(2, S(["ZZ"]), (P("XX"), P("ZI")), 1, mode="Subsystem"))
    gg = bacon_shor(3)
    validate(ChannelSpec(9, gg.stabilizer(), gg.span.generators, 2, mode="Subsystem"))
    with pytest.raises(ValidationError):
        validate(ChannelSpec(2, S(["ZZ", "-ZZ"]), (P("ZZ"),), 1))
    with pytest.raises(ValidationError):
        validate(ChannelSpec(2, S(["ZZ"]), (P("ZZ"),), 0))


def test_output_code_examples():
    code = planar_surface(3)
    spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 2)
    assert span_eq(output_code(spec), code.stabilizers)
    spec = ChannelSpec(2, S(["ZZ"]), (P("XX"),), 2)
    assert span_eq(output_code(spec), S(["XX", "ZZ"]))


def test_surgery_merge_sets():
    a = planar_surface(2)
    m = merged_rect(a, a)
    n = m.n
    ea, eb = list(range(a.n)), list(range(a.n, 2 * a.n))
    G_in = PauliSpan(n, tuple(g.embed(n, ea) for g in a.stabilizers) + tuple(g.embed(n, eb) for g in a.stabilizers)
                     + tuple(PauliOperator.single(n, q, "X") for q in range(2 * a.n, n)))
    spec = ChannelSpec(n, G_in, m.stabilizers.generators, 2)
    zz = a.zbar.embed(n, ea) * a.zbar.embed(n, eb)
    assert m.stabilizers.contains(zz)
    assert span_eq(output_code(spec), m.stabilizers)
    assert (measured_inputs(spec) + G_in).contains(zz)
    xx = a.xbar.embed(n, ea) * a.xbar.embed(n, eb)
    assert (output_logicals(spec) + output_code(spec)).contains(xx)


def test_logical_sets_examples():
    code = planar_surface(3)
    spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 2)
    assert output_logicals(spec).rank == 2 and measured_inputs(spec).rank == 0
    # toy code ZZ on 2 qubits, Xbar = XX, Zbar = ZI; channel measures Xbar
    spec = ChannelSpec(2, S(["ZZ"]), (P("ZZ"), P("XX")), 2)
    assert measured_inputs(spec).contains(P("XX"))
    assert not (output_logicals(spec) + output_code(spec)).contains(P("ZI"))


def test_xi_examples():
    assert xi_decomposition(P("ZZI"), [P("ZZI"), P("IZZ")]) == [0]
    gens = [P("ZZI"), P("IZZ"), P("ZIZ")]
    w = xi_decomposition(P("ZIZ"), gens)
    assert w == [0, 1]
    prod = PauliSpan(3, tuple(gens)).product_of(w)
    assert prod.same_bits(P("ZIZ"))
    with pytest.raises(ValueError):
        xi_decomposition(P("XII"), gens)


def test_bulk_check_single_wire():
    g = assemble(single_wire(D=2))
    c = bulk_check(g, P("Z"), 2)
    assert c.support == {g.ancilla(0, 1), g.ancilla(0, 2), g.wire_vertex(0, "X", 1)}
    assert c.sign == 1


def test_boundary_check_examples():
    code = planar_surface(2)
    spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 2)
    g = assemble(spec)
    G = code.stabilizers.generators[0]
    c = boundary_check(g, G, 1)
    assert g.ancilla(0, 1) in c.support and c.sign == 1
    with pytest.raises(ValueError):
        boundary_check(g, code.xbar, 1)


def test_correlation_operator_single_wire():
    spec = single_wire(D=3)
    g = assemble(spec)
    R = correlation_operator(g, P("Z"))
    lay = WireLayout(WireKind.TYPE_I, 3)
    assert R.support == {g.site_vertex(0, s) for s in sigma_sites(lay, "Z", 4)}
    with pytest.raises(ValueError):
        correlation_operator(g, P("X"))


def test_correlation_frame_planar_x():
    code = planar_surface(2)
    spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 2)
    g = assemble(spec)
    R = correlation_operator(g, code.xbar)
    for s in (1, -1):
        init = fix_input(spec, [(code.xbar, s)])
        for seed in range(10):
            tr, T = run_channel(g, init, seed)
            out = T.expectation(code.xbar.embed(len(g.vertices), g.outputs))
            assert out * R.frame(tr.outcomes) == s


def _checks_are_stabilizers(spec, seeds=5):
    g = assemble(spec)
    g.check_wellformed()
    checks = channel_checks(g)
    init = fix_input(spec, [(op, 1) for op, _ in _pairs(spec.G_in)])
    T = initial_tableau(len(g.vertices), g.inputs, init)
    for a, b in g.edges:
        T.apply_cz(a, b)
    nv = len(g.vertices)
    for c in checks:
        assert c.resolved, c.label
        op = PauliOperator.from_sparse(nv, {v: g.basis[v] for v in c.support})
        assert T.expectation(op) == c.sign, c.label
    for seed in range(seeds):
        tr, _ = run_channel(g, init, seed)
        assert all(p == 1 for p in eval_checks(tr, checks))


def _pairs(G_in):
    from foliate.pauli import logical_pairs

    return [(z, x) for x, z in logical_pairs(G_in)]


def test_checks_are_stabilizers_planar():
    code = planar_surface(2)
    for kind in ("TypeI", "TypeII"):
        spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 3, wire_kinds=(kind,) * code.n)
        _checks_are_stabilizers(spec)


def test_compressed_ancilla_count():
    code = planar_surface(2)
    for D in (1, 2, 3):
        spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, D, mode=Mode.COMPRESSED)
        g = assemble(spec)
        assert len(g.ancillas) == 2 * D * len(spec.G_R)
        _checks_are_stabilizers(spec, seeds=3)


def test_v_edge_compatibility():
    G = S(["XZ", "ZX"])
    with_v = ChannelSpec(2, G, G.generators, 3)
    without = with_v.replace(v_edges=False)
    assert len(assemble(with_v).edges) == len(assemble(without).edges) + 3
    _checks_are_stabilizers(with_v)
    g = assemble(without)
    checks = channel_checks(g)
    init = fix_input(without, [])
    seen = {c.label: set() for c in checks}
    for seed in range(40):
        tr, _ = run_channel(g, init, seed)
        for c, p in zip(checks, eval_checks(tr, checks)):
            seen[c.label].add(p)
    assert any(len(v) == 2 for v in seen.values())


@st.composite
def small_specs(draw):
    """Random commuting channel codes on n <= 3 wires, with matching inputs."""
    n = draw(st.integers(1, 3))
    D = draw(st.integers(1, 3))
    gens = []
    for _ in range(draw(st.integers(1, 3))):
        x = draw(st.integers(0, 2 ** n - 1))
        z = draw(st.integers(0, 2 ** n - 1))
        p = PauliOperator(n, x, z, bin(x & z).count("1"))
        if p.is_identity or not all(p.commutes(q) for q in gens):
            continue
        if PauliSpan(n, tuple(gens)).contains(p):
            continue
        gens.append(p)
    kinds = tuple(draw(st.sampled_from(["TypeI", "TypeII"])) for _ in range(n))
    return ChannelSpec(n, PauliSpan(n, tuple(gens)), tuple(gens), D, wire_kinds=kinds)


@settings(max_examples=40, deadline=None)
@given(small_specs())
def test_random_specs_wellformed_and_checks_hold(spec):
    try:
        validate(spec)
    except ValidationError:
        return
    g = assemble(spec)
    g.check_wellformed()
    for v in g.vertices:
        if v.kind == "ancilla" and v.id in g.basis:
            G = spec.G_R[v.generator]
            toggles = sum(1 for j in G.support if G.letter(j) == "Y" and spec.wire_kinds[j] is WireKind.TYPE_II)
            expected = measurement_basis(G)
            if toggles % 2:
                expected = "Y" if expected == "X" else "X"
            assert g.basis[v.id] == expected
    _checks_are_stabilizers(spec, seeds=3)
