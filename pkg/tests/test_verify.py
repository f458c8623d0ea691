import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foliate.codes import bacon_shor, merged_rect, planar_surface
from foliate.foliation import ChannelSpec, Mode, assemble, channel_checks, output_code
from foliate.pauli import PauliOperator, PauliSpan
from foliate.verify import (
    ErrorClass,
    error_scan,
    eval_checks,
    fix_input,
    inject_and_syndrome,
    measurement_order,
    run_channel,
    verify_output,
)
from oracles import purified_output_group, random_abelian

P = PauliOperator.from_str


def identity_spec(code, D=2, **kw):
    return ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, D, **kw)


def test_fix_input_examples():
    code = planar_surface(3)
    assert fix_input(code.stabilizers, [(code.zbar, 1)]).rank == 13
    with pytest.raises(ValueError):
        fix_input(code.stabilizers, [(code.zbar, 1), (code.xbar, 1)])
    full = PauliSpan.from_strs(["ZZ", "XX"])
    assert fix_input(full, []).rank == 2
    with pytest.raises(ValueError):
        fix_input(code.stabilizers, [])


def test_run_channel_single_wire():
    spec = ChannelSpec(1, PauliSpan(1, ()), (), 1)
    g = assemble(spec)
    init = fix_input(spec, [(P("Z"), 1)])
    _, T = run_channel(g, init, forced_plus=True)
    assert T.expectation(P("Z").embed(T.n, g.outputs)) == 1
    from foliate.foliation import correlation_operator

    R = correlation_operator(g, P("Z"))
    for seed in range(10):
        tr, T = run_channel(g, init, seed)
        assert T.expectation(P("Z").embed(T.n, g.outputs)) == R.frame(tr.outcomes)


def test_identity_output_is_pure():
    code = planar_surface(2)
    spec = identity_spec(code)
    g = assemble(spec)
    _, T = run_channel(g, fix_input(spec, [(code.zbar, 1)]), 3)
    assert len(T.reduced_stabilizers(list(g.outputs))) == code.n


def test_eval_checks_examples():
    code = planar_surface(2)
    g = assemble(identity_spec(code))
    checks = channel_checks(g)
    tr, _ = run_channel(g, fix_input(g.spec, [(code.xbar, 1)]), 0)
    assert all(p == 1 for p in eval_checks(tr, checks))
    assert eval_checks(tr, []) == []
    # sigma^Z on a wire X-site flips exactly the checks containing it
    v = g.wire_vertex(0, "X", 1)
    tr_e, flipped = inject_and_syndrome(g, [(v, "Z")], 0, checks, fix_input(g.spec, [(code.xbar, 1)]))
    assert {c.label for c in flipped} == {c.label for c in checks if v in c.support}


def test_verify_identity_all_fixings():
    code = planar_surface(2)
    spec = identity_spec(code)
    for op in (code.xbar, code.zbar, code.ybar()):
        for s in (1, -1):
            rep = verify_output(spec, [(op, s)], range(30))
            assert rep.ok, rep.violations[:3]


def test_verify_surgery_merge_parity():
    a = planar_surface(2)
    m = merged_rect(a, a)
    n = m.n
    ea, eb = list(range(a.n)), list(range(a.n, 2 * a.n))
    G_in = PauliSpan(n, tuple(g.embed(n, ea) for g in a.stabilizers) + tuple(g.embed(n, eb) for g in a.stabilizers)
                     + tuple(PauliOperator.single(n, q, "X") for q in range(2 * a.n, n)))
    spec = ChannelSpec(n, G_in, m.stabilizers.generators, 2)
    z1, z2 = a.zbar.embed(n, ea), a.zbar.embed(n, eb)
    rep = verify_output(spec, [(z1, 1), (z2, -1)], range(20))
    assert rep.ok, rep.violations[:3]
    vals = [v for vs in rep.measured.values() for v in vs]
    assert vals and all(v == -1 for v in vals)


def test_corrupted_check_is_reported():
    code = planar_surface(2)
    spec = identity_spec(code)
    g = assemble(spec)
    checks = channel_checks(g)
    bad = dataclasses.replace(checks[0], support=checks[0].support ^ {g.wire_vertex(0, "X", 1)})
    rep = verify_output(spec, [(code.zbar, 1)], range(10), g, [bad] + checks[1:])
    assert not rep.ok


def test_inject_examples():
    code = planar_surface(3)
    spec = identity_spec(code, D=3)
    g = assemble(spec)
    checks = channel_checks(g)
    init = fix_input(spec, [(code.zbar, 1)])
    _, flipped = inject_and_syndrome(g, [], 0, checks, init)
    assert flipped == []
    _, flipped = inject_and_syndrome(g, [(g.wire_vertex(6, "X", 2), "Z")], 0, checks, init)
    assert flipped
    _, flipped = inject_and_syndrome(g, [(g.wire_vertex(6, "X", 2), "X")], 0, checks, init)
    assert flipped == []
    with pytest.raises(ValueError):
        inject_and_syndrome(g, [(g.outputs[0], "Z")], 0, checks, init)


def test_determinism_and_order_invariance():
    code = planar_surface(2)
    spec = identity_spec(code, D=3)
    g = assemble(spec)
    checks = channel_checks(g)
    init = fix_input(spec, [(code.xbar, -1)])
    a, _ = run_channel(g, init, 11)
    b, _ = run_channel(g, init, 11)
    assert a.outcomes == b.outcomes
    order = list(reversed(measurement_order(g)))
    for seed in range(5):
        tr, T = run_channel(g, init, seed, order=order)
        assert all(p == 1 for p in eval_checks(tr, checks))
    r1 = verify_output(spec, [(code.xbar, -1)], range(5), g, checks)
    r2 = verify_output(spec, [(code.xbar, -1)], range(5), g, checks)
    assert r1 == r2


def test_error_scan_planar2():
    code = planar_surface(2)
    g = assemble(identity_spec(code))
    rep = error_scan(g, [(code.zbar, 1)])
    assert rep.counts[ErrorClass.HARMFUL] == 0
    assert rep.counts[ErrorClass.DETECTED] > 0 and rep.counts[ErrorClass.HARMLESS] > 0


def test_subsystem_and_compressed_verify():
    gg = bacon_shor(3)
    stab = gg.stabilizer()
    xx = [p for p in gg.span.generators if p.zbits == 0]
    zs = [p for p in stab.generators if p.xbits == 0]
    spec = ChannelSpec(9, PauliSpan(9, tuple(xx + zs)), gg.span.generators, 2, mode=Mode.SUBSYSTEM)
    (xb, zb), = gg.logical_pairs()
    rep = verify_output(spec, [(zb, -1)], range(10))
    assert rep.ok, rep.violations[:3]
    code = planar_surface(2)
    rep = verify_output(identity_spec(code, mode=Mode.COMPRESSED), [(code.xbar, 1)], range(10))
    assert rep.ok, rep.violations[:3]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_output_code_matches_purified_simulation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    D = int(rng.integers(1, 4))
    G_in = random_abelian(n, int(rng.integers(0, n + 1)), rng)
    G_ch = random_abelian(n, int(rng.integers(1, n + 1)), rng)
    kinds = tuple(str(rng.choice(["TypeI", "TypeII"])) for _ in range(n))
    spec = ChannelSpec(n, G_in, G_ch.generators, D, wire_kinds=kinds)
    sim = purified_output_group(spec, seed)
    oc = output_code(spec)
    assert sim.rank == oc.rank == (sim + oc).rank


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_verify_random_pairs(seed):
    from foliate.verify import random_fixings

    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    G_in = random_abelian(n, int(rng.integers(0, n + 1)), rng)
    G_ch = random_abelian(n, int(rng.integers(1, n + 1)), rng)
    spec = ChannelSpec(n, G_in, G_ch.generators, int(rng.integers(1, 4)))
    rep = verify_output(spec, random_fixings(G_in, rng), range(3))
    assert rep.ok, rep.violations[:3]
