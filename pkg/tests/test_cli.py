import json

import pydot
import pytest
from click.testing import CliRunner
from hypothesis import given, settings
from hypothesis import strategies as st

from foliate.cli import export_dot, export_text, main
from foliate.codes import planar_surface
from foliate.foliation import ChannelSpec, assemble, channel_checks
from foliate.pauli import PauliOperator, PauliSpan
from foliate.specfile import SpecError, SpecFile, emit_spec, from_channel, normalize, parse_spec, parse_spec_file

IDENTITY_D2 = emit_spec(from_channel(ChannelSpec(
    5, planar_surface(2).stabilizers, planar_surface(2).stabilizers.generators, 2, name="identity_planar_2")))


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, text, name="spec.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# spec-file round trip ------------------------------------------------------


def pauli_str(n):
    return st.tuples(st.sampled_from(["+", "-"]), st.text("IXYZ", min_size=n, max_size=n)).map(
        lambda t: str(PauliOperator.from_str("".join(t))))


@st.composite
def spec_files(draw):
    if draw(st.booleans()):
        name = draw(st.sampled_from(["identity", "surgery_parity", "phase_gate"]))
        args = tuple(draw(st.lists(st.tuples(st.sampled_from(["d", "D"]), st.integers(1, 9)), max_size=2,
                                   unique_by=lambda kv: kv[0])))
        fix = tuple(draw(st.lists(st.tuples(st.sampled_from(["X", "Z", "Z1Z2"]), st.sampled_from(["+1", "-1"])).map("=".join), max_size=2)))
        return SpecFile(name=draw(st.sampled_from(["", "p"])), pipeline=(name, args), fixings=fix)
    n = draw(st.integers(1, 4))
    gens = draw(st.lists(st.tuples(pauli_str(n), st.lists(st.integers(0, n - 1), unique=True, max_size=n)
                                   .map(lambda xs: tuple(sorted(xs)))), max_size=3))
    return SpecFile(
        name=draw(st.sampled_from(["", "a", "identity_x"])),
        qubits=n,
        D=draw(st.integers(1, 5)),
        mode=draw(st.sampled_from(["Standard", "Compressed", "Subsystem"])),
        wire_kinds=tuple(draw(st.lists(st.sampled_from(["TypeI", "TypeII"]), min_size=n, max_size=n))),
        input_code=tuple(draw(st.lists(pauli_str(n), max_size=3))),
        channel_generators=tuple(gens),
        fixings=tuple(draw(st.lists(pauli_str(n), max_size=2))),
    )


@settings(max_examples=200, deadline=None)
@given(spec_files())
def test_parse_emit_round_trip(sf):
    text = emit_spec(sf)
    assert parse_spec_file(text) == sf
    assert normalize(text) == text


@settings(max_examples=100, deadline=None)
@given(spec_files(), st.sampled_from(["  ", "\t"]), st.booleans())
def test_normalize_absorbs_layout(sf, pad, comments):
    lines = []
    for line in emit_spec(sf).splitlines():
        if line.startswith("  - "):
            line = pad + "-   " + line[4:] + "   "
        if comments:
            line += "  # note"
        lines.append(line)
        if comments:
            lines.append("")
    text = "\n".join(lines)
    assert normalize(text) == emit_spec(sf)


def test_unknown_key_reports_line_and_column():
    text = "foliate/1\nqubits: 1\nD: 1\nbogus: 3\n"
    with pytest.raises(SpecError) as e:
        parse_spec_file(text)
    assert "line 4, col 1: unknown key 'bogus'" in str(e.value)


def test_bad_pauli_reports_item_column():
    text = "foliate/1\nqubits: 2\nD: 1\ninput_code:\n  - ZQ\n"
    with pytest.raises(SpecError) as e:
        parse_spec_file(text)
    assert str(e.value).startswith("line 5, col 5:")


def test_missing_header_and_duplicates():
    with pytest.raises(SpecError):
        parse_spec_file("qubits: 1\n")
    with pytest.raises(SpecError) as e:
        parse_spec_file("foliate/1\nqubits: 1\nqubits: 2\nD: 1\n")
    assert "duplicate" in str(e.value)


def test_validation_names_generators():
    text = "foliate/1\nqubits: 2\nD: 1\ninput_code:\n  - ZZ\nchannel_generators:\n  - XI\n  - ZI\n"
    with pytest.raises(SpecError) as e:
        parse_spec(text)
    msg = str(e.value)
    assert msg.startswith("validation:") and "XI" in msg and "ZI" in msg


def test_lifts_and_pipelines_compile():
    text = "foliate/1\nqubits: 2\nD: 2\ninput_code:\n  - ZZ\nchannel_generators:\n  - ZZ lift=1\n"
    spec = parse_spec(text)
    assert spec.lift_targets == (frozenset({1}),)
    p = parse_spec("foliate/1\npipeline: identity d=2 D=1\n")
    assert p.n_in == 5
    with pytest.raises(SpecError):
        parse_spec("foliate/1\npipeline: identity q=2\n")
    with pytest.raises(SpecError):
        parse_spec("foliate/1\npipeline: nosuch\n")


# exports -------------------------------------------------------------------


def test_single_wire_export():
    spec = ChannelSpec(1, PauliSpan(1, ()), (), 1)
    g = assemble(spec)
    text = export_text(g)
    assert sum(1 for line in text.splitlines() if "kind=wire" in line) == 3
    assert "outputs: 2" in text


def test_text_export_lists_checks():
    g = assemble(parse_spec(IDENTITY_D2))
    checks = channel_checks(g)
    text = export_text(g, checks)
    lines = [line for line in text.split("checks:\n")[1].splitlines() if line.strip()]
    assert len(lines) == len(checks)
    for line, c in zip(lines, checks):
        support = line.split("support=")[1]
        assert set(map(int, support.split(","))) == c.support


def test_dot_export_parses():
    g = assemble(parse_spec(IDENTITY_D2))
    graphs = pydot.graph_from_dot_data(export_dot(g))
    assert graphs
    dg = graphs[0]
    assert len(dg.get_nodes()) >= len(g.vertices)
    assert len(dg.get_edges()) == len(g.edges)


# commands ------------------------------------------------------------------


def test_build(runner, tmp_path):
    path = write(tmp_path, IDENTITY_D2)
    r = runner.invoke(main, ["build", path])
    assert r.exit_code == 0 and r.output.startswith("foliate/1 graph")
    r = runner.invoke(main, ["build", path, "--format", "dot"])
    assert r.exit_code == 0 and pydot.graph_from_dot_data(r.output)
    r = runner.invoke(main, ["build", path, "--mode-override", "Compressed"])
    assert r.exit_code == 0


def test_verify_exit_codes(runner, tmp_path):
    path = write(tmp_path, IDENTITY_D2)
    r = runner.invoke(main, ["verify", path, "--trials", "5"])
    assert r.exit_code == 0, r.output
    assert "violations: 0" in r.output
    r = runner.invoke(main, ["verify", path, "--trials", "3", "--format", "json"])
    assert r.exit_code == 0
    assert json.loads(r.output)
    bad = write(tmp_path, "foliate/1\nqubits: 1\nD: x\n", "bad.txt")
    r = runner.invoke(main, ["verify", bad])
    assert r.exit_code == 2
    r = runner.invoke(main, ["verify", str(tmp_path / "missing.txt")])
    assert r.exit_code != 0


def test_verify_is_byte_identical(runner, tmp_path):
    path = write(tmp_path, IDENTITY_D2)
    a = runner.invoke(main, ["verify", path, "--trials", "4", "--seed", "9"]).output
    b = runner.invoke(main, ["verify", path, "--trials", "4", "--seed", "9"]).output
    assert a == b


def test_inject(runner, tmp_path):
    path = write(tmp_path, IDENTITY_D2)
    r = runner.invoke(main, ["inject", path, "--scan"])
    assert r.exit_code == 0, r.output
    r = runner.invoke(main, ["inject", path, "--error", "6:Z"])
    assert r.exit_code in (0, 1)
    r = runner.invoke(main, ["inject", path, "--error", "nonsense"])
    assert r.exit_code == 2


def test_compose(runner, tmp_path):
    path = write(tmp_path, "foliate/1\npipeline: surgery_parity d=2 D=2\n")
    r = runner.invoke(main, ["compose", path, "--trials", "2", "--fix", "Z1=+1", "--fix", "Z2=-1"])
    assert r.exit_code == 0, r.output
    assert "Z1Z2 measured" in r.output
    r = runner.invoke(main, ["compose", path, "--trials", "1", "--fix", "Q=+1"])
    assert r.exit_code == 2
    r = runner.invoke(main, ["compose", write(tmp_path, IDENTITY_D2, "chan.txt")])
    assert r.exit_code == 2


@pytest.mark.parametrize("code", ["planar", "rect", "twisted", "twisted_lifted", "dislocation", "bacon_shor", "identity"])
def test_codes_emit_round_trips_through_verify(runner, tmp_path, code):
    r = runner.invoke(main, ["codes-emit", code, "--d", "3" if code != "rect" else "2"])
    assert r.exit_code == 0, r.output
    assert normalize(r.output) == r.output
    path = write(tmp_path, r.output)
    if code == "identity":
        r = runner.invoke(main, ["compose", path, "--trials", "1"])
    else:
        r = runner.invoke(main, ["verify", path, "--trials", "2"])
    assert r.exit_code == 0, r.output


def test_codes_emit_unknown(runner):
    r = runner.invoke(main, ["codes-emit", "nosuch"])
    assert r.exit_code == 2
