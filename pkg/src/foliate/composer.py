"""Pipelines of channels, terminal readouts and re-initializations.

All stages of a pipeline are glued into one global measured graph: the
output vertex of wire j after stage k becomes the input site of wire j in
stage k + 1.  Readouts assign a measurement basis to register vertices and
drop them from the register; re-initializations add fresh input vertices
with a known product state.  Frames, logical action and checks then come
from the relation solver of that single graph, and the simulation runs the
stages in order on one tableau so intermediate expectations can be probed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence, Union

from .codes import (
    CodeInstance,
    central_logicals,
    dislocation_rect,
    init_arbitrary_input,
    merged_rect,
    planar_surface,
)
from .foliation import ChannelSpec, ValidationError, assemble, output_code, validate
from .pauli import PauliOperator, PauliSpan, commuting_subgroup, intersection
from .relations import GraphSystem
from .sim import Tableau
from .verify import FrameReport, fix_input, initial_tableau, measurement_order

__all__ = [
    "TerminalReadout",
    "Reinit",
    "Pipeline",
    "ComposedGraph",
    "LogicalActionReport",
    "PipelineRun",
    "validate_composition",
    "compose",
    "run_pipeline",
    "logical_action",
    "identity_pipeline",
    "initialize_arbitrary",
    "surgery_parity",
    "phase_gate",
    "BUILTIN_PIPELINES",
]


@dataclass(frozen=True)
class TerminalReadout:
    """Single-qubit measurement of register qubits; "keep" leaves a qubit in the register."""

    bases: tuple[str, ...]
    name: str = ""

    def __post_init__(self) -> None:
        bases = tuple(b.upper() if b.lower() != "keep" else "keep" for b in self.bases)
        for b in bases:
            if b not in ("X", "Y", "Z", "keep"):
                raise ValueError(f"bad readout basis {b!r}")
        object.__setattr__(self, "bases", bases)

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def kept(self) -> list[int]:
        return [j for j, b in enumerate(self.bases) if b == "keep"]

    @property
    def measured(self) -> list[int]:
        return [j for j, b in enumerate(self.bases) if b != "keep"]


@dataclass(frozen=True)
class Reinit:
    """Grow the register to n qubits; listed positions are fresh, the rest keep their order."""

    n: int
    prep: tuple[tuple[int, str], ...]  # (position, "Z+" | "Z-" | "X+" | ...)
    name: str = ""

    @property
    def fresh(self) -> dict[int, str]:
        return dict(self.prep)


Stage = Union[ChannelSpec, TerminalReadout, Reinit]


def _prep_op(n: int, j: int, prep: str) -> PauliOperator:
    op = PauliOperator.single(n, j, prep[0])
    return -op if prep[1:] == "-" else op


def _readout_op(n: int, j: int, basis: str) -> PauliOperator:
    return PauliOperator.single(n, j, basis)


@dataclass
class Pipeline:
    """Stages with the input code and named logical operators at both ends.

    probes are (stage index, label, operator on the register after that
    stage); run_pipeline reports their inferred values against the tableau.
    """

    stages: list
    input_code: PauliSpan
    input_logicals: dict = field(default_factory=dict)
    output_logicals: dict = field(default_factory=dict)
    probes: list = field(default_factory=list)
    name: str = ""

    @property
    def n_in(self) -> int:
        return self.input_code.n


# ---------------------------------------------------------------------------
# composition checks


def _stage_n_in(stage: Stage) -> int | None:
    if isinstance(stage, ChannelSpec):
        return stage.n
    if isinstance(stage, TerminalReadout):
        return stage.n
    return None


def _after(stage: Stage, code: PauliSpan) -> PauliSpan:
    """Code known (up to signs) on the register after a stage."""
    if isinstance(stage, ChannelSpec):
        return output_code(stage)
    if isinstance(stage, TerminalReadout):
        n = stage.n
        meas = PauliSpan(n, tuple(_readout_op(n, j, stage.bases[j]) for j in stage.measured))
        post = commuting_subgroup(code, meas) + meas if meas.generators else code
        kept = stage.kept
        local = PauliSpan(n, tuple(PauliOperator.single(n, j, L) for j in kept for L in "XZ"))
        if not kept:
            return PauliSpan(0, ())
        inter = intersection(post, local) if post.generators else post
        return PauliSpan(len(kept), tuple(g.restrict(kept) for g in inter.generators)).basis()
    # Reinit
    fresh = stage.fresh
    old = [j for j in range(stage.n) if j not in fresh]
    gens = [g.embed(stage.n, old) for g in code.generators]
    gens += [_prep_op(stage.n, j, p) for j, p in sorted(fresh.items())]
    return PauliSpan(stage.n, tuple(gens))


def validate_composition(p: Pipeline) -> list[str]:
    """Diagnostics for every boundary whose next stage needs a stabilizer the
    previous one does not provide.  Empty list means the pipeline composes."""
    diags: list[str] = []
    code = p.input_code
    n = p.n_in
    for i, stage in enumerate(p.stages):
        label = f"stage {i + 1}" + (f" ({stage.name})" if getattr(stage, "name", "") else "")
        need = _stage_n_in(stage)
        if isinstance(stage, Reinit):
            if stage.n - len(stage.fresh) != n:
                diags.append(f"{label}: re-initialization expects {stage.n - len(stage.fresh)} carried qubits, register has {n}")
                return diags
        elif need != n:
            diags.append(f"{label}: expects {need} input qubits, register has {n}")
            return diags
        if isinstance(stage, ChannelSpec):
            try:
                validate(stage)
            except ValidationError as e:
                diags.extend(f"{label}: {d}" for d in e.diagnostics)
                return diags
            for g in stage.G_in.generators:
                if not code.contains(g):
                    diags.append(f"{label}: input stabilizer {g.sparse_str()} is not provided by the previous stage")
        code = _after(stage, code)
        n = code.n
    for name, op in p.output_logicals.items():
        if op.n != n:
            diags.append(f"output logical {name} lives on {op.n} qubits, final register has {n}")
    return diags


# ---------------------------------------------------------------------------
# global graph


@dataclass
class _StageInfo:
    kind: str
    start: int  # first vertex id created by this stage
    stop: int  # one past the last vertex id existing after this stage
    edges: list
    order: list
    register: list  # register vertex ids after the stage


class ComposedGraph:
    """One measured graph for a whole pipeline."""

    def __init__(self, p: Pipeline) -> None:
        diags = validate_composition(p)
        if diags:
            raise ValidationError(diags)
        self.pipeline = p
        n0 = p.n_in
        self.nv = n0
        self.edges: list[tuple[int, int]] = []
        self.bases: dict[int, str] = {}
        self.inputs: list[int] = list(range(n0))
        self.prep: dict[int, str] = {}
        self.stages: list[_StageInfo] = []
        self.graphs: list = []
        register = list(range(n0))
        for stage in p.stages:
            start = self.nv
            if isinstance(stage, ChannelSpec):
                g = assemble(stage)
                self.graphs.append(g)
                local = {}
                for j, v in enumerate(g.inputs):
                    local[v] = register[j]
                for vx in g.vertices:
                    if vx.id not in local:
                        local[vx.id] = self.nv
                        self.nv += 1
                edges = [(local[a], local[b]) for a, b in g.edges]
                self.edges.extend(edges)
                for v, b in g.basis.items():
                    self.bases[local[v]] = b
                order = [local[v] for v in measurement_order(g)]
                register = [local[v] for v in g.outputs]
                self.stages.append(_StageInfo("channel", start, self.nv, edges, order, register))
            elif isinstance(stage, TerminalReadout):
                self.graphs.append(None)
                order = []
                for j in stage.measured:
                    self.bases[register[j]] = stage.bases[j]
                    order.append(register[j])
                register = [register[j] for j in stage.kept]
                self.stages.append(_StageInfo("readout", start, self.nv, [], order, register))
            else:
                self.graphs.append(None)
                fresh = stage.fresh
                old = iter(register)
                new_reg = []
                for j in range(stage.n):
                    if j in fresh:
                        self.inputs.append(self.nv)
                        self.prep[self.nv] = fresh[j]
                        new_reg.append(self.nv)
                        self.nv += 1
                    else:
                        new_reg.append(next(old))
                register = new_reg
                self.stages.append(_StageInfo("reinit", start, self.nv, [], [], register))
        self.outputs = register

    # input spans ---------------------------------------------------------------
    def _input_span(self, first: PauliSpan, upto: int | None = None) -> PauliSpan:
        """first (on the initial register) plus the fresh preparations, on the inputs below upto."""
        inputs = [v for v in self.inputs if upto is None or v < upto]
        n0 = self.pipeline.n_in
        gens = [g.embed(len(inputs), list(range(n0))) for g in first.generators]
        for i, v in enumerate(inputs):
            if v in self.prep:
                gens.append(_prep_op(len(inputs), i, self.prep[v]))
        return PauliSpan(len(inputs), tuple(gens))

    def code_span(self, upto: int | None = None) -> PauliSpan:
        return self._input_span(self.pipeline.input_code, upto)

    def system_after(self, k: int) -> GraphSystem:
        """Graph system of stages 0..k with the register after stage k as outputs."""
        return self._system(k)

    def _system(self, k: int) -> GraphSystem:
        key = ("sys", k)
        if key not in self._cache:
            info = self.stages[k]
            stop = info.stop
            edges = [e for s in self.stages[: k + 1] for e in s.edges]
            inputs = [v for v in self.inputs if v < stop]
            outs = set(info.register)
            bases = {v: b for v, b in self.bases.items() if v < stop and v not in outs}
            measured_by_now = {v for s in self.stages[: k + 1] for v in s.order}
            bases = {v: b for v, b in bases.items() if v in measured_by_now}
            self._cache[key] = GraphSystem(stop, edges, inputs, bases, info.register)
        return self._cache[key]

    @cached_property
    def _cache(self) -> dict:
        return {}

    @cached_property
    def action(self) -> "LogicalActionReport":
        return _logical_action(self)

    @property
    def system(self) -> GraphSystem:
        return self._system(len(self.stages) - 1)


def compose(p: Pipeline) -> ComposedGraph:
    return ComposedGraph(p)


# ---------------------------------------------------------------------------
# running


@dataclass
class ProbeResult:
    stage: int
    label: str
    # physical register value implied by the transcript and the input signs,
    # before frame correction; a measured logical's outcome can differ by the frame
    inferred: int | None
    oracle: int  # tableau expectation right after the stage (0 if random)

    @property
    def ok(self) -> bool:
        return self.inferred is not None and self.inferred == self.oracle


@dataclass
class PipelineRun:
    """One seeded run.

    frames maps each output logical to (raw tableau value, frame, corrected
    = raw * frame, expected input value or None).  measured maps each
    measured input logical to (inferred value, fixed input value or None).
    """

    seed: int
    frames: dict
    measured: dict
    probes: list
    violations: list
    outcomes: dict
    tableau: Tableau

    @property
    def ok(self) -> bool:
        return not self.violations

    def frame_report(self) -> FrameReport:
        rep = FrameReport()
        for name, (raw, _, corr, _) in self.frames.items():
            rep.raw[name] = raw
            rep.corrected[name] = corr
        return rep


def _value(system: GraphSystem, span: PauliSpan, op: PauliOperator, outcomes) -> tuple[int | None, object]:
    """Predicted eigenvalue of an output operator (None if not determined)."""
    rel = system.solve_output(op.unsigned() if op.is_hermitian else op, span)
    if rel is None:
        return None, None
    s = span.sign_of(rel.inp)
    if s is None:
        return None, rel
    return s * rel.frame(outcomes), rel


def _embed_in(cg: "ComposedGraph", L: PauliOperator) -> PauliOperator:
    return L.embed(len(cg.inputs), list(range(cg.pipeline.n_in)))


def _code_sign(code: PauliSpan, L: PauliOperator, inp: PauliOperator) -> int:
    """Sign of the code element c with inp = L c, so that value(L) = value(inp) * sign."""
    s = code.sign_of(L * inp)
    if s is None:
        raise AssertionError("relation input differs from the logical by a non-code operator")
    return s


def run_pipeline(p: Pipeline, fixings: Sequence[tuple[PauliOperator, int]], seed: int,
                 graph: ComposedGraph | None = None) -> PipelineRun:
    """Simulate every stage in order and compare transcript inferences with the tableau."""
    from .sim import make_rng

    cg = graph or ComposedGraph(p)
    action = cg.action
    init0 = fix_input(p.input_code, fixings)
    full = cg._input_span(init0)
    code = cg.code_span()
    rng = make_rng(seed)
    T = initial_tableau(cg.nv, cg.inputs, full)
    outcomes: dict[int, int] = {}
    probes = []
    violations = []
    for k, info in enumerate(cg.stages):
        for a, b in info.edges:
            T.apply_cz(a, b)
        for v in info.order:
            m, _ = T.measure_single(v, cg.bases[v], None, rng)
            outcomes[v] = m
        for pk, label, op in p.probes:
            if pk != k:
                continue
            val, _ = _value(cg._system(k), cg._input_span(init0, info.stop), op, outcomes)
            oracle = T.expectation(op.embed(cg.nv, info.register))
            probes.append(ProbeResult(k, label, val, oracle))
            if val is None or val != oracle:
                violations.append(f"probe {label} after stage {k + 1}: inferred {val}, tableau {oracle}")
    system = cg.system
    frames = {}
    measured = {}
    for name, kind, tgt, _ in action.entries:
        L = _embed_in(cg, p.input_logicals[name])
        if kind == "maps" and tgt in p.output_logicals:
            N = p.output_logicals[tgt]
            rel = system.solve_output(N.unsigned(), code + PauliSpan(code.n, (L,)))
            if rel is None:
                violations.append(f"no relation carries {name} to {tgt}")
                continue
            raw = T.expectation(N.embed(cg.nv, cg.outputs))
            fr = rel.frame(outcomes) * _code_sign(code, L, rel.inp)
            expected = full.sign_of(L)
            frames[f"{name}->{tgt}"] = (raw, fr, raw * fr, expected)
            if expected is not None and raw * fr != expected:
                violations.append(f"{name} -> {tgt}: corrected {raw * fr}, input {expected}")
        elif kind == "measured":
            rel = system.solve_input(L.unsigned() if L.is_hermitian else L, code)
            if rel is None or not rel.out.is_identity:
                violations.append(f"measured {name} has no transcript relation")
                continue
            val = rel.frame(outcomes) * _code_sign(code, L, rel.inp)
            expected = full.sign_of(L)
            measured[name] = (val, expected)
            if expected is not None and val != expected:
                violations.append(f"measured {name}: inferred {val}, input {expected}")
    for rel in system.check_relations(code):
        s = code.sign_of(rel.inp)
        if s is not None and rel.frame(outcomes) != s:
            violations.append(f"check on {len(rel.support)} outcomes has parity -1")
    return PipelineRun(seed, frames, measured, probes, violations, outcomes, T)


# ---------------------------------------------------------------------------
# logical action


@dataclass
class LogicalActionReport:
    """entries: (input name, "maps" | "measured" | "lost", target, detail)."""

    entries: list
    measured_span: PauliSpan | None = None

    @property
    def mapping(self) -> dict:
        return {name: tgt for name, kind, tgt, _ in self.entries if kind == "maps"}

    @property
    def measured(self) -> list:
        return [name for name, kind, _, _ in self.entries if kind == "measured"]

    def lines(self) -> list[str]:
        out = []
        for name, kind, tgt, detail in self.entries:
            if kind == "maps":
                out.append(f"{name} -> {tgt}")
            elif kind == "measured":
                out.append(f"{name} measured")
            else:
                out.append(f"{name} lost ({detail})")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _match(op: PauliOperator, named: dict, stab: PauliSpan, prefer: str | None = None) -> str | None:
    """Name (or product of names) equal to op modulo stab, up to sign; prefer wins ties."""
    names = list(named)
    if prefer in named:
        names.remove(prefer)
        names.insert(0, prefer)
    for r in range(1, len(names) + 1):
        for combo in combinations(names, r):
            prod = op
            for nme in combo:
                prod = prod * named[nme]
            if stab.contains(prod):
                return "".join(combo)
    return None


def logical_action(p: Pipeline, graph: ComposedGraph | None = None) -> LogicalActionReport:
    """Symbolic map of each named input logical through the whole pipeline."""
    cg = graph or ComposedGraph(p)
    return cg.action


def _logical_action(cg: "ComposedGraph") -> LogicalActionReport:
    p = cg.pipeline
    system = cg.system
    code = cg.code_span()
    stab_out = PauliSpan(len(cg.outputs), tuple(r.out for r in system.output_stabilizer_relations(code)))
    ni = len(cg.inputs)
    measured = PauliSpan(ni, tuple(r.inp for r in system.check_relations(None) if not code.contains(r.inp)))
    entries = []
    for name, L in p.input_logicals.items():
        Lg = _embed_in(cg, L)
        if measured.generators and (measured + code).contains(Lg):
            entries.append((name, "measured", None, ""))
            continue
        rel = system.solve_input(Lg.unsigned() if Lg.is_hermitian else Lg, code)
        if rel is not None and not rel.out.is_identity:
            tgt = _match(rel.out, p.output_logicals, stab_out, prefer=name)
            entries.append((name, "maps", tgt or rel.out.sparse_str(), ""))
            continue
        if rel is not None:
            entries.append((name, "measured", None, ""))
            continue
        if not any(not m.commutes(Lg) for m in measured.generators):
            raise AssertionError(f"logical {name} is neither traceable nor measured")
        entries.append((name, "lost", None, "anticommutes with a measured operator"))
    return LogicalActionReport(entries, measured)


# ---------------------------------------------------------------------------
# built-in pipelines


def _identity_spec(code_span: PauliSpan, D: int, name: str, G_in: PauliSpan | None = None) -> ChannelSpec:
    return ChannelSpec(code_span.n, G_in or code_span, code_span.generators, D, name=name)


def identity_pipeline(d: int = 2, D: int = 2, repeats: int = 1) -> Pipeline:
    code = planar_surface(d)
    stab = code.stabilizers
    stages = [_identity_spec(stab, D, "identity") for _ in range(repeats)]
    return Pipeline(
        stages,
        stab,
        {"X": code.xbar, "Z": code.zbar},
        {"X": code.xbar, "Y": code.ybar(), "Z": code.zbar},
        name=f"identity_d{d}_D{D}" + (f"x{repeats}" if repeats > 1 else ""),
    )


def initialize_arbitrary(d: int = 3, D: int = 2) -> Pipeline:
    """Encode the centre qubit's state, then run an identity stage."""
    code = planar_surface(d)
    span, centre, _ = init_arbitrary_input(d)
    n = code.n
    stab = code.stabilizers
    xbar, zbar = central_logicals(d)
    enc = ChannelSpec(n, span, stab.generators, D, name="encode")
    ident = _identity_spec(stab, D, "identity")
    xc = PauliOperator.single(n, centre, "X")
    zc = PauliOperator.single(n, centre, "Z")
    ybar = (xbar * zbar).scaled(1)
    return Pipeline(
        [enc, ident],
        span,
        {"X": xc, "Z": zc, "Y": (xc * zc).scaled(1)},
        {"X": xbar, "Y": ybar, "Z": zbar},
        name=f"initialize_arbitrary_d{d}",
    )


def _two_patch(a: CodeInstance, b: CodeInstance, extra: int = 0) -> tuple[int, list[int], list[int]]:
    n = a.n + b.n + extra
    return n, list(range(a.n)), list(range(a.n, a.n + b.n))


def surgery_parity(d: int = 2, D: int = 2) -> Pipeline:
    """Merge two planar patches through a seam, read the seam out in X, split."""
    a = planar_surface(d)
    b = planar_surface(d)
    m = merged_rect(a, b)
    n = m.n
    ea, eb = list(range(a.n)), list(range(a.n, a.n + b.n))
    seam = m.meta["seam"]
    gin = [g.embed(n, ea) for g in a.stabilizers.generators]
    gin += [g.embed(n, eb) for g in b.stabilizers.generators]
    gin += [PauliOperator.single(n, q, "X") for q in seam]
    G_in = PauliSpan(n, tuple(gin))
    merge = ChannelSpec(n, G_in, m.stabilizers.generators, D, name="merge")
    readout = TerminalReadout(tuple("X" if q in seam else "keep" for q in range(n)), name="seam readout")
    n2 = a.n + b.n
    split_code = PauliSpan(
        n2,
        tuple(g.embed(n2, ea) for g in a.stabilizers.generators)
        + tuple(g.embed(n2, eb) for g in b.stabilizers.generators),
    )
    split = _identity_spec(split_code, D, "split")
    x1, z1 = a.xbar.embed(n, ea), a.zbar.embed(n, ea)
    x2, z2 = b.xbar.embed(n, eb), b.zbar.embed(n, eb)
    out = {
        "X1": a.xbar.embed(n2, ea),
        "Z1": a.zbar.embed(n2, ea),
        "X2": b.xbar.embed(n2, eb),
        "Z2": b.zbar.embed(n2, eb),
    }
    return Pipeline(
        [merge, readout, split],
        G_in,
        {"X1": x1, "Z1": z1, "X2": x2, "Z2": z2, "X1X2": x1 * x2, "Z1Z2": z1 * z2},
        out,
        probes=[(0, "Z1Z2", z1 * z2)],
        name=f"surgery_parity_d{d}",
    )


def _measure_channel(code: PauliSpan, P: PauliOperator, D: int, name: str, G_in: PauliSpan) -> ChannelSpec:
    """Channel measuring P together with every code stabilizer commuting with it."""
    keep = commuting_subgroup(code, PauliSpan(code.n, (P,)))
    return ChannelSpec(code.n, G_in, keep.generators + (P,), D, name=name)


def phase_gate(d: int = 3, D: int = 2) -> Pipeline:
    """Six stages: measure Ybar1 Xbar2, read out patch 1 in Z, re-initialize it,
    measure Xbar1 Xbar2, read out patch 2 transversally, then idle patch 1.

    Patch 1 is a planar code holding the data; patch 2 is the dislocation
    code prepared with Zbar2 = +1.  The logical map on patch 1 is X -> Y, Z -> Z.
    """
    a = planar_surface(d)
    b = dislocation_rect(d)
    n, ea, eb = _two_patch(a, b)
    both = PauliSpan(
        n,
        tuple(g.embed(n, ea) for g in a.stabilizers.generators)
        + tuple(g.embed(n, eb) for g in b.stabilizers.generators),
    )
    x1, z1 = a.xbar.embed(n, ea), a.zbar.embed(n, ea)
    y1 = (x1 * z1).scaled(1)
    x2, z2 = b.xbar.embed(n, eb), b.zbar.embed(n, eb)
    G_in = both + PauliSpan(n, (z2,))
    P = y1 * x2
    s1 = _measure_channel(both, P, D, "measure Y1X2", G_in)
    r1 = TerminalReadout(tuple("Z" if q in ea else "keep" for q in range(n)), name="read patch 1 in Z")
    re = Reinit(n, tuple((q, "Z+") for q in ea), name="re-initialize patch 1")
    fresh_in = PauliSpan(n, tuple(PauliOperator.single(n, q, "Z") for q in ea)) + PauliSpan(
        n, tuple(g.embed(n, eb) for g in b.stabilizers.generators)
    )
    s2 = _measure_channel(both, x1 * x2, D, "measure X1X2", fresh_in)
    # transversal Zbar2 readout: each qubit in the basis of its Zbar2 letter, Z elsewhere
    r2 = TerminalReadout(
        tuple("keep" if q in ea else (b.zbar.letter(q - a.n) if b.zbar.letter(q - a.n) != "I" else "Z") for q in range(n)),
        name="read patch 2",
    )
    s3 = _identity_spec(a.stabilizers, D, "idle patch 1")
    return Pipeline(
        [s1, r1, re, s2, r2, s3],
        G_in,
        {"X": x1, "Z": z1, "Y": y1},
        {"X": a.xbar, "Y": a.ybar(), "Z": a.zbar},
        probes=[(0, "Y1X2", P)],
        name=f"phase_gate_d{d}",
    )


BUILTIN_PIPELINES = {
    "identity": identity_pipeline,
    "initialize_arbitrary": initialize_arbitrary,
    "surgery_parity": surgery_parity,
    "phase_gate": phase_gate,
}
