"""Simulation harness: runs resource graphs on the tableau oracle, evaluates
checks, reads byproduct frames and classifies injected errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .foliation import (
    ChannelSpec,
    CheckOperator,
    Mode,
    ResourceGraph,
    assemble,
    channel_checks,
    measured_inputs,
    output_code,
    output_logicals,
)
from .pauli import PauliOperator, PauliSpan, logical_pairs
from .relations import GraphSystem, Relation
from .sim import Tableau, make_rng

__all__ = [
    "Transcript",
    "FrameReport",
    "VerifyReport",
    "ErrorClass",
    "fix_input",
    "random_fixings",
    "initial_tableau",
    "run_system",
    "run_channel",
    "eval_checks",
    "verify_output",
    "inject_and_syndrome",
    "classify_error",
    "error_scan",
]


@dataclass
class Transcript:
    outcomes: dict[int, int]
    order: list[int]
    seed: int | None = None

    def product(self, support: Iterable[int]) -> int:
        s = 1
        for v in support:
            s *= self.outcomes[v]
        return s


@dataclass
class FrameReport:
    """Frame-corrected signs of output operators, keyed by a label."""

    raw: dict[str, int] = field(default_factory=dict)
    corrected: dict[str, int] = field(default_factory=dict)


@dataclass
class VerifyReport:
    trials: int = 0
    checks: int = 0
    violations: list[str] = field(default_factory=list)
    measured: dict[str, list[int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# inputs


def fix_input(spec_or_span: ChannelSpec | PauliSpan, fixings: Sequence[tuple[PauliOperator, int]]) -> PauliSpan:
    """G_in extended by signed logical representatives; must be full rank."""
    G_in = spec_or_span.G_in if isinstance(spec_or_span, ChannelSpec) else spec_or_span
    gens = list(G_in.generators)
    for op, s in fixings:
        if s not in (1, -1):
            raise ValueError("fixing values must be +1 or -1")
        base = op.unsigned() if op.is_hermitian else op.scaled(3).unsigned()
        gens.append(base if s == 1 else -base)
    span = PauliSpan(G_in.n, tuple(gens))
    if not span.is_abelian:
        raise ValueError("fixings anticommute with each other or with the input code")
    span.check_consistent()
    if span.rank != G_in.n:
        raise ValueError(f"input span has rank {span.rank}, need {G_in.n}; add fixings")
    return span.basis()


def random_fixings(G_in: PauliSpan, rng: np.random.Generator) -> list[tuple[PauliOperator, int]]:
    """One random member of each logical pair with a random sign."""
    out = []
    for xb, zb in logical_pairs(G_in):
        op = xb if rng.integers(2) else zb
        out.append((op, 1 if rng.integers(2) else -1))
    return out


def _spread(bits: int, positions: Sequence[int]) -> int:
    out = 0
    for i, p in enumerate(positions):
        if bits >> i & 1:
            out |= 1 << p
    return out


def initial_tableau(nv: int, inputs: Sequence[int], initial: PauliSpan | None,
                    prep: Mapping[int, str] | None = None) -> Tableau:
    """Input state on the input vertices, |+> (or prep[v]) everywhere else."""
    prep = dict(prep or {})
    sub = Tableau.from_stabilizers(list(initial.generators)) if inputs else None
    sx, sz, sk, dx, dz = [], [], [], [], []
    inset = set(inputs)
    if sub is not None:
        for i in range(len(inputs)):
            sx.append(_spread(sub.sx[i], inputs))
            sz.append(_spread(sub.sz[i], inputs))
            sk.append(sub.sk[i])
            dx.append(_spread(sub.dx[i], inputs))
            dz.append(_spread(sub.dz[i], inputs))
    for v in range(nv):
        if v in inset:
            continue
        b = prep.get(v, "X+")
        letter, sgn = b[0], b[1:] or "+"
        x = 1 if letter in "XY" else 0
        z = 1 if letter in "YZ" else 0
        sx.append(x << v)
        sz.append(z << v)
        sk.append((x & z) + (2 if sgn == "-" else 0))
        dx.append((0 if x else 1) << v)
        dz.append((1 if x else 0) << v)
    return Tableau(nv, sx, sz, sk, dx, dz)


# ---------------------------------------------------------------------------
# running


def measurement_order(graph: ResourceGraph) -> list[int]:
    """Wire sites by increasing interval, then that interval's ancillas."""
    verts = graph.vertices
    return sorted(graph.basis, key=lambda v: (verts[v].t, verts[v].kind == "ancilla", v))


def run_system(system: GraphSystem, initial: PauliSpan, seed, order: Sequence[int] | None = None,
               errors: Sequence[tuple[int, str]] = (), forced_plus: bool = False,
               tableau: Tableau | None = None) -> tuple[Transcript, Tableau]:
    """Prepare, entangle, inject errors and measure every non-output vertex."""
    rng = make_rng(seed)
    T = tableau if tableau is not None else initial_tableau(system.nv, system.inputs, initial)
    for a, b in system.edges:
        T.apply_cz(a, b)
    for v, letter in errors:
        if v in system.outputs:
            raise ValueError(f"error on output vertex {v} is undetectable by construction")
        T.apply_pauli(PauliOperator.single(system.nv, v, letter))
    order = list(order) if order is not None else list(system.measured)
    outcomes = {}
    for v in order:
        forced = None
        if forced_plus:
            p = PauliOperator.single(system.nv, v, system.bases[v])
            forced = T.expectation(p) or 1
        m, _ = T.measure_single(v, system.bases[v], forced, rng)
        outcomes[v] = m
    return Transcript(outcomes, order, seed if isinstance(seed, int) else None), T


def run_channel(graph: ResourceGraph, initial: PauliSpan, seed=None, forced_plus: bool = False,
                errors: Sequence[tuple[int, str]] = (), order: Sequence[int] | None = None
                ) -> tuple[Transcript, Tableau]:
    """Returns the transcript and the full post-measurement tableau."""
    return run_system(graph.system, initial, seed, order or measurement_order(graph), errors, forced_plus)


def output_expectation(T: Tableau, outputs: Sequence[int], op: PauliOperator) -> int:
    return T.expectation(op.embed(T.n, outputs))


def eval_checks(transcript: Transcript, checks: Sequence[CheckOperator]) -> list[int]:
    out = []
    for c in checks:
        missing = [v for v in c.support if v not in transcript.outcomes]
        if missing:
            raise KeyError(f"check {c.label} refers to unmeasured vertices {missing}")
        out.append(c.parity(transcript.outcomes))
    return out


# ---------------------------------------------------------------------------
# output-code and check verification


def _span_equal(a: PauliSpan, b: PauliSpan) -> bool:
    return a.rank == b.rank == (a + b).rank


def verify_output(spec: ChannelSpec, fixings: Sequence[tuple[PauliOperator, int]], seeds: Iterable[int],
                  graph: ResourceGraph | None = None, checks: Sequence[CheckOperator] | None = None
                  ) -> VerifyReport:
    graph = graph or assemble(spec)
    system = graph.system
    checks = list(checks) if checks is not None else channel_checks(graph)
    init = fix_input(spec, fixings)
    rep = VerifyReport(checks=len(checks))
    for c in checks:
        if not c.resolved:
            rep.violations.append(f"{c.label} is not a stabilizer of the foliated system")
    g_out = output_code(spec)
    solver_out = PauliSpan(spec.n, tuple(r.out for r in system.output_stabilizer_relations(spec.G_in)))
    if spec.mode is Mode.SUBSYSTEM:
        if (solver_out + g_out).rank != solver_out.rank:
            rep.violations.append("propagated group misses part of the gauge stabilizer")
        g_out = solver_out
    elif not _span_equal(g_out, solver_out):
        rep.violations.append(
            f"output code by set algebra (rank {g_out.rank}) differs from the propagated group (rank {solver_out.rank})"
        )
    out_rel = []
    for g in g_out.generators:
        r = system.solve_output(g.unsigned(), spec.G_in)
        if r is None:
            rep.violations.append(f"output generator {g.sparse_str()} has no correlation operator")
            continue
        out_rel.append((g, r, spec.G_in.sign_of(r.inp)))
    meas_rel = []
    for m in measured_inputs(spec).generators:
        r = system.solve_input(m.unsigned(), spec.G_in)
        if r is None or not r.out.is_identity:
            rep.violations.append(f"measured input {m.sparse_str()} is not inferable from the transcript")
            continue
        meas_rel.append((m, r, init.sign_of(r.inp)))
    fix_rel = []
    for op, s in fixings:
        r = system.solve_input(op.unsigned(), spec.G_in)
        if r is not None and not r.out.is_identity:
            fix_rel.append((op, r, init.sign_of(r.inp)))
    order = measurement_order(graph)
    for seed in seeds:
        rep.trials += 1
        tr, T = run_system(system, init, seed, order)
        for c, p in zip(checks, eval_checks(tr, checks)):
            if c.resolved and p != 1:
                rep.violations.append(f"seed {seed}: {c.label} parity {p}")
        for g, r, s in out_rel:
            val = output_expectation(T, system.outputs, r.out)
            if val * r.frame(tr.outcomes) != s:
                rep.violations.append(f"seed {seed}: output generator {g.sparse_str()} frame mismatch")
        for m, r, s in meas_rel:
            val = r.frame(tr.outcomes)
            rep.measured.setdefault(m.sparse_str(), []).append(val)
            if s is not None and val != s:
                rep.violations.append(f"seed {seed}: measured {m.sparse_str()} inferred {val}, input {s}")
        for op, r, s in fix_rel:
            val = output_expectation(T, system.outputs, r.out) * r.frame(tr.outcomes)
            if val != s:
                rep.violations.append(f"seed {seed}: logical {op.sparse_str()} not carried to the output")
    return rep


# ---------------------------------------------------------------------------
# errors


def inject_and_syndrome(graph: ResourceGraph, errors: Sequence[tuple[int, str]], seed,
                        checks: Sequence[CheckOperator], initial: PauliSpan
                        ) -> tuple[Transcript, list[CheckOperator]]:
    for v, _ in errors:
        if v in graph.outputs:
            raise ValueError(f"vertex {v} is an output; errors there are undetectable by construction")
        if v not in graph.basis:
            raise ValueError(f"vertex {v} is not measured")
    tr, _ = run_channel(graph, initial, seed, errors=errors)
    flipped = [c for c, p in zip(checks, eval_checks(tr, checks)) if p != 1]
    return tr, flipped


class ErrorClass:
    DETECTED = "detected"
    OUTPUT_SYNDROME = "output-syndrome"
    HARMLESS = "harmless"
    HARMFUL = "undetected-harmful"


def _flips(rel_support: frozenset[int], basis: Mapping[int, str], v: int, letter: str) -> bool:
    if v not in rel_support:
        return False
    return not PauliOperator.from_str(letter).commutes(PauliOperator.from_str(basis[v]))


def classify_error(graph: ResourceGraph, v: int, letter: str, flipped: Sequence[CheckOperator],
                   stab_rel: Sequence[Relation], logical_rel: Sequence[Relation]) -> str:
    if flipped:
        return ErrorClass.DETECTED
    if any(_flips(r.support, graph.basis, v, letter) for r in stab_rel):
        return ErrorClass.OUTPUT_SYNDROME
    if any(_flips(r.support, graph.basis, v, letter) for r in logical_rel):
        return ErrorClass.HARMFUL
    return ErrorClass.HARMLESS


@dataclass
class ScanReport:
    counts: dict[str, int]
    rows: list[tuple[int, str, str, int]]  # vertex, letter, class, flipped count

    @property
    def harmful(self) -> list[tuple[int, str]]:
        return [(v, p) for v, p, c, _ in self.rows if c == ErrorClass.HARMFUL]


def error_scan(graph: ResourceGraph, fixings: Sequence[tuple[PauliOperator, int]], seed: int = 0,
               checks: Sequence[CheckOperator] | None = None,
               errors: Sequence[tuple[int, str]] | None = None) -> ScanReport:
    """Single-error sweep: sigma^Z on wire sites, sigma^X and sigma^Z on ancillas."""
    spec = graph.spec
    checks = list(checks) if checks is not None else channel_checks(graph)
    init = fix_input(spec, fixings)
    system = graph.system
    base, _ = run_channel(graph, init, seed)
    base_par = eval_checks(base, checks)
    stab_rel = system.output_stabilizer_relations(spec.G_in)
    logical_rel = [r for r in (system.solve_input(L, spec.G_in) for L in output_logicals(spec).generators) if r]
    if errors is None:
        errors = []
        for vx in graph.vertices:
            if vx.id not in graph.basis:
                continue
            if vx.kind == "wire":
                errors.append((vx.id, "Z"))
            else:
                errors.extend([(vx.id, "X"), (vx.id, "Z")])
    counts = {c: 0 for c in (ErrorClass.DETECTED, ErrorClass.OUTPUT_SYNDROME, ErrorClass.HARMLESS, ErrorClass.HARMFUL)}
    rows = []
    for v, letter in errors:
        tr, _ = run_channel(graph, init, seed, errors=[(v, letter)])
        par = eval_checks(tr, checks)
        flipped = [c for c, p, p0 in zip(checks, par, base_par) if p != p0]
        cls = classify_error(graph, v, letter, flipped, stab_rel, logical_rel)
        counts[cls] += 1
        rows.append((v, letter, cls, len(flipped)))
    return ScanReport(counts, rows)
