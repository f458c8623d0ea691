"""Channel compiler: resource graphs, measurement patterns, output codes and checks.

A channel is specified by an input stabilizer group G_in on n logical
wires, an ordered generating list G_R of the channel code and a number of
time intervals D.  ``assemble`` builds the cluster-state resource graph;
``channel_checks`` derives the bulk and boundary checks; ``output_code``,
``output_logicals`` and ``measured_inputs`` give the set-algebra
predictions for the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

from .pauli import (
    PauliOperator,
    PauliSpan,
    centralizer,
    commuting_subgroup,
    intersection,
    member_with_witness,
    quotient_basis,
    stabilizer_of_gauge,
)
from .relations import GraphSystem, Relation, conjugate_by_graph
from .wire import WireKind, WireLayout, sigma_sites

__all__ = [
    "Mode",
    "ChannelSpec",
    "Vertex",
    "ResourceGraph",
    "CheckOperator",
    "CorrelationOperator",
    "ValidationError",
    "validate",
    "assemble",
    "measurement_basis",
    "output_code",
    "output_logicals",
    "measured_inputs",
    "xi_decomposition",
    "bulk_check",
    "boundary_check",
    "channel_checks",
    "correlation_operator",
    "interval_operator",
]


class Mode(str, Enum):
    STANDARD = "Standard"
    SUBSYSTEM = "Subsystem"
    COMPRESSED = "Compressed"

    @classmethod
    def parse(cls, s: "str | Mode") -> "Mode":
        if isinstance(s, Mode):
            return s
        for m in cls:
            if m.value.lower() == s.strip().lower():
                return m
        raise ValueError(f"unknown mode {s!r}")


class ValidationError(ValueError):
    def __init__(self, diagnostics: Sequence[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ChannelSpec:
    n: int
    G_in: PauliSpan
    G_R: tuple[PauliOperator, ...]
    D: int
    mode: Mode = Mode.STANDARD
    wire_kinds: tuple[WireKind, ...] = ()
    lift_targets: tuple[frozenset[int], ...] = ()
    v_edges: bool = True  # off only for the compatibility demonstration
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "G_R", tuple(self.G_R))
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        kinds = tuple(WireKind.parse(k) for k in self.wire_kinds) or (WireKind.TYPE_I,) * self.n
        object.__setattr__(self, "wire_kinds", kinds)
        lifts = tuple(frozenset(s) for s in self.lift_targets) or (frozenset(),) * len(self.G_R)
        object.__setattr__(self, "lift_targets", lifts)

    @property
    def G_ch(self) -> PauliSpan:
        return PauliSpan(self.n, self.G_R)

    def layout(self, j: int) -> WireLayout:
        return WireLayout(self.wire_kinds[j], self.D)

    @cached_property
    def _offsets(self) -> tuple[int, ...]:
        acc, out = 0, []
        for j in range(self.n):
            out.append(acc)
            acc += self.layout(j).N
        return tuple(out)

    def offset(self, j: int) -> int:
        """Vertex id of site 1 of wire j (wires are laid out back to back)."""
        return self._offsets[j]

    def lifted(self, g: int, j: int) -> bool:
        return j in self.lift_targets[g]

    def replace(self, **kw) -> "ChannelSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        if "G_R" in kw and "lift_targets" not in kw:
            d["lift_targets"] = ()
        return ChannelSpec(**d)


# ---------------------------------------------------------------------------
# validation


def validate(spec: ChannelSpec) -> None:
    """Raise ValidationError listing every problem with the channel spec."""
    diags = []
    n = spec.n
    if spec.D < 1:
        diags.append("D must be at least 1")
    if spec.G_in.n != n:
        diags.append(f"input code acts on {spec.G_in.n} qubits, expected {n}")
    if len(spec.wire_kinds) != n:
        diags.append(f"{len(spec.wire_kinds)} wire kinds for {n} wires")
    if len(spec.lift_targets) != len(spec.G_R):
        diags.append(f"{len(spec.lift_targets)} lift sets for {len(spec.G_R)} generators")
    for i, g in enumerate(spec.G_R):
        if g.n != n:
            diags.append(f"generator {i + 1} acts on {g.n} qubits, expected {n}")
        elif not g.is_hermitian:
            diags.append(f"generator {i + 1} ({g}) is not Hermitian")
    for i, lift in enumerate(spec.lift_targets):
        bad = [j for j in lift if not 0 <= j < n]
        if bad:
            diags.append(f"generator {i + 1} lifts wires outside the register: {bad}")
    if diags:
        raise ValidationError(diags)
    if not spec.G_in.is_abelian:
        diags.append("input code is not Abelian")
    else:
        try:
            spec.G_in.check_consistent()
        except ValueError as e:
            diags.append(f"input code: {e}")
    gens = spec.G_R
    if spec.mode in (Mode.STANDARD, Mode.COMPRESSED):
        for a in range(len(gens)):
            for b in range(a):
                if not gens[a].commutes(gens[b]):
                    diags.append(
                        f"generators {b + 1} ({gens[b]}) and {a + 1} ({gens[a]}) anticommute"
                    )
        if not diags:
            try:
                spec.G_ch.check_consistent()
            except ValueError as e:
                diags.append(f"channel code: {e}")
    else:
        sum_z = 0
        for g in gens:
            sum_z ^= g.zbits
        try:
            stab = stabilizer_of_gauge(spec.G_ch)
        except ValueError as e:
            diags.append(f"gauge group: {e}")
            stab = PauliSpan(n, ())
        for p in stab.generators:
            if bin(p.xbits & sum_z).count("1") % 2:
                diags.append(f"stabilizer {p} violates the subsystem condition p^X . sum g^Z = 0")
    if diags:
        raise ValidationError(diags)


# ---------------------------------------------------------------------------
# resource graph


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str  # "wire" or "ancilla"
    t: int
    role: str  # Z/X/Y for wire sites, "A" for ancillas
    chain: int | None = None
    site: int | None = None
    generator: int | None = None
    compressed: bool = False


def measurement_basis(g: PauliOperator) -> str:
    """X if g^X . g^Z is even, else Y."""
    return "X" if bin(g.xbits & g.zbits).count("1") % 2 == 0 else "Y"


@dataclass(frozen=True)
class Target:
    """Coupling of one ancilla to one wire: the wire sites it touches and its Sigma sites."""

    sites: tuple[int, ...]
    sigma: frozenset[int]
    toggles: int


@dataclass(frozen=True)
class ResourceGraph:
    spec: ChannelSpec
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    basis: dict
    outputs: tuple[int, ...]
    inputs: tuple[int, ...]
    ancilla_index: dict = field(repr=False)
    sigma: dict = field(repr=False)  # ancilla id -> frozenset of wire vertex ids

    def site_vertex(self, j: int, site: int) -> int:
        """Vertex id of 1-based site `site` on wire j."""
        return self.spec.offset(j) + site - 1

    def wire_vertex(self, j: int, role: str, t: int) -> int:
        return self.site_vertex(j, self.spec.layout(j).site_index(role, t))

    def ancilla(self, g: int, t: int, compressed: bool = False) -> int:
        return self.ancilla_index[(g, t, compressed)]

    @property
    def ancillas(self) -> list[int]:
        return [v.id for v in self.vertices if v.kind == "ancilla"]

    @property
    def measured(self) -> list[int]:
        return sorted(self.basis)

    def degree(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    @cached_property
    def system(self) -> GraphSystem:
        return GraphSystem(len(self.vertices), self.edges, self.inputs, self.basis, self.outputs)

    def check_wellformed(self) -> None:
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise AssertionError(f"self edge at {a}")
            if (a, b) in seen or a > b:
                raise AssertionError(f"duplicate or unordered edge {(a, b)}")
            seen.add((a, b))
        outs = set(self.outputs)
        for v in self.vertices:
            if (v.id in outs) == (v.id in self.basis):
                raise AssertionError(f"vertex {v.id} basis/output mismatch")


def _targets(spec: ChannelSpec, g: int, t: int, compressed: bool) -> dict[int, Target]:
    """Per-wire coupling of ancilla G(t) (or G^C(t)) following the casewise rules."""
    gen = spec.G_R[g]
    out = {}
    for j in gen.support:
        lay = spec.layout(j)
        base = spec.offset(j) - 1
        letter = gen.letter(j)
        lift = compressed or spec.lifted(g, j)
        tz = t + 1 if lift else t
        kind = lay.kind
        if letter == "X":
            sites = (lay.site_index("X", t),)
            sig = sigma_sites(lay, "X", t)
            tog = 0
        elif letter == "Z":
            sites = (lay.site_index("Z", tz),)
            sig = sigma_sites(lay, "Z", tz)
            tog = 0
        elif kind is WireKind.TYPE_II and not compressed:
            sites = (lay.site_index("Y", t),)
            sig = sigma_sites(lay, "Y", t)
            tog = 1
        else:
            sites = (lay.site_index("X", t), lay.site_index("Z", tz))
            sig = sorted(set(sigma_sites(lay, "X", t)) ^ set(sigma_sites(lay, "Z", tz)))
            tog = 0
        out[j] = Target(tuple(base + s for s in sites), frozenset(base + s for s in sig), tog)
    return out


def _ancilla_plan(spec: ChannelSpec) -> list[tuple[int, int, bool]]:
    flags = (False, True) if spec.mode is Mode.COMPRESSED else (False,)
    return [(g, t, c) for t in range(1, spec.D + 1) for g in range(len(spec.G_R)) for c in flags]


def _v_parity(spec: ChannelSpec, a: tuple[int, int, bool], b: tuple[int, int, bool]) -> int:
    """Parity of b's targets inside a's bulk Sigma difference at a generic interval.

    The ancilla-ancilla edge a-b is required exactly when this is odd; it
    equals g^X . h^Z for unlifted TypeI wires.
    """
    ga, _, ca = a
    gb, _, cb = b
    ref = spec.replace(D=max(spec.D, 3))
    t = 2
    ta_now = _targets(ref, ga, t, ca)
    ta_prev = _targets(ref, ga, t - 1, ca)
    tb = _targets(ref, gb, t, cb)
    count = 0
    for j, tgt in tb.items():
        diff = set()
        if j in ta_now:
            diff ^= set(ta_now[j].sigma)
        if j in ta_prev:
            diff ^= set(ta_prev[j].sigma)
        count += sum(1 for s in tgt.sites if s in diff)
    return count & 1


def assemble(spec: ChannelSpec) -> ResourceGraph:
    validate(spec)
    n, D = spec.n, spec.D
    vertices: list[Vertex] = []
    basis: dict[int, str] = {}
    edges: set[tuple[int, int]] = set()

    def add_edge(a: int, b: int) -> None:
        e = (min(a, b), max(a, b))
        if a == b or e in edges:
            raise AssertionError(f"self or duplicate edge {e}")
        edges.add(e)

    for j in range(n):
        lay = spec.layout(j)
        for s in range(1, lay.N + 1):
            role, t = lay.role_of(s)
            vid = spec.offset(j) + s - 1
            vertices.append(Vertex(vid, "wire", t, role, chain=j, site=s))
            if s < lay.N:
                basis[vid] = lay.basis
                add_edge(vid, vid + 1)
    outputs = tuple(spec.offset(j) + spec.layout(j).N - 1 for j in range(n))
    inputs = tuple(spec.offset(j) for j in range(n))

    ancilla_index: dict[tuple[int, int, bool], int] = {}
    sigma: dict[int, frozenset[int]] = {}
    plan = _ancilla_plan(spec)
    for g, t, c in plan:
        vid = len(vertices)
        vertices.append(Vertex(vid, "ancilla", t, "A", generator=g, compressed=c))
        ancilla_index[(g, t, c)] = vid
        tg = _targets(spec, g, t, c)
        toggles = 0
        sig: set[int] = set()
        for tgt in tg.values():
            for s in tgt.sites:
                add_edge(vid, s)
            sig ^= set(tgt.sigma)
            toggles += tgt.toggles
        b = measurement_basis(spec.G_R[g])
        if toggles % 2:
            b = "Y" if b == "X" else "X"
        basis[vid] = b
        sigma[vid] = frozenset(sig)

    if spec.v_edges and spec.mode is not Mode.SUBSYSTEM:
        for c in ((False, True) if spec.mode is Mode.COMPRESSED else (False,)):
            for gb in range(len(spec.G_R)):
                for ga in range(gb):
                    a, b = (ga, 2, c), (gb, 2, c)
                    pab = _v_parity(spec, a, b)
                    if pab != _v_parity(spec, b, a):
                        raise ValidationError(
                            [f"generators {ga + 1} and {gb + 1} have no consistent ancilla coupling"]
                        )
                    if pab:
                        for t in range(1, D + 1):
                            add_edge(ancilla_index[(ga, t, c)], ancilla_index[(gb, t, c)])
    graph = ResourceGraph(
        spec=spec,
        vertices=tuple(vertices),
        edges=tuple(sorted(edges)),
        basis=basis,
        outputs=outputs,
        inputs=inputs,
        ancilla_index=ancilla_index,
        sigma=sigma,
    )
    return graph


# ---------------------------------------------------------------------------
# output-code set algebra


def output_code(spec: ChannelSpec) -> PauliSpan:
    """G_ch together with the elements of G_in commuting with all of G_ch.

    In Subsystem mode this is the guaranteed part only: the stabilizer of the
    gauge group plus the commuting part of G_in.  The output additionally
    carries a gauge fixing set by the coupling order.
    """
    keep = commuting_subgroup(spec.G_in, spec.G_ch)
    if spec.mode is Mode.SUBSYSTEM:
        return (stabilizer_of_gauge(spec.G_ch) + keep).basis()
    return (spec.G_ch + keep).basis()


def output_logicals(spec: ChannelSpec) -> PauliSpan:
    """C(G_in) and C(G_ch) intersected, modulo the group generated by both."""
    both = spec.G_in + spec.G_ch
    return quotient_basis(centralizer(both), both)


def measured_inputs(spec: ChannelSpec) -> PauliSpan:
    """Elements of G_ch commuting with G_in, modulo G_in."""
    cand = intersection(spec.G_ch, centralizer(spec.G_in))
    return quotient_basis(cand, spec.G_in)


def xi_decomposition(G: PauliOperator, G_R: Sequence[PauliOperator]) -> list[int]:
    """Indices into G_R whose product is G up to phase (lexicographically first)."""
    span = PauliSpan(G.n, tuple(G_R))
    w = member_with_witness(G, span)
    if w is None:
        raise ValueError(f"{G} is not in the span of the channel generators")
    return w


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CheckOperator:
    kind: str  # "bulk" or "boundary"
    generator: PauliOperator
    t: int
    support: frozenset[int]
    sign: int  # parity = sign * prod outcomes; 0 when not a stabilizer of the graph
    xi: tuple[int, ...] = ()
    label: str = ""

    @property
    def resolved(self) -> bool:
        return self.sign != 0

    @property
    def weight(self) -> int:
        return len(self.support)

    def parity(self, outcomes) -> int:
        s = self.sign or 1
        for v in self.support:
            s *= outcomes[v]
        return s


def _sign_of_support(graph: ResourceGraph, support: Iterable[int]) -> int:
    """Exact sign s with prod B_v = s on the resource state, 0 if not a stabilizer."""
    system = graph.system
    pre, rel = system.relation_for_support(support)
    if rel is None or not rel.out.is_identity:
        return 0
    s = graph.spec.G_in.sign_of(rel.inp)
    if s is None:
        return 0
    return s * rel.sign


def _anc_term(graph: ResourceGraph, g: int, t: int, compressed: bool = False) -> set[int]:
    a = graph.ancilla(g, t, compressed)
    return {a} ^ set(graph.sigma[a])


def _make_check(graph, kind, G, t, support, xi, label) -> CheckOperator:
    support = frozenset(support)
    return CheckOperator(kind, G, t, support, _sign_of_support(graph, support), tuple(xi), label)


def bulk_check(graph: ResourceGraph, G: PauliOperator, t: int) -> CheckOperator:
    spec = graph.spec
    if not 2 <= t <= spec.D:
        raise ValueError(f"bulk checks need 2 <= t <= D, got t={t}")
    xi = xi_decomposition(G, spec.G_R)
    sup: set[int] = set()
    for g in xi:
        sup ^= _anc_term(graph, g, t) ^ _anc_term(graph, g, t - 1)
    return _make_check(graph, "bulk", G, t, sup, xi, f"bulk {G.sparse_str()} t={t}")


def boundary_check(graph: ResourceGraph, G: PauliOperator, t: int = 1) -> CheckOperator:
    spec = graph.spec
    if not spec.G_in.contains(G):
        raise ValueError(f"{G} is not in the input code")
    if not spec.G_ch.contains(G):
        raise ValueError(f"{G} is not in the channel code")
    if not 1 <= t <= spec.D:
        raise ValueError(f"boundary checks need 1 <= t <= D, got t={t}")
    xi = xi_decomposition(G, spec.G_R)
    sup: set[int] = set()
    for g in xi:
        sup ^= _anc_term(graph, g, t)
    return _make_check(graph, "boundary", G, t, sup, xi, f"boundary {G.sparse_str()} t={t}")


def _compressed_checks(graph: ResourceGraph) -> list[CheckOperator]:
    spec = graph.spec
    out = []
    for g, G in enumerate(spec.G_R):
        seq = [(t, c) for t in range(1, spec.D + 1) for c in (False, True)]
        for (t0, c0), (t1, c1) in zip(seq, seq[1:]):
            sup = _anc_term(graph, g, t0, c0) ^ _anc_term(graph, g, t1, c1)
            label = f"bulk {G.sparse_str()} {t0}{'c' if c0 else ''}-{t1}{'c' if c1 else ''}"
            out.append(_make_check(graph, "bulk", G, t1, sup, (g,), label))
    return out


def channel_checks(graph: ResourceGraph) -> list[CheckOperator]:
    """Bulk checks for every generator (or stabilizer in Subsystem mode) and
    boundary checks for a basis of G_ch and G_in intersected."""
    spec = graph.spec
    checks: list[CheckOperator] = []
    if spec.mode is Mode.SUBSYSTEM:
        stab = stabilizer_of_gauge(spec.G_ch)
        bulk_ops = list(stab.generators)
    else:
        bulk_ops = list(spec.G_R)
    if spec.mode is Mode.COMPRESSED:
        checks.extend(_compressed_checks(graph))
    else:
        for G in bulk_ops:
            for t in range(2, spec.D + 1):
                checks.append(bulk_check(graph, G, t))
    ch = PauliSpan(spec.n, tuple(bulk_ops))
    for G in intersection(spec.G_in, ch).generators:
        checks.append(boundary_check(graph, G, 1))
    return checks


# ---------------------------------------------------------------------------
# correlation operators


@dataclass(frozen=True)
class CorrelationOperator:
    """prod_{support} m_v * sign * P_out reproduces <P> of the input."""

    P: PauliOperator
    support: frozenset[int]
    sign: int
    relation: Relation

    def frame(self, outcomes) -> int:
        return self.relation.frame(outcomes)


def _check_commutes_with_channel(spec: ChannelSpec, P: PauliOperator) -> None:
    for i, g in enumerate(spec.G_R):
        if not P.commutes(g):
            raise ValueError(f"{P} anticommutes with channel generator {i + 1} ({g})")


def correlation_operator(graph: ResourceGraph, P: PauliOperator) -> CorrelationOperator:
    """Output-anchored R_P: Sigma supports at the last interval and P on the outputs."""
    spec = graph.spec
    _check_commutes_with_channel(spec, P)
    sup: set[int] = set()
    for j in P.support:
        lay = spec.layout(j)
        base = spec.offset(j) - 1
        if P.xbits >> j & 1:
            sup ^= {base + s for s in sigma_sites(lay, "X", spec.D)}
        if P.zbits >> j & 1:
            sup ^= {base + s for s in sigma_sites(lay, "Z", spec.D + 1)}
    pre, rel = graph.system.relation_for_support(sup, P.unsigned() if P.is_hermitian else P)
    if rel is None:
        raise ValueError(f"the correlation operator of {P} leaves an ancilla tail")
    return CorrelationOperator(P, frozenset(sup), rel.sign, rel)


def interval_operator(graph: ResourceGraph, P: PauliOperator, t: int) -> PauliOperator:
    """R'_P(t): wire representatives at interval t with the ancilla Z factors
    that make it a stabilizer-equivalent of U I_P U on the graph."""
    spec = graph.spec
    nv = len(graph.vertices)
    op = PauliOperator.identity(nv)
    for j in P.support:
        lay = spec.layout(j)
        letter = P.letter(j)
        parts = ["X", "Z"] if (letter == "Y" and lay.kind is WireKind.TYPE_I) else [letter]
        for q in parts:
            sites = sigma_sites(lay, q, t) if not (q == "X" and t > spec.D) else None
            if sites is None:
                raise ValueError("interval representatives need t <= D")
            ops = {graph.site_vertex(j, s): lay.basis for s in sites}
            w = PauliOperator.from_sparse(nv, ops)
            w = w * PauliOperator.single(nv, graph.site_vertex(j, lay.site_index(q, t)), "Z")
            op = op * w
    pre = conjugate_by_graph(op, graph.system.adj)
    inputs = set(graph.inputs)
    tail = 0
    for v in graph.ancillas:
        if pre.zbits >> v & 1 and v not in inputs:
            tail |= 1 << v
    return op * PauliOperator(nv, 0, tail)
