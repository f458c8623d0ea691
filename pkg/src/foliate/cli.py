"""Command-line front end: build, verify, inject, compose, codes-emit.

Every command reads a ``foliate/1`` spec file (``-`` for stdin).  Reports go
to stdout in seed order and contain no timings, so identical seeds give
byte-identical output.  Exit status is 0 iff the report lists no violations;
malformed input exits with status 2 and line-anchored diagnostics.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from .foliation import ChannelSpec, Mode, ResourceGraph, assemble, channel_checks
from .pauli import PauliOperator
from .specfile import SpecError, SpecFile, emit_spec, from_channel, parse_spec_file, to_spec

__all__ = ["main", "export_text", "export_dot", "ROLE_COLORS"]

# wire sites by role, ancillas by measurement basis
ROLE_COLORS = {"Z": "black", "X": "red", "Y": "orange", "A:X": "blue", "A:Y": "green"}


def _sign(v: int | None) -> str:
    return "?" if v is None else ("+1" if v == 1 else "-1")


# ---------------------------------------------------------------------------
# graph export


def _vertex_fields(graph: ResourceGraph, v) -> dict:
    basis = graph.basis.get(v.id, "-")
    if v.kind == "wire":
        return {"id": v.id, "kind": "wire", "chain": v.chain, "interval": v.t, "role": v.role, "basis": basis}
    d = {"id": v.id, "kind": "ancilla", "generator": v.generator, "interval": v.t, "role": "A", "basis": basis}
    if v.compressed:
        d["compressed"] = 1
    return d


def export_text(graph: ResourceGraph, checks=None) -> str:
    checks = channel_checks(graph) if checks is None else checks
    out = ["foliate/1 graph"]
    if graph.spec.name:
        out.append(f"name: {graph.spec.name}")
    out.append("vertices:")
    for v in graph.vertices:
        out.append("  - " + " ".join(f"{k}={val}" for k, val in _vertex_fields(graph, v).items()))
    out.append("edges:")
    out.extend(f"  - {a} {b}" for a, b in graph.edges)
    out.append("outputs: " + " ".join(map(str, graph.outputs)))
    out.append("checks:")
    for c in checks:
        gen = c.generator.sparse_str() if not c.generator.is_identity else "I"
        out.append(
            f"  - kind={c.kind} generator={gen} t={c.t} sign={c.sign:+d} support={','.join(map(str, sorted(c.support)))}"
        )
    return "\n".join(out) + "\n"


def export_dot(graph: ResourceGraph) -> str:
    out = [f'graph "{graph.spec.name or "foliated"}" {{', "  node [style=filled, shape=circle, fontsize=8];"]
    outputs = set(graph.outputs)
    for v in graph.vertices:
        key = v.role if v.kind == "wire" else f"A:{graph.basis[v.id]}"
        color = ROLE_COLORS[key]
        extra = ", shape=doublecircle" if v.id in outputs else ""
        font = "white" if color in ("black", "blue", "red", "green") else "black"
        out.append(f'  v{v.id} [label="{v.id}", fillcolor={color}, fontcolor={font}{extra}];')
    for a, b in graph.edges:
        out.append(f"  v{a} -- v{b};")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# helpers


def _load(path: str) -> tuple[SpecFile, object]:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        sf = parse_spec_file(text)
        return sf, to_spec(sf)
    except SpecError as e:
        for d in e.diagnostics:
            click.echo(f"{path}: {d}", err=True)
        raise SystemExit(2)


def _channel(path: str, mode_override: str | None) -> tuple[SpecFile, ChannelSpec]:
    sf, spec = _load(path)
    if not isinstance(spec, ChannelSpec):
        click.echo(f"{path}: expected a channel spec, got a pipeline", err=True)
        raise SystemExit(2)
    if mode_override:
        from .foliation import ValidationError, validate

        spec = spec.replace(mode=Mode.parse(mode_override))
        try:
            validate(spec)
        except ValidationError as e:
            for d in e.diagnostics:
                click.echo(f"{path}: validation: {d}", err=True)
            raise SystemExit(2)
    return sf, spec


def _fixings_for(spec: ChannelSpec, sf: SpecFile, seed: int):
    from .verify import random_fixings

    if sf.fixings:
        return [(PauliOperator.from_str(s).unsigned(), PauliOperator.from_str(s).sign) for s in sf.fixings]
    return random_fixings(spec.G_in, np.random.default_rng([seed, 1]))


def _fix_str(fixings) -> str:
    return " ".join(f"{'+' if s == 1 else '-'}{op.sparse_str()}" for op, s in fixings) or "(none)"


def _verify_chunk(args):
    text, mode_override, seeds = args
    from .verify import verify_output

    sf = parse_spec_file(text)
    spec = to_spec(sf)
    if mode_override:
        spec = spec.replace(mode=Mode.parse(mode_override))
    graph = assemble(spec)
    checks = channel_checks(graph)
    rows = []
    for s in seeds:
        fx = _fixings_for(spec, sf, s)
        rep = verify_output(spec, fx, [s], graph, checks)
        rows.append((s, _fix_str(fx), len(checks), rep.violations, {k: v[0] for k, v in rep.measured.items()}))
    return rows


def _emit(fmt: str, payload: dict, text_lines: list[str]) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo("\n".join(text_lines))


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Compile foliated channels, verify them by simulation and run error sweeps."""


@main.command()
@click.argument("spec_file")
@click.option("--format", "fmt", type=click.Choice(["text", "dot"]), default="text", show_default=True)
@click.option("--mode-override", type=click.Choice([m.value for m in Mode]), default=None)
def build(spec_file: str, fmt: str, mode_override: str | None) -> None:
    """Assemble the resource graph and export it with its checks."""
    _, spec = _channel(spec_file, mode_override)
    graph = assemble(spec)
    click.echo(export_dot(graph) if fmt == "dot" else export_text(graph), nl=False)


@main.command()
@click.argument("spec_file")
@click.option("--seed", default=0, show_default=True, help="First trial seed; trial i uses seed + i.")
@click.option("--trials", default=100, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--mode-override", type=click.Choice([m.value for m in Mode]), default=None)
@click.option("--jobs", default=1, show_default=True, help="Worker processes for trials.")
def verify(spec_file: str, seed: int, trials: int, fmt: str, mode_override: str | None, jobs: int) -> None:
    """Simulate the channel noiselessly and check every output and check prediction."""
    sf, spec = _channel(spec_file, mode_override)
    text = emit_spec(sf)
    seeds = list(range(seed, seed + trials))
    chunks = [seeds[i::jobs] for i in range(jobs)] if jobs > 1 else [seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_verify_chunk, [(text, mode_override, c) for c in chunks]))
    else:
        parts = [_verify_chunk((text, mode_override, seeds))]
    rows = sorted((r for part in parts for r in part), key=lambda r: r[0])
    violations = [f"seed {s}: {v}" if not v.startswith("seed") else v for s, _, _, vs, _ in rows for v in vs]
    n_checks = rows[0][2] if rows else len(channel_checks(assemble(spec)))
    lines = ["foliate/1 verify", f"spec: {spec.name or spec_file}", f"mode: {spec.mode.value}",
             f"trials: {len(rows)}", f"checks: {n_checks}"]
    for s, fx, _, vs, meas in rows:
        m = " ".join(f"{k}={_sign(v)}" for k, v in sorted(meas.items()))
        lines.append(f"seed {s}: fix {fx}" + (f" measured {m}" if m else "") + f" {'ok' if not vs else 'FAIL'}")
    lines.append(f"violations: {len(violations)}")
    lines.extend(f"  - {v}" for v in violations)
    payload = {"spec": spec.name or spec_file, "mode": spec.mode.value, "trials": len(rows), "checks": n_checks,
               "seeds": [{"seed": s, "fixings": fx, "measured": meas, "violations": vs} for s, fx, _, vs, meas in rows],
               "violations": violations}
    _emit(fmt, payload, lines)
    raise SystemExit(0 if not violations else 1)


def _parse_error(text: str) -> tuple[int, str]:
    v, sep, letter = text.partition(":")
    if not sep or letter.upper() not in ("X", "Y", "Z"):
        raise click.BadParameter(f"expected VERTEX:LETTER, got {text!r}")
    return int(v), letter.upper()


@main.command()
@click.argument("spec_file")
@click.option("--scan", is_flag=True, help="Exhaustive single-error sweep (default when no --error).")
@click.option("--error", "errors", multiple=True, help="VERTEX:LETTER, repeatable.")
@click.option("--seed", default=0, show_default=True)
@click.option("--trials", default=1, show_default=True, help="Repeat the sweep over consecutive seeds.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--mode-override", type=click.Choice([m.value for m in Mode]), default=None)
@click.option("--rows", is_flag=True, help="List every error, not only the noteworthy ones.")
def inject(spec_file, scan, errors, seed, trials, fmt, mode_override, rows) -> None:
    """Inject single Pauli errors and classify them by their syndrome."""
    from .verify import ErrorClass, error_scan

    sf, spec = _channel(spec_file, mode_override)
    graph = assemble(spec)
    checks = channel_checks(graph)
    err_list = [_parse_error(e) for e in errors] if errors and not scan else None
    lines = ["foliate/1 inject", f"spec: {spec.name or spec_file}", f"checks: {len(checks)}"]
    payload = {"spec": spec.name or spec_file, "checks": len(checks), "sweeps": []}
    violations = []
    for s in range(seed, seed + trials):
        fx = _fixings_for(spec, sf, s)
        try:
            rep = error_scan(graph, fx, seed=s, checks=checks, errors=err_list)
        except ValueError as e:
            click.echo(f"{spec_file}: {e}", err=True)
            raise SystemExit(2)
        lines.append(f"seed {s}: fix {_fix_str(fx)} errors {len(rep.rows)}")
        lines.extend(f"  {k}: {rep.counts[k]}" for k in rep.counts)
        for v, letter, cls, nflip in rep.rows:
            if rows or err_list is not None or cls in (ErrorClass.HARMFUL, ErrorClass.OUTPUT_SYNDROME):
                lines.append(f"    {letter} on {v}: {cls} ({nflip} checks flipped)")
        violations += [f"seed {s}: {p} on {v} is undetected and flips a logical" for v, p in rep.harmful]
        payload["sweeps"].append({"seed": s, "counts": rep.counts,
                                  "rows": [{"vertex": v, "error": p, "class": c, "flipped": f} for v, p, c, f in rep.rows]})
    lines.append(f"violations: {len(violations)}")
    lines.extend(f"  - {v}" for v in violations)
    payload["violations"] = violations
    _emit(fmt, payload, lines)
    raise SystemExit(0 if not violations else 1)


@main.command()
@click.argument("spec_file")
@click.option("--seed", default=0, show_default=True)
@click.option("--trials", default=20, show_default=True)
@click.option("--fix", "fixes", multiple=True, help="NAME=+1 or NAME=-1 on a named input logical, repeatable.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def compose(spec_file, seed, trials, fixes, fmt) -> None:
    """Run a pipeline end to end and report its logical action."""
    from .composer import Pipeline, compose as build_graph, run_pipeline, validate_composition
    from .specfile import _fixing_item
    from .verify import random_fixings

    sf, p = _load(spec_file)
    if not isinstance(p, Pipeline):
        click.echo(f"{spec_file}: expected a pipeline spec", err=True)
        raise SystemExit(2)
    try:
        named = [_fixing_item(f, True) for f in fixes] or list(sf.fixings)
    except ValueError as e:
        raise click.BadParameter(str(e))
    fixed = []
    for item in named:
        name, _, val = item.partition("=")
        if name not in p.input_logicals:
            click.echo(f"{spec_file}: no input logical named {name!r}; known: {', '.join(p.input_logicals)}", err=True)
            raise SystemExit(2)
        fixed.append((p.input_logicals[name], int(val)))
    diags = validate_composition(p)
    graph = build_graph(p)
    action = graph.action
    lines = ["foliate/1 compose", f"pipeline: {p.name}", f"stages: {len(p.stages)}", f"vertices: {graph.nv}",
             "composition: " + ("ok" if not diags else "; ".join(diags)), "logical action:"]
    lines.extend(f"  {ln}" for ln in action.lines())
    violations = list(diags)
    runs = []
    for s in range(seed, seed + trials):
        fx = fixed or random_fixings(p.input_code, np.random.default_rng([s, 1]))
        try:
            run = run_pipeline(p, fx, s, graph)
        except ValueError as e:
            click.echo(f"{spec_file}: {e}", err=True)
            raise SystemExit(2)
        parts = [f"{k} raw {_sign(r)} frame {_sign(f)} corrected {_sign(c)} input {_sign(e)}"
                 for k, (r, f, c, e) in run.frames.items() if e is not None]
        parts += [f"{k} measured {_sign(v)} input {_sign(e)}" for k, (v, e) in run.measured.items()]
        parts += [f"probe {q.label} register {_sign(q.inferred)} tableau {_sign(q.oracle)}" for q in run.probes]
        lines.append(f"seed {s}: " + "; ".join(parts) + (" ok" if run.ok else " FAIL"))
        violations += [f"seed {s}: {v}" for v in run.violations]
        runs.append({"seed": s, "frames": {k: list(v) for k, v in run.frames.items()},
                     "measured": {k: list(v) for k, v in run.measured.items()},
                     "probes": [[q.label, q.inferred, q.oracle] for q in run.probes], "violations": run.violations})
    lines.append(f"violations: {len(violations)}")
    lines.extend(f"  - {v}" for v in violations)
    payload = {"pipeline": p.name, "vertices": graph.nv, "composition": diags, "logical_action": action.lines(),
               "runs": runs, "violations": violations}
    _emit(fmt, payload, lines)
    raise SystemExit(0 if not violations else 1)


CODES = ("planar", "rect", "twisted", "dislocation", "bacon_shor", "twisted_lifted")


@main.command("codes-emit")
@click.argument("code")
@click.option("--d", "d", default=3, show_default=True, help="Distance (Bacon-Shor side length).")
@click.option("--width", default=None, type=int, help="Width for rect codes.")
@click.option("--D", "D", default=2, show_default=True, help="Time intervals of the emitted identity channel.")
@click.option("--mode", type=click.Choice([m.value for m in Mode]), default=None)
@click.option("--wire-kind", type=click.Choice(["TypeI", "TypeII"]), default="TypeI", show_default=True)
def codes_emit(code, d, width, D, mode, wire_kind) -> None:
    """Write a fixture: the identity channel of a built-in code, or a built-in pipeline."""
    from . import codes as C
    from .composer import BUILTIN_PIPELINES

    if code in BUILTIN_PIPELINES:
        import inspect

        params = inspect.signature(BUILTIN_PIPELINES[code]).parameters
        args = [(k, v) for k, v in (("d", d), ("D", D)) if k in params]
        click.echo(emit_spec(SpecFile(pipeline=(code, tuple(args)))), nl=False)
        return
    if code not in CODES:
        raise click.BadParameter(f"unknown code {code!r}; choose from {', '.join(CODES + tuple(BUILTIN_PIPELINES))}")
    if code == "bacon_shor":
        from .pauli import PauliSpan

        gg = C.bacon_shor(d)
        stab = gg.stabilizer()
        xx = [g for g in gg.span.generators if g.zbits == 0]
        zs = [g for g in stab.generators if g.xbits == 0]
        spec = ChannelSpec(gg.span.n, PauliSpan(gg.span.n, tuple(xx + zs)), gg.span.generators, D,
                           mode=mode or Mode.SUBSYSTEM, name=f"bacon_shor_{d}")
    elif code == "twisted_lifted":
        # mixed wire kinds are part of this construction, so --wire-kind is ignored
        spec = C.twisted_identity_spec(d, D, lifted=True)
        if mode:
            spec = spec.replace(mode=Mode.parse(mode))
        click.echo(emit_spec(from_channel(spec)), nl=False)
        return
    else:
        inst = {
            "planar": lambda: C.planar_surface(d),
            "rect": lambda: C.rect_surface(width or d, d),
            "twisted": lambda: C.twisted_surface(d),
            "dislocation": lambda: C.dislocation_rect(d, width),
        }[code]()
        spec = ChannelSpec(inst.n, inst.stabilizers, inst.stabilizers.generators, D,
                           mode=mode or Mode.STANDARD, name=f"identity_{inst.name}")
    spec = spec.replace(wire_kinds=(wire_kind,) * spec.n)
    click.echo(emit_spec(from_channel(spec)), nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
