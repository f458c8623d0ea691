"""Line-oriented spec files (header ``foliate/1``) for channels and pipelines.

Channel file::

    foliate/1
    name: identity_d2
    qubits: 4
    D: 2
    mode: Standard
    wire_kinds: TypeI TypeI TypeI TypeI
    input_code:
      - +XXXX
    channel_generators:
      - +ZZII lift=0,1
    fixings:
      - +XXII

Pipeline file::

    foliate/1
    pipeline: phase_gate d=3 D=2
    fixings:
      - X=+1

Scalars are ``key: value`` lines at column 1, lists are ``key:`` followed by
indented ``- item`` lines.  ``#`` starts a comment.  Every problem is
reported with its line and column.
"""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field

from .foliation import ChannelSpec, Mode, ValidationError, validate
from .pauli import PauliOperator, PauliSpan
from .wire import WireKind

__all__ = ["HEADER", "SpecFile", "SpecError", "parse_spec_file", "emit_spec", "parse_spec", "to_spec", "from_channel", "normalize"]

HEADER = "foliate/1"
SCALARS = ("name", "qubits", "D", "mode", "wire_kinds", "pipeline")
LISTS = ("input_code", "channel_generators", "fixings")


class SpecError(ValueError):
    def __init__(self, diagnostics: list[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


@dataclass(frozen=True)
class SpecFile:
    """Parsed but not yet compiled document; strings are kept normalized."""

    name: str = ""
    qubits: int | None = None
    D: int | None = None
    mode: str = "Standard"
    wire_kinds: tuple[str, ...] = ()
    input_code: tuple[str, ...] = ()
    channel_generators: tuple[tuple[str, tuple[int, ...]], ...] = ()
    pipeline: tuple[str, tuple[tuple[str, int], ...]] | None = None
    fixings: tuple[str, ...] = ()
    lines: dict = field(default_factory=dict, compare=False, repr=False)  # key -> line number

    @property
    def is_pipeline(self) -> bool:
        return self.pipeline is not None


def _pauli(text: str) -> str:
    return str(PauliOperator.from_str(text))


def _fixing_item(text: str, pipeline: bool) -> str:
    if not pipeline:
        return _pauli(text)
    name, sep, val = text.partition("=")
    if not sep or not name.strip() or val.strip() not in ("+1", "-1", "1"):
        raise ValueError(f"expected NAME=+1 or NAME=-1, got {text!r}")
    return f"{name.strip()}={'-1' if val.strip() == '-1' else '+1'}"


def parse_spec_file(text: str) -> SpecFile:
    """Syntax pass: returns a SpecFile or raises SpecError with line:col diagnostics."""
    diags: list[str] = []
    raw_lines = text.splitlines()

    def err(ln: int, col: int, msg: str) -> None:
        diags.append(f"line {ln}, col {col}: {msg}")

    body = []
    for i, line in enumerate(raw_lines, 1):
        stripped = line.split("#", 1)[0].rstrip()
        if stripped:
            body.append((i, stripped))
    if not body or body[0][1].strip() != HEADER:
        ln = body[0][0] if body else 1
        raise SpecError([f"line {ln}, col 1: first line must be the header {HEADER!r}"])

    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    current: str | None = None
    for ln, line in body[1:]:
        if line[0].isspace():
            item = line.lstrip()
            col = len(line) - len(item) + 1
            if current is None:
                err(ln, col, "list item outside a list section")
                continue
            if not item.startswith("- "):
                err(ln, col, "list items start with '- '")
                continue
            values[current].append((ln, col + 2, item[2:].strip()))
            continue
        key, sep, val = line.partition(":")
        key = key.strip()
        if not sep:
            err(ln, 1, f"expected 'key: value', got {line!r}")
            current = None
            continue
        if key not in SCALARS and key not in LISTS:
            err(ln, 1, f"unknown key {key!r}")
            current = None
            continue
        if key in lines:
            err(ln, 1, f"duplicate key {key!r} (first on line {lines[key]})")
            current = None
            continue
        lines[key] = ln
        vcol = len(line) - len(val) + (len(val) - len(val.lstrip())) + 1
        val = val.strip()
        if key in LISTS:
            if val:
                err(ln, vcol, f"{key} is a list section; put items on indented '- ' lines")
            values[key] = []
            current = key
        else:
            values[key] = (ln, vcol, val)
            current = None

    is_pipe = "pipeline" in values
    out: dict[str, object] = {}

    def scalar_int(key: str) -> None:
        if key in values:
            ln, col, val = values[key]
            try:
                out[key] = int(val)
            except ValueError:
                err(ln, col, f"{key} must be an integer, got {val!r}")

    if "name" in values:
        out["name"] = values["name"][2]
    if is_pipe:
        for key in ("qubits", "D", "mode", "wire_kinds", "input_code", "channel_generators"):
            if key in values:
                err(lines[key], 1, f"{key} is not allowed in a pipeline file")
        ln, col, val = values["pipeline"]
        parts = val.split()
        if not parts:
            err(ln, col, "pipeline needs a builtin name")
        else:
            args = []
            for p in parts[1:]:
                k, sep, v = p.partition("=")
                try:
                    if not sep:
                        raise ValueError
                    args.append((k, int(v)))
                except ValueError:
                    err(ln, col, f"pipeline argument {p!r} is not key=integer")
            out["pipeline"] = (parts[0], tuple(args))
    else:
        scalar_int("qubits")
        scalar_int("D")
        for key in ("qubits", "D"):
            if key not in values:
                err(1, 1, f"missing required key {key!r}")
        if "mode" in values:
            ln, col, val = values["mode"]
            try:
                out["mode"] = Mode.parse(val).value
            except ValueError as e:
                err(ln, col, str(e))
        if "wire_kinds" in values:
            ln, col, val = values["wire_kinds"]
            try:
                out["wire_kinds"] = tuple(WireKind.parse(k).value for k in val.split())
            except ValueError as e:
                err(ln, col, str(e))
        items = []
        for ln, col, item in values.get("input_code", []):
            try:
                items.append(_pauli(item))
            except ValueError as e:
                err(ln, col, str(e))
        out["input_code"] = tuple(items)
        gens = []
        for ln, col, item in values.get("channel_generators", []):
            lifts: tuple[int, ...] = ()
            try:
                if not item:
                    raise ValueError("empty generator")
                op, *rest = item.split()
                op = _pauli(op)
                for r in rest:
                    k, sep, v = r.partition("=")
                    if k != "lift" or not sep:
                        raise ValueError(f"unknown generator flag {r!r}")
                    lifts = tuple(sorted({int(x) for x in v.split(",") if x}))
                gens.append((op, lifts))
            except ValueError as e:
                err(ln, col, str(e))
        out["channel_generators"] = tuple(gens)
    fix = []
    for ln, col, item in values.get("fixings", []):
        try:
            fix.append(_fixing_item(item, is_pipe))
        except ValueError as e:
            err(ln, col, str(e))
    out["fixings"] = tuple(fix)
    if diags:
        raise SpecError(diags)
    return SpecFile(lines=lines, **out)


def emit_spec(sf: SpecFile) -> str:
    """Canonical text; parse_spec_file(emit_spec(s)) == s."""
    out = [HEADER]
    if sf.name:
        out.append(f"name: {sf.name}")
    if sf.is_pipeline:
        name, args = sf.pipeline
        out.append("pipeline: " + " ".join([name] + [f"{k}={v}" for k, v in args]))
    else:
        out.append(f"qubits: {sf.qubits}")
        out.append(f"D: {sf.D}")
        out.append(f"mode: {sf.mode}")
        if sf.wire_kinds:
            out.append("wire_kinds: " + " ".join(sf.wire_kinds))
        out.append("input_code:")
        out.extend(f"  - {s}" for s in sf.input_code)
        out.append("channel_generators:")
        for s, lifts in sf.channel_generators:
            out.append(f"  - {s}" + (f" lift={','.join(map(str, lifts))}" if lifts else ""))
    if sf.fixings:
        out.append("fixings:")
        out.extend(f"  - {s}" for s in sf.fixings)
    return "\n".join(out) + "\n"


def normalize(text: str) -> str:
    return emit_spec(parse_spec_file(text))


def _anchor(sf: SpecFile, key: str) -> str:
    ln = sf.lines.get(key)
    return f"line {ln}, col 1: " if ln else ""


def to_spec(sf: SpecFile):
    """Compile to a validated ChannelSpec, or build the named Pipeline."""
    if sf.is_pipeline:
        from .composer import BUILTIN_PIPELINES

        name, args = sf.pipeline
        if name not in BUILTIN_PIPELINES:
            raise SpecError([f"{_anchor(sf, 'pipeline')}unknown pipeline {name!r}; known: {', '.join(BUILTIN_PIPELINES)}"])
        fn = BUILTIN_PIPELINES[name]
        params = inspect.signature(fn).parameters
        bad = [k for k, _ in args if k not in params]
        if bad:
            raise SpecError([f"{_anchor(sf, 'pipeline')}{name} takes no argument(s) {', '.join(bad)}"])
        try:
            return fn(**dict(args))
        except ValueError as e:
            raise SpecError([f"{_anchor(sf, 'pipeline')}{e}"]) from e
    n = sf.qubits
    diags = []
    for s in sf.input_code:
        if len(s.lstrip("+-i")) != n:
            diags.append(f"{_anchor(sf, 'input_code')}input generator {s} has length {len(s.lstrip('+-i'))}, expected {n}")
    for s, _ in sf.channel_generators:
        if len(s.lstrip("+-i")) != n:
            diags.append(f"{_anchor(sf, 'channel_generators')}channel generator {s} has length {len(s.lstrip('+-i'))}, expected {n}")
    if diags:
        raise SpecError(diags)
    spec = ChannelSpec(
        n,
        PauliSpan(n, tuple(PauliOperator.from_str(s) for s in sf.input_code)),
        tuple(PauliOperator.from_str(s) for s, _ in sf.channel_generators),
        sf.D,
        mode=sf.mode,
        wire_kinds=sf.wire_kinds,
        lift_targets=tuple(frozenset(lifts) for _, lifts in sf.channel_generators),
        name=sf.name,
    )
    try:
        validate(spec)
    except ValidationError as e:
        raise SpecError([f"validation: {d}" for d in e.diagnostics]) from e
    return spec


def parse_spec(text: str):
    """Text to ChannelSpec or Pipeline."""
    return to_spec(parse_spec_file(text))


def from_channel(spec: ChannelSpec, fixings: tuple[str, ...] = ()) -> SpecFile:
    return SpecFile(
        name=spec.name,
        qubits=spec.n,
        D=spec.D,
        mode=spec.mode.value,
        wire_kinds=tuple(k.value for k in spec.wire_kinds),
        input_code=tuple(str(g) for g in spec.G_in.generators),
        channel_generators=tuple((str(g), tuple(sorted(lift))) for g, lift in zip(spec.G_R, spec.lift_targets)),
        fixings=tuple(fixings),
    )
