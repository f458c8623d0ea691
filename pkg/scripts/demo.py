"""Walk through the library: build a channel, verify it, sweep errors, run the phase gate."""

from foliate.codes import planar_surface
from foliate.composer import compose, logical_action, phase_gate, run_pipeline
from foliate.foliation import ChannelSpec, assemble, channel_checks
from foliate.verify import error_scan, verify_output

code = planar_surface(3)
spec = ChannelSpec(code.n, code.stabilizers, code.stabilizers.generators, 3, name="identity_planar_3")
graph = assemble(spec)
checks = channel_checks(graph)
print(f"{spec.name}: {len(graph.vertices)} vertices, {len(graph.edges)} edges, {len(checks)} checks")

rep = verify_output(spec, [(code.xbar, -1)], range(20), graph, checks)
print(f"verify, Xbar = -1, 20 seeds: {'ok' if rep.ok else rep.violations[:3]}")

scan = error_scan(graph, [(code.zbar, 1)])
print("single-error sweep:", ", ".join(f"{k} {v}" for k, v in scan.counts.items()))

p = phase_gate(3)
cg = compose(p)
print("phase gate logical action:", "; ".join(logical_action(p, cg).lines()))
run = run_pipeline(p, [(p.input_logicals["X"], 1)], 0, cg)
raw, frame, corrected, expected = run.frames["X->Y"]
print(f"seed 0: raw Ybar {raw:+d}, frame {frame:+d}, corrected {corrected:+d}, input Xbar {expected:+d}")
