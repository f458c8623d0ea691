"""Write spec-file fixtures for the built-in codes and pipelines into fixtures/."""

import argparse
from pathlib import Path

from click.testing import CliRunner

from foliate.cli import main

FIXTURES = {
    "identity_planar_2.spec": ["planar", "--d", "2"],
    "identity_planar_3_D3.spec": ["planar", "--d", "3", "--D", "3"],
    "identity_planar_2_typeII.spec": ["planar", "--d", "2", "--wire-kind", "TypeII"],
    "identity_planar_2_compressed.spec": ["planar", "--d", "2", "--mode", "Compressed"],
    "identity_twisted_3.spec": ["twisted", "--d", "3"],
    "identity_twisted_3_lifted.spec": ["twisted_lifted", "--d", "3"],
    "identity_dislocation_3.spec": ["dislocation", "--d", "3"],
    "bacon_shor_3.spec": ["bacon_shor", "--d", "3"],
    "surgery_parity_2.spec": ["surgery_parity", "--d", "2"],
    "phase_gate_3.spec": ["phase_gate", "--d", "3"],
    "initialize_arbitrary_3.spec": ["initialize_arbitrary", "--d", "3"],
}


def main_(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    runner = CliRunner()
    for name, args in FIXTURES.items():
        r = runner.invoke(main, ["codes-emit", *args])
        if r.exit_code != 0:
            raise SystemExit(f"{name}: {r.output}")
        (out / name).write_text(r.output)
        print(out / name)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "fixtures")
    main_(ap.parse_args().out)
