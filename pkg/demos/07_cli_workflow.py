"""The expcli experiment harness, end to end, in a temp directory.

A JSON config describes the model and integrator; subcommands produce
machine-readable artifacts:

    run            one cell        -> JSON record
    sweep          cell product    -> CSV (stable column order, %.12e)
    spectrum       resonance scan  -> JSON
    verify-theory  certificates    -> JSON + exit code

Everything below shells out through the installed console script the same
way a batch job would.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CONFIG = {
    "model": {"model": "burgers", "n": 7, "c": 1.0},
    "integrator": {"N": 4, "T": 0.2},
    "sweep": {"N": [2, 3, 4], "T": [0.1, 0.2]},
    "spectral": {"M": 9},
}


def sh(*args):
    proc = subprocess.run(args, capture_output=True, text=True)
    print(f"$ {' '.join(args)}   (exit {proc.returncode})")
    return proc


def main():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "config.json"
        cfg.write_text(json.dumps(CONFIG))

        proc = sh("expcli", "run", "--config", str(cfg))
        record = json.loads(proc.stdout)
        print(f"  finalError = {record['finalError']:.3e}, "
              f"delta = {record['delta']:.4f}, status = {record['status']}\n")

        csv_path = Path(tmp) / "sweep.csv"
        sh("expcli", "sweep", "--config", str(cfg), "--out", str(csv_path))
        lines = csv_path.read_text().splitlines()
        print(f"  {len(lines) - 1} rows; header: {lines[0][:60]}...")
        print(f"  first row:   {lines[1][:60]}...\n")

        proc = sh("expcli", "spectrum", "--config", str(cfg))
        spectrum = json.loads(proc.stdout)
        print(f"  delta = {spectrum['delta']:.4f} at M = {spectrum['M']}, "
              f"kappa1 = {spectrum['kappa1']:.3f}\n")

        out = Path(tmp) / "theory.json"
        proc = sh("expcli", "verify-theory", "--n", "2", "--N", "3",
                  "--instances", "2", "--out", str(out))
        report = json.loads(out.read_text())
        print(f"  all_passed = {report['all_passed']}")

        bad = Path(tmp) / "bad.json"
        bad.write_text(json.dumps({"model": {"model": "burgers", "n": 7,
                                             "viscosity": 2}}))
        proc = sh("expcli", "run", "--config", str(bad))
        print(f"  stderr: {proc.stderr.strip()}  <- config errors exit 2")


if __name__ == "__main__":
    sys.exit(main())
