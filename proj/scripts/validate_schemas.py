#!/usr/bin/env python3
"""Run a few quick roa commands and validate every JSON output against schemas/.

usage: validate_schemas.py ROA_BINARY SCHEMA_DIR WORK_DIR

Exit status 0 when everything validates, 1 on a validation or run failure,
77 when the jsonschema package is unavailable (ctest reports a skip).
"""

import json
import pathlib
import subprocess
import sys

try:
    import jsonschema
except ImportError:
    print("jsonschema is not installed; skipping")
    sys.exit(77)

SCHEMA_FOR = {
    "manifest.json": "manifest",
    "config.json": "config",
    "verdict.json": "verdict",
    "scan.json": "scan",
    "spectrum.json": "spectrum",
    "orbit.json": "orbit",
    "basin.json": "basin",
    "fig7.json": "fig7",
    "fig5_witness.json": "witness",
}


def schema_for(name):
    # Presets prefix some outputs (e.g. tau1_scan.json).
    for suffix, schema in SCHEMA_FOR.items():
        if name == suffix or name.endswith("_" + suffix):
            return schema
    return None


CSV_HEADERS = {
    "trajectory.csv": None,  # column count depends on the model dimension
    "norm_trace.csv": "t,norm",
    "fig7.csv": "tau,branch,T,R_LC_Q,R_LC_PC,R_primary,R_secondary",
}


def run(roa, args, out):
    cmd = [roa, *args, "--out", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"{' '.join(cmd)} exited {proc.returncode}\n{proc.stderr}")


def main():
    if len(sys.argv) != 4:
        print(__doc__)
        return 2
    roa, schema_dir, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)

    small_basin = work / "basin_config.json"
    small_basin.write_text(json.dumps({"basin": {"samples": 100, "radius": 2.0}}))

    runs = {
        "simulate": ["--tau", "5", "simulate"],
        "scan": ["--reproduce", "example1", "scan"],
        "spectrum": ["spectrum"],
        "basin": ["--config", str(small_basin), "basin"],
        "orbit": ["orbit"],
        "example1": ["reproduce", "example1"],
        "fig7": ["reproduce", "fig7"],
    }

    validators = {
        name: jsonschema.Draft202012Validator(json.loads((schema_dir / f"{name}.schema.json").read_text()))
        for name in set(SCHEMA_FOR.values())
    }

    failures = 0
    for label, args in runs.items():
        out = work / label
        try:
            run(roa, args, out)
        except RuntimeError as e:
            print(f"FAIL {label}: {e}")
            failures += 1
            continue
        for path in sorted(out.iterdir()):
            if path.suffix == ".json":
                schema = schema_for(path.name)
                if schema is None:
                    continue
                errors = list(validators[schema].iter_errors(json.loads(path.read_text())))
                for err in errors[:5]:
                    loc = "/".join(str(p) for p in err.absolute_path)
                    print(f"FAIL {label}/{path.name} at /{loc}: {err.message}")
                failures += bool(errors)
                if not errors:
                    print(f"ok   {label}/{path.name}")
            elif path.name in CSV_HEADERS:
                expected = CSV_HEADERS[path.name]
                header = path.read_text().split("\n", 1)[0]
                if expected is not None and header != expected:
                    print(f"FAIL {label}/{path.name}: header {header!r}")
                    failures += 1
                else:
                    print(f"ok   {label}/{path.name}")

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
