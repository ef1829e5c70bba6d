import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {name: json.loads((schema_dir / f"{name}.schema.json").read_text())
           for name in ("diagnostics", "certificates", "reports", "hardy")}

configs = {
    "dirichlet_1d": """seed = 5
[domain]
kind = interval
bounds = -1,1
n = 40
bc = dirichlet
[coefficients]
a = 1
b = -i
c = 0
m = 0.5
[source]
name = constant
amplitude = 2
[solver]
symmetry = even
""",
    "neumann_2d": """seed = 2
[domain]
kind = rectangle
bounds = 0,1,0,1
n = 12,12
bc = neumann
[coefficients]
a = 1
b = 1
c = 1
m = 0.3
[potential]
name = harmonic
[source]
name = random_smooth
amplitude = 1
""",
    "weighted_1d": """seed = 9
[domain]
kind = interval
bounds = 0,1
n = 64
bc = dirichlet
[coefficients]
a = 1
b = 1
c = 0
m = 0.5
[source]
name = delta_pow
amplitude = 1
exponent = 0.6
[weight]
alpha = 0.5
kind = boundary_distance
[hardy]
samples = 6
""",
}

failures = 0


def check(path, name):
    global failures
    try:
        jsonschema.validate(json.loads(path.read_text()), schemas[name])
        print(f"ok   {path.parent.name}/{path.name}")
    except jsonschema.ValidationError as e:
        failures += 1
        print(f"FAIL {path.parent.name}/{path.name}: {e.message}")


with tempfile.TemporaryDirectory() as tmp:
    root = pathlib.Path(tmp)
    for tag, text in configs.items():
        cfg = root / f"{tag}.ini"
        cfg.write_text(text)
        for cmd in ("check", "solve"):
            out = root / f"{tag}_{cmd}"
            rc = subprocess.run([cli, cmd, "--config", str(cfg), "--out", str(out)],
                                capture_output=True, text=True)
            if rc.returncode not in (0, 1):
                failures += 1
                print(f"FAIL {tag} {cmd}: exit {rc.returncode}\n{rc.stderr}")
                continue
            if cmd == "check":
                check(out / "reports.json", "reports")
            else:
                check(out / "diagnostics.json", "diagnostics")
                check(out / "certificates.json", "certificates")
        if tag != "neumann_2d":
            out = root / f"{tag}_hardy"
            subprocess.run([cli, "hardy", "--config", str(cfg), "--out", str(out)], check=True,
                           capture_output=True)
            check(out / "hardy.json", "hardy")

print(f"{failures} schema failures")
sys.exit(1 if failures else 0)
