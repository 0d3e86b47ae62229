#!/usr/bin/env python3
"""End-to-end checks of the command-line tool: output values, formats,
exit-code contract and JSON/text round trip."""

import json
import os
import subprocess
import sys
import tempfile

CLI = sys.argv[1]
SRC = sys.argv[2]

failures = 0


def run(*args, expect_code=0):
    global failures
    r = subprocess.run([CLI, *args], capture_output=True, text=True)
    tag = " ".join(args[:3])
    if r.returncode != expect_code:
        print(f"[FAIL] {tag}: exit {r.returncode}, expected {expect_code}\n"
              f"  stdout: {r.stdout[:400]}\n  stderr: {r.stderr[:400]}")
        failures += 1
    else:
        print(f"[PASS] {tag}: exit {r.returncode}")
    return r


def expect_in(text, needle, label):
    global failures
    if needle in text:
        print(f"[PASS] {label}")
    else:
        print(f"[FAIL] {label}: missing {needle!r} in:\n{text[:600]}")
        failures += 1


sim_small = os.path.join(SRC, "tests", "data", "sim_small.csv")

# --- table ------------------------------------------------------------------
r = run("table", "--a", "1", "--b", "5", "--c", "1", "--d", "11")
expect_in(r.stdout, "2.00", "table prints RR 2.00")
expect_in(r.stdout, "2.20", "table prints OR 2.20")

r = run("table", "--a", "1", "--b", "1", "--c", "1", "--d", "1")
expect_in(r.stdout, "1.00", "null table prints 1.00")

r = run("table", "--a", "0", "--b", "5", "--c", "1", "--d", "11")
expect_in(r.stdout, "0.00", "zero-cell table prints 0.00")
expect_in(r.stdout, "degenerate", "zero-cell table flags the interval")

run("table", "--a", "1", "--b", "0", "--c", "1", "--d", "11", expect_code=2)
run("table", "--a", "1", expect_code=2)  # missing required flags

# --- orerr ------------------------------------------------------------------
r = run("orerr", "--p0", "0.1", "--rr", "5")
expect_in(r.stdout, "1.80", "orerr forward 1.80")
r = run("orerr", "--p0", "0.001", "--rr", "10")
expect_in(r.stdout, "1.01", "orerr forward 1.01")
r = run("orerr", "--p0", "0.0001", "--rr", "5")
expect_in(r.stdout, "1.0004", "orerr forward 1.0004")
r = run("orerr", "--or", "2.2", "--p0", "0.0833333")
expect_in(r.stdout, "RR 2.00", "orerr inversion to RR 2.00")
r = run("orerr", "--p0", "0.5", "--rr", "3", expect_code=2)
expect_in(r.stderr, "1/p0", "infeasible pair explains the bound")

# --- fit --------------------------------------------------------------------
r = run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
        "--covariates", "z1,z2", "--method", "irls")
expect_in(r.stdout, "1.75", "irls fit point estimate")

r = run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
        "--covariates", "z1,z2", "--method", "poisson", "--se", "sandwich")
expect_in(r.stdout, "GLM (Se=sandwich)", "poisson alias labels the row")

run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
    "--method", "nope", expect_code=2)
run("fit", "--data", "/no/such/file.csv", "--outcome", "y", "--exposure", "x",
    "--method", "irls", expect_code=2)
run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
    "--method", "mh", expect_code=2)  # --by is required for mh

# infeasible start is an input error
run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
    "--covariates", "z1,z2", "--method", "irls", "--start", "0,0,0,0",
    expect_code=2)

# --- json/text round trip ----------------------------------------------------
r = run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
        "--covariates", "z1,z2", "--method", "wee:20", "--format", "json")
doc = json.loads(r.stdout)
assert doc["kind"] == "rr-report"
r2 = run("fit", "--data", sim_small, "--outcome", "y", "--exposure", "x",
         "--covariates", "z1,z2", "--method", "wee:20")
rendered = r2.stdout
row = doc["rows"][0]
expect_in(rendered, f"{row['rr']:.2f}", "json rr matches text rendering")
expect_in(rendered, "Weighted EE (M=20", "wee labels carry the order")

# --- simulate -----------------------------------------------------------------
with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as f:
    f.write("""label = cli_demo
n = 200
[covariate z]
dist = uniform
[exposure]
coefs = 0.0, 0.0
[outcome]
kind = logbin
coefs = -1.2, 0.1, 0.3
[study]
reps = 8
seed = 3
methods = crude, wee:0
""")
    cfg_path = f.name

r = run("simulate", "--config", cfg_path)
expect_in(r.stdout, "method\treps", "simulate prints the tsv header")
expect_in(r.stdout, "wee:0", "simulate covers requested methods")
ra = run("simulate", "--config", cfg_path)
if ra.stdout == r.stdout:
    print("[PASS] simulate is deterministic for a fixed config")
else:
    print("[FAIL] simulate output changed between identical runs")
    failures += 1
rb = run("simulate", "--config", cfg_path, "--seed", "99")
if rb.stdout != r.stdout:
    print("[PASS] seed override changes the draw")
else:
    print("[FAIL] seed override had no effect")
    failures += 1
r = run("simulate", "--config", cfg_path, "--format", "json")
doc = json.loads(r.stdout)
assert doc["methods"][0]["method"] == "crude"
run("simulate", "--config", "/no/such.cfg", expect_code=2)
os.unlink(cfg_path)

# --- boundary preset ----------------------------------------------------------
with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as f:
    f.write("preset = boundary\n[study]\nreps = 12\nseed = 5\n")
    cfg_path = f.name
r = run("simulate", "--config", cfg_path)
lines = [l for l in r.stdout.splitlines() if not l.startswith(("#", "method"))]
rates = {l.split("\t")[0]: float(l.split("\t")[2]) for l in lines}
if rates["ab"] > rates["irls"]:
    print(f"[PASS] boundary preset: ab rate {rates['ab']} > irls rate {rates['irls']}")
else:
    print(f"[FAIL] boundary preset: ab rate {rates['ab']} <= irls {rates['irls']}")
    failures += 1
os.unlink(cfg_path)

# --- nhefs-report (structure check on schema error) ----------------------------
with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as f:
    f.write("income,marital\n10,2\n")
    bad_csv = f.name
r = run("nhefs-report", "--data", bad_csv, expect_code=2)
expect_in(r.stderr, "wt82_71", "schema error names the missing column")
os.unlink(bad_csv)

# --- nhefs-report on the real file, if present ---------------------------------
nhefs = os.environ.get("RRREG_NHEFS", os.path.join(SRC, "data", "nhefs.csv"))
if os.path.exists(nhefs):
    r = run("nhefs-report", "--data", nhefs, "--boot", "0", "--format", "json")
    doc = json.loads(r.stdout)
    assert len(doc["rows"]) == 8
    print("[PASS] nhefs-report emits the eight-row table")
else:
    print("[SKIP] nhefs-report full run (no dataset present)")

print(f"\n{failures} failure(s)")
sys.exit(1 if failures else 0)
