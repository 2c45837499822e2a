#!/usr/bin/env python3
"""End-to-end checks of the rbsde command line tool.

Usage: test_cli.py <rbsde-binary> <scenario-data-dir>
"""

import subprocess
import sys
import tempfile
from pathlib import Path

BINARY = Path(sys.argv[1])
DATA = Path(sys.argv[2])

passed = 0
failed = []


def run(*args, **kwargs):
    return subprocess.run([str(BINARY), *args], capture_output=True, text=True, **kwargs)


def check(name, cond, context=""):
    global passed
    if cond:
        passed += 1
    else:
        failed.append(f"{name}: {context}")
        print(f"FAIL {name}: {context}")


def expect_exit(name, result, code):
    check(name, result.returncode == code,
          f"exit {result.returncode} != {code}\nstdout:\n{result.stdout}\nstderr:\n{result.stderr}")


def main():
    tmp = Path(tempfile.mkdtemp(prefix="rbsde_cli_"))

    # --- solve: success, CSV shape, reproducibility -------------------------
    out1 = tmp / "a.csv"
    r1 = run("solve", str(DATA / "fmono.json"), "--out", str(out1), "--seed", "5")
    expect_exit("solve exits 0", r1, 0)
    check("solve prints a scenario hash", "scenario-hash:" in r1.stdout, r1.stdout)
    rows = out1.read_text().splitlines()
    n = 16
    check("slice csv row count", len(rows) == 1 + (n + 1) * (n + 2) // 2, str(len(rows)))
    check("slice csv header", rows[0] == "i,j,t,x,Y,Z,dK,L", rows[0])
    path1 = tmp / "a_path.csv"
    check("path csv exists", path1.exists())
    check("path csv rows", len(path1.read_text().splitlines()) == n + 2)

    out2 = tmp / "b.csv"
    r2 = run("solve", str(DATA / "fmono.json"), "--out", str(out2), "--seed", "5")
    check("csv outputs are byte-identical across runs",
          out1.read_bytes() == out2.read_bytes() and
          path1.read_bytes() == (tmp / "b_path.csv").read_bytes())
    hash1 = [l for l in r1.stdout.splitlines() if l.startswith("scenario-hash")]
    hash2 = [l for l in r2.stdout.splitlines() if l.startswith("scenario-hash")]
    check("hash is stable", hash1 == hash2)

    out3 = tmp / "c.csv"
    r3 = run("solve", str(DATA / "fmono.json"), "--out", str(out3), "--seed", "6")
    expect_exit("solve with another seed exits 0", r3, 0)
    check("slice csv does not depend on the seed", out1.read_bytes() == out3.read_bytes())

    hash_other = [l for l in run("solve", str(DATA / "fmono_plus.json")).stdout.splitlines()
                  if l.startswith("scenario-hash")]
    check("hash tracks scenario content", hash1 != hash_other)

    # --- solve: error paths --------------------------------------------------
    r = run("solve", str(DATA / "bad_missing_generator.json"))
    expect_exit("missing generator exits 2", r, 2)
    check("missing generator names the field", "/generator" in r.stderr, r.stderr)

    r = run("solve", str(DATA / "bad_barrier.json"))
    expect_exit("inadmissible barrier exits 2", r, 2)
    check("barrier error names the node", "node" in r.stderr, r.stderr)

    r = run("solve", str(DATA / "contraction.json"))
    expect_exit("contraction violation exits 1", r, 1)
    check("contraction error names the guard", "contraction" in r.stderr, r.stderr)

    r = run("solve", str(tmp / "does_not_exist.json"))
    expect_exit("missing file exits 2", r, 2)

    # --- oracle-quadratic ----------------------------------------------------
    r = run("oracle-quadratic", str(DATA / "quadratic_oracle.json"))
    expect_exit("oracle passes at the default tolerance", r, 0)
    check("oracle prints both roots",
          "Y0 envelope:" in r.stdout and "Y0 solver:" in r.stdout, r.stdout)
    check("oracle prints integrability", "E[exp(2 xi)]" in r.stdout, r.stdout)
    check("no spurious divergence warning", "warning" not in r.stdout, r.stdout)

    r = run("oracle-quadratic", str(DATA / "quadratic_oracle.json"), "--tol", "0")
    expect_exit("zero tolerance reports the discretization gap", r, 1)

    r = run("oracle-quadratic", str(DATA / "constant_touch.json"))
    expect_exit("constant data with a touching barrier agree exactly", r, 0)
    check("constant case reports zero difference", "difference: 0\n" in r.stdout, r.stdout)

    r = run("oracle-quadratic", str(DATA / "fmono.json"))
    expect_exit("non-quadratic generator exits 2", r, 2)

    # --- compare ---------------------------------------------------------------
    r = run("compare", str(DATA / "fmono.json"), str(DATA / "fmono.json"),
            "--hypotheses", "xi,f")
    expect_exit("identical scenarios compare clean", r, 0)

    r = run("compare", str(DATA / "fmono.json"), str(DATA / "fmono_plus.json"),
            "--hypotheses", "xi,f")
    expect_exit("offset driver passes every clause", r, 0)
    check("compare prints the Y clause", "Y1 <= Y2" in r.stdout, r.stdout)

    r = run("compare", str(DATA / "fmono_plus.json"), str(DATA / "fmono.json"),
            "--hypotheses", "f")
    expect_exit("false hypothesis claim exits 2", r, 2)

    # --- sweep -------------------------------------------------------------------
    sweep_csv = tmp / "sweep.csv"
    r = run("sweep", str(DATA / "fmono.json"), "--kind", "lipschitz-n",
            "--values", "1,2,4", "--out", str(sweep_csv))
    expect_exit("flat lipschitz sweep passes", r, 0)
    lines = sweep_csv.read_text().splitlines()
    check("sweep csv header", lines[0] == "param,Y0,diff", lines[0])
    check("sweep csv rows", len(lines) == 4, str(lines))

    r = run("sweep", str(DATA / "quadratic_sweep.json"), "--kind", "lipschitz-n",
            "--values", "2,4,8")
    expect_exit("quadratic lipschitz sweep is monotone", r, 0)

    r = run("sweep", str(DATA / "quadratic_sweep.json"), "--kind", "truncation-C",
            "--values", "2,4,8")
    expect_exit("truncation sweep stabilizes", r, 0)

    r = run("sweep", str(DATA / "fmono.json"), "--kind", "clip-mp", "--values", "1:1,2:2,4:4")
    expect_exit("clip sweep stabilizes", r, 0)

    r = run("sweep", str(DATA / "fmono.json"), "--kind", "lipschitz-n", "--values", "0.1,0.2")
    expect_exit("lipschitz below beta exits 2", r, 2)

    r = run("sweep", str(DATA / "fmono.json"), "--kind", "bogus", "--values", "1,2")
    expect_exit("unknown sweep kind exits 2", r, 2)

    # --- validate -------------------------------------------------------------------
    r = run("validate", str(DATA / "fmono.json"))
    expect_exit("catalog scenario validates", r, 0)
    check("validate prints probe lines", "monotonicity in y" in r.stdout, r.stdout)

    r = run("validate", str(DATA / "bad_barrier.json"))
    expect_exit("barrier above the terminal fails the probe", r, 1)
    check("failing probe is printed", "FAIL terminal dominates barrier" in r.stdout, r.stdout)

    r = run("validate", str(DATA / "bad_missing_generator.json"))
    expect_exit("parse failure exits 2", r, 2)

    # --- verbosity -----------------------------------------------------------
    r = subprocess.run([str(BINARY), "solve", str(DATA / "fmono.json")],
                       capture_output=True, text=True, env={"RBSDE_LOG": "1"})
    expect_exit("verbose solve still exits 0", r, 0)
    check("RBSDE_LOG=1 writes progress to stderr", "[rbsde]" in r.stderr, r.stderr)

    print(f"{passed} checks passed, {len(failed)} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
