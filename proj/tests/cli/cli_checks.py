#!/usr/bin/env python3
"""Behavioral checks for the ustat-boot command line tool.

Run as: cli_checks.py <path-to-ustat-boot>
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile

FAILURES = []


def check(name, condition, detail=""):
    status = "ok" if condition else "FAIL"
    print(f"[{status}] {name}" + (f" ({detail})" if detail and not condition else ""))
    if not condition:
        FAILURES.append(name)


def run(binary, args, cwd):
    return subprocess.run([binary] + args, capture_output=True, text=True, cwd=cwd)


def main():
    binary = os.path.abspath(sys.argv[1])
    work = tempfile.mkdtemp(prefix="ustatboot_cli_")
    os.chdir(work)

    data = os.path.join(work, "data.csv")
    with open(data, "w") as f:
        f.write("x\n")  # header row, auto-detected
        for i in range(40):
            f.write(f"{(i * 37 % 11) - 5}.{i % 7}\n")

    # --- ustat ---------------------------------------------------------
    r = run(binary, ["ustat", data, "--kernel", "mean"], work)
    check("ustat exits 0", r.returncode == 0, r.stderr)
    out = json.loads(r.stdout)
    check("ustat reports n and skips the header", out["n"] == 40)
    check("ustat mean equals v", out["u"] == out["v"])

    two_col = os.path.join(work, "two.csv")
    with open(two_col, "w") as f:
        f.write("1,2\n3,4\n5,7\n")
    r = run(binary, ["ustat", two_col, "--kernel", "cov",
                     "--matrix-out", "cov.csv"], work)
    check("ustat cov with matrix output", r.returncode == 0 and
          os.path.exists(os.path.join(work, "cov.csv")), r.stderr)

    ragged = os.path.join(work, "ragged.csv")
    with open(ragged, "w") as f:
        f.write("1,2\n3\n")
    r = run(binary, ["ustat", ragged], work)
    check("ragged row exits 2", r.returncode == 2)
    check("ragged row names the line", "row 2" in r.stderr)

    r = run(binary, ["ustat", os.path.join(work, "missing.csv")], work)
    check("missing file exits 2", r.returncode == 2)

    # --- boot ----------------------------------------------------------
    boot_args = ["boot", data, "--kernel", "mean", "--method", "mult",
                 "--B", "200", "--stat", "absmax", "--scale", "raw",
                 "--alpha", "0.9,0.95", "--seed", "42"]
    r1 = run(binary, boot_args, work)
    r2 = run(binary, boot_args, work)
    check("boot exits 0", r1.returncode == 0, r1.stderr)
    check("boot is deterministic", r1.stdout == r2.stdout)
    out = json.loads(r1.stdout)
    check("boot reports both quantiles", len(out["quantiles"]) == 2)
    check("boot quantiles are monotone",
          out["quantiles"][0]["value"] <= out["quantiles"][1]["value"])

    r3 = run(binary, boot_args + ["--threads", "1"], work)
    r4 = run(binary, boot_args + ["--threads", "8"], work)
    check("thread count never changes numbers", r3.stdout == r4.stdout)

    env = os.environ.copy()
    env["USTAT_BOOT_THREADS"] = "3"
    r5 = subprocess.run([binary] + boot_args, capture_output=True, text=True,
                        cwd=work, env=env)
    check("thread env fallback never changes numbers", r5.stdout == r1.stdout)

    r = run(binary, ["boot", data, "--kernel", "mean", "--stat", "offabsmax"], work)
    check("offabsmax on mean kernel exits 2", r.returncode == 2)

    dump = os.path.join(work, "draws.txt")
    r = run(binary, ["boot", data, "--kernel", "mean", "--B", "50",
                     "--seed", "1", "--dump-draws", dump], work)
    check("dump-draws writes one line per draw",
          r.returncode == 0 and sum(1 for _ in open(dump)) == 50)

    # boot's rescaled absmax quantile at 1-alpha is exactly the beta=1
    # threshold for the same seed
    r = run(binary, ["boot", two_col, "--kernel", "cov", "--method", "mult",
                     "--B", "100", "--stat", "absmax", "--scale", "rescaled",
                     "--alpha", "0.9", "--seed", "5"], work)
    q90 = json.loads(r.stdout)["quantiles"][0]["value"]

    # --- threshold -----------------------------------------------------
    r1 = run(binary, ["threshold", two_col, "--alpha", "0.1", "--beta", "1.0",
                      "--B", "100", "--seed", "5"], work)
    r2 = run(binary, ["threshold", two_col, "--alpha", "0.1", "--beta", "0.5",
                      "--B", "100", "--seed", "5"], work)
    check("threshold exits 0", r1.returncode == 0, r1.stderr)
    t1 = json.loads(r1.stdout)["tau_star"]
    t2 = json.loads(r2.stdout)["tau_star"]
    check("halving beta doubles tau_star", t2 == 2.0 * t1)
    check("beta=1 threshold equals the boot quantile", t1 == q90)
    check("threshold writes the matrix csv",
          os.path.exists(os.path.join(work, "thresholded.csv")))

    # --- test ----------------------------------------------------------
    r = run(binary, ["ustat", two_col, "--kernel", "cov",
                     "--matrix-out", "null.csv"], work)
    r = run(binary, ["test", "cov", two_col, "--null", "null.csv",
                     "--B", "100", "--seed", "2"], work)
    check("test cov exits 0", r.returncode == 0, r.stderr)
    out = json.loads(r.stdout)
    check("test against own covariance does not reject",
          out["statistic"] == 0.0 and out["reject"] is False)

    r = run(binary, ["test", "kendall", two_col, "--null", "null.csv",
                     "--B", "50"], work)
    check("kendall test rejects out-of-range null entries", r.returncode == 2)

    # --- simulate ------------------------------------------------------
    outdir = os.path.join(work, "cell")
    sim_args = ["simulate", "--model", "m1", "--dep", "d3", "--n", "40",
                "--p", "3", "--reps", "100", "--seed", "7", "--out", outdir]
    r = run(binary, sim_args, work)
    check("simulate exits 0", r.returncode == 0, r.stderr)
    for name in ["summary.json", "draws_max.csv", "draws_absmax.csv",
                 "cdf_max.csv", "cdf_absmax.csv", "manifest.json"]:
        check(f"simulate writes {name}",
              os.path.exists(os.path.join(outdir, name)))
    summary = json.load(open(os.path.join(outdir, "summary.json")))
    check("summary has the cell keys",
          all(k in summary for k in ["model", "dep", "n", "p", "R", "ks", "seed"]))

    r = run(binary, sim_args, work)
    check("existing outputs exit 2 without --force", r.returncode == 2)
    draws_before = open(os.path.join(outdir, "draws_max.csv")).read()
    r = run(binary, sim_args + ["--force"], work)
    check("--force reruns", r.returncode == 0, r.stderr)
    draws_after = open(os.path.join(outdir, "draws_max.csv")).read()
    check("replay is byte-identical", draws_before == draws_after)

    manifest = json.load(open(os.path.join(outdir, "manifest.json")))
    check("manifest records the command", manifest["command"] == "simulate")
    check("manifest records the seed", manifest["seed"] == 7)

    shutil.rmtree(work, ignore_errors=True)
    if FAILURES:
        print(f"{len(FAILURES)} cli check(s) failed")
        return 1
    print("all cli checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
