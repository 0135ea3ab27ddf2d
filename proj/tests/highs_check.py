"""Cross-checks exported models against HiGHS. Skips when highspy is absent.

Usage: highs_check.py <path-to-gss>
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

SKIP = 77
TOL = 1e-6

try:
    import highspy
except ImportError:
    print("highspy not available, skipping")
    sys.exit(SKIP)


def highs_optimum(mps):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-9)
    h.readModel(str(mps))
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    return status, h.getInfo().objective_function_value


def run(gss, *args):
    subprocess.run([gss, *map(str, args)], check=True, stdout=subprocess.DEVNULL)


def main():
    gss = sys.argv[1]
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp)
        for seed in (1, 2, 3):
            inst = work / f"i{seed}.json"
            rep = work / f"r{seed}.json"
            run(gss, "gen", "--seed", seed, "--out", inst)
            run(gss, "solve", "--instance", inst, "--report", rep, "--rel-gap", 1e-9)
            ours = json.loads(rep.read_text())
            for mode, key in (("cost", "z1_star"), ("emission", "z2_star"), ("quality", "z3_star"), ("combined", "z_total")):
                mps = work / f"{mode}{seed}.mps"
                extra = ["--report", rep] if mode == "combined" else []
                run(gss, "export-mps", "--instance", inst, "--mode", mode, "--out", mps, *extra)
                status, theirs = highs_optimum(mps)
                gap = abs(ours[key] - theirs) / max(1.0, abs(theirs))
                ok = status == "Optimal" and gap <= TOL
                failures += not ok
                print(f"{'ok  ' if ok else 'FAIL'} seed {seed} {mode}: ours {ours[key]!r} highs {theirs!r} ({status})")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
