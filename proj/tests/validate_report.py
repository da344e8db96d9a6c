#!/usr/bin/env python3
"""Runs every config in a directory through the CLI and checks the reports."""
import copy
import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def strip(obj):
    if isinstance(obj, dict):
        return {k: strip(v) for k, v in obj.items() if k not in ("timing_ms", "total_timing_ms")}
    if isinstance(obj, list):
        return [strip(v) for v in obj]
    return obj


def run(exe, args):
    p = subprocess.run([exe] + args, capture_output=True, text=True)
    return p.returncode, p.stdout


def main():
    exe, schema_path, cfg_dir = sys.argv[1:4]
    with open(schema_path) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    with open(os.path.join(cfg_dir, "expectations.json")) as f:
        expect = json.load(f)
    failures = []

    def check(cond, msg):
        print(("ok    " if cond else "FAIL  ") + msg)
        if not cond:
            failures.append(msg)

    for name in sorted(expect):
        path = os.path.join(cfg_dir, name)
        want = expect[name]
        code, out = run(exe, ["run", "--config", path])
        check(code == want["exit"], f"{name}: exit code {code}, expected {want['exit']}")
        report = json.loads(out)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        check(not errors, f"{name}: schema" + ("" if not errors else f" ({errors[0].message[:200]})"))
        check(json.dumps(report, indent=2, ensure_ascii=False) + "\n" == out, f"{name}: JSON round-trip")
        code2, out2 = run(exe, ["run", "--config", path])
        check(code2 == code and strip(json.loads(out2)) == strip(report), f"{name}: deterministic apart from timings")
        if "theta" not in report.get("checks", {}):
            code3, text = run(exe, ["run", "--config", path, "--format", "text"])
            check(code3 == code and text.startswith("soliton report"), f"{name}: text format")
            with tempfile.TemporaryDirectory() as tmp:
                dest = os.path.join(tmp, "r.json")
                code4, _ = run(exe, ["run", "--config", path, "--out", dest])
                with open(dest) as f:
                    same = strip(json.load(f)) == strip(report)
                check(code4 == code and same, f"{name}: --out writes the same report")

        if "error_fields" in want:
            fields = [e["field"] for e in report.get("config_errors", [])]
            check(all(f in fields for f in want["error_fields"]), f"{name}: error fields {fields}")
        if want.get("no_checks"):
            check(report["checks"] == {} and report["extensions"] == [], f"{name}: empty sections")
        theta = report.get("checks", {}).get("theta", {}).get("details", {})
        if "certified" in want:
            check(theta.get("certified") == want["certified"], f"{name}: {theta.get('certified')} certified")
        if "certified_at_least" in want:
            check(theta.get("certified", 0) >= want["certified_at_least"], f"{name}: at least {want['certified_at_least']} certified")
        if "groups" in want:
            got = [[g["level"], g["component"], g["certified"]] for g in theta.get("groups", [])]
            check(got == want["groups"], f"{name}: certificate groups {got}")
        if "full_count" in want:
            full = report["checks"]["torsion"]["details"].get("full", {})
            check(full.get("count") == want["full_count"], f"{name}: full torsion count {full.get('count')}")
        if "e11" in want:
            cf = report["checks"]["formal-log"]["details"]["closed_form_e11"]
            got = [c["binomial"] for c in cf if c["match"]][: len(want["e11"])]
            check(got == want["e11"], f"{name}: closed-form e11 {got}")
        if theta.get("certificates"):
            bad = copy.deepcopy(report)
            del bad["checks"]["theta"]["details"]["certificates"][0]["pn_torsion"]
            check(not validator.is_valid(bad), f"{name}: schema rejects a certificate without evidence")
            bad = copy.deepcopy(report)
            bad["checks"]["theta"]["details"]["certificates"][0]["theta"]["window"]["tail_dim"] = -1
            check(not validator.is_valid(bad), f"{name}: schema rejects a certificate with an open window")
        for cert in theta.get("certificates", []):
            if cert["status"] == "certified":
                ok = cert["theta"]["verdict"] == "OutsideTheta-certified" and cert["pn_torsion"]["ok"]
                if not ok:
                    check(False, f"{name}: certificate {cert['id']} lacks evidence")

    for sub in ["gaps", "hasse-witt", "formal-log", "torsion"]:
        code, out = run(exe, [sub])
        report = json.loads(out)
        check(code == 0 and list(report["checks"]) == [sub] and validator.is_valid(report), f"shortcut {sub}")
    code, out = run(exe, ["formal-log", "--family", "hyperelliptic-x5x", "-p", "17", "-g", "2"])
    check(code == 0 and json.loads(out)["checks"]["formal-log"]["details"]["closed_form_e11"][0]["binomial"] == "28",
          "shortcut formal-log on y^2 = x^5 + x")
    env = dict(os.environ, SOLITON_PRECISION="12")
    p = subprocess.run([exe, "gaps"], capture_output=True, text=True, env=env)
    check(json.loads(p.stdout)["config"]["precision"] == 12, "precision override from the environment")
    code, out = run(exe, ["gaps", "-p", "13"])
    check(code == 3 and validator.is_valid(json.loads(out)), "shortcut with an invalid prime class")
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
        f.write("{not json")
        bad = f.name
    code, out = run(exe, ["run", "--config", bad])
    os.unlink(bad)
    check(code == 3 and validator.is_valid(json.loads(out)), "malformed config file")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
