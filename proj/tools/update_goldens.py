#!/usr/bin/env python3
# Copyright 2026 The PriceScope Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates tests/golden/ from the shipped fixtures with the analytic backend.

    python3 tools/update_goldens.py [--bin build/pricescope]

Review the diff before committing: goldens are meant to change only on purpose.
"""

import argparse
import json
import subprocess
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
REPORTS = {
    "uwulend_report.json": "fixtures/uwulend.json",
    "pattern_I_report.json": "fixtures/patterns/pattern_I.json",
}
PROMPT_HEADER = "### llm-type1 uwuLendingPool segment 1 "


def scan(binary, fixture):
    run = subprocess.run([binary, "scan", "--fixture", fixture, "--backend", "analytic"], cwd=ROOT,
                         capture_output=True, text=True)
    if run.returncode not in (0, 2):
        raise SystemExit(run.stderr)
    report = json.loads(run.stdout)
    report.pop("timings")
    return report


def uwulend_prompt(binary):
    run = subprocess.run([binary, "report", "--fixture", "fixtures/uwulend.json", "--prompts", "--backend",
                          "llm-type1", "--sources", "fixtures/bundles/uwulend"], cwd=ROOT, capture_output=True,
                         text=True, check=True)
    blocks = run.stdout.split("### ")
    for b in blocks:
        if ("### " + b).startswith(PROMPT_HEADER):
            body = b.split("\n", 1)[1]
            return body[:-1] if body.endswith("\n\n") else body
    raise SystemExit("swap-segment prompt not found")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bin", default=str(ROOT / "build" / "pricescope"))
    binary = ap.parse_args().bin
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, fixture in REPORTS.items():
        (GOLDEN / name).write_text(json.dumps(scan(binary, fixture), indent=2, sort_keys=True) + "\n")
    (GOLDEN / "uwulend_type1_prompt.txt").write_text(uwulend_prompt(binary))


if __name__ == "__main__":
    main()
