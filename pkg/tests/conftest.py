"""Prints one pass/fail line per acceptance criterion after the run."""

import re

CRITERIA = {
    1: "counterexample gap (C_WSK vs key rate at the reconciliation optimum)",
    2: "optimizer agrees with the closed forms to 1e-3",
    3: "Gaussian curves ordered, increasing, constraint channel exact",
    4: "uniform quantizer gap within its bound, decaying at slope <= -1",
    5: "optimized partitions increase in L and approach capacity",
    6: "protocol error rate falls with block length, < 0.15 at n = 12",
    7: "hash collisions 2-universal, key distance within leftover bound",
    8: "rate and key objectives convex along 1000 random mixtures",
    9: "fixed seeds give byte-identical command output",
}

_PAT = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    seen = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in rep.nodeid:
                continue
            m = _PAT.search(rep.nodeid)
            if m:
                seen[int(m.group(1))] = outcome
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(seen):
        status = "PASS" if seen[num] == "passed" else "FAIL"
        terminalreporter.write_line(
            f"criterion {num}: {status} - {CRITERIA.get(num, '')}")
