"""Per-criterion summary for the acceptance suite.

Tests named ``test_criterion_NN_*`` are tracked individually and the
terminal summary gets one PASS/FAIL line per criterion, so a plain
``pytest`` run doubles as the acceptance report.
"""

import re

_CRITERION = re.compile(r"test_criterion_(\d{2})")

_LABELS = {
    1: "tree properties and elementary weights",
    2: "tree counts and small-order listings",
    3: "split multisets of the five-node example",
    4: "two-stage family series coefficients",
    5: "composed half-steps: coefficients and order",
    6: "two-stage family modified equation",
    7: "Euler modified equation, predator-prey system",
    8: "midpoint modified equation, nonlinear oscillator",
    9: "midpoint modifying integrator, nonlinear oscillator",
    10: "fifth-power cancellation, nonlinear oscillator",
    11: "substitution round trips and group laws",
    12: "scalar linear ODE coefficient oracles",
    13: "energy conservation in simulation",
    14: "order-9 runtime budget",
    15: "zero-skeleton skip is observationally invisible",
}

_outcomes: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    n = int(m.group(1))
    if report.failed:
        _outcomes[n] = False
    elif report.when == "call" and report.passed:
        _outcomes.setdefault(n, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(_outcomes):
        ok = _outcomes[n]
        label = _LABELS.get(n, "")
        line = f"criterion {n:02d}: {'PASS' if ok else 'FAIL'}  ({label})"
        terminalreporter.write_line(line, green=ok, red=not ok)
