import os
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


VERIFY_RUNS = {
    "text": ["verify-paper"],
    "text_again": ["verify-paper"],
    "json": ["verify-paper", "--json"],
    "flip": ["verify-paper", "--flip-w-sign"],
}


def run_cli(*args, **kwargs):
    return subprocess.run([sys.executable, "-m", "weyldirac", *args], capture_output=True,
                          text=True, encoding="utf-8", **kwargs)


@pytest.fixture(scope="session")
def verify_runs():
    """The verify-paper invocations, launched concurrently once per session."""
    procs = {k: subprocess.Popen([sys.executable, "-m", "weyldirac", *a], stdout=subprocess.PIPE,
                                 stderr=subprocess.PIPE, text=True, encoding="utf-8")
             for k, a in VERIFY_RUNS.items()}
    out = {}
    for k, p in procs.items():
        stdout, stderr = p.communicate(timeout=300)
        out[k] = subprocess.CompletedProcess(p.args, p.returncode, stdout, stderr)
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
