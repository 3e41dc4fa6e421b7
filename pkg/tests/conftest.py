import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

# (criterion id, description, passed, detail), filled by test_acceptance.
ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def criterion():
    """Record an acceptance-criterion outcome, then enforce it."""

    def _record(cid, description, passed, detail=""):
        ACCEPTANCE_RESULTS.append((cid, description, bool(passed), detail))
        assert passed, f"criterion {cid} ({description}): {detail}"

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, description, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {cid:>2}: {status}  {description}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
