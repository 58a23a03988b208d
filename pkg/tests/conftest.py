import pytest
from hypothesis import settings

from clut.circuit import Flavor, LutConfig, build_clut
from clut.params import load_device_params, load_tech_params

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

OR_TABLE = "FFFFFFFFFFFFFFFE"


@pytest.fixture(scope="session")
def device():
    return load_device_params()


@pytest.fixture(scope="session")
def tech():
    return load_tech_params()


@pytest.fixture
def stt_or(device, tech):
    return build_clut(LutConfig.from_hex(OR_TABLE), tech, Flavor.STT, device)


@pytest.fixture
def she_or(device, tech):
    return build_clut(LutConfig.from_hex(OR_TABLE), tech, Flavor.SHE, device)


ACCEPTANCE = {}


def record(number: int, ok: bool, detail: str) -> None:
    """Store and print one acceptance line; the assertion is left to the caller."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
