from __future__ import annotations

from pathlib import Path

import pytest

from app.core.config import get_settings
from app.models.circuit import Circuit
from app.services.netlist import load_circuit, parse_circuit

SAMPLES = Path(__file__).resolve().parents[1] / "samples"


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def sample():
    def _load(name: str) -> Circuit:
        return load_circuit(SAMPLES / name)

    return _load


@pytest.fixture
def formula(sample) -> Circuit:
    return sample("and_or_formula.net")


@pytest.fixture
def fanout_and(sample) -> Circuit:
    return sample("and_fanout2.net")


@pytest.fixture
def binary_chain() -> Circuit:
    # every gate feeds the next one twice, so the input is needed 2**3 times
    return parse_circuit(
        """
        circuit chain3
        gate 1 INPUT
        gate 2 OR 1 1
        gate 3 OR 2 2
        gate 4 OR 3 3
        outputs 4
        """
    )


@pytest.fixture
def override_settings(monkeypatch):
    def _set(**values) -> None:
        for key, value in values.items():
            monkeypatch.setenv(f"STEPCRN_{key.upper()}", str(value))
        get_settings.cache_clear()

    return _set
