from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


class FakeProvider:
    """Returns scripted responses in call order; records every request."""

    def __init__(self, responses, model_name: str = "fake"):
        self.responses = list(responses)
        self.model_name = model_name
        self.request_count = 0
        self.calls: list[tuple[str, float]] = []

    def complete(self, prompt: str, *, temperature: float) -> str:
        self.calls.append((prompt, temperature))
        self.request_count += 1
        if not self.responses:
            raise AssertionError("FakeProvider ran out of scripted responses")
        return self.responses.pop(0)


@pytest.fixture
def fake_provider_factory():
    return FakeProvider


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
