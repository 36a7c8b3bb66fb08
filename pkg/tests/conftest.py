from __future__ import annotations

import numpy as np
import pytest

from conic_xi.char_algebra import TorusElement
from conic_xi.model_cones import ConeModel, isolation_margin


def sample_element(rng: np.random.Generator, model: ConeModel,
                   margin: float = 0.25) -> TorusElement:
    """Random torus element with the model's character data nondegenerate."""
    for _ in range(10000):
        g = TorusElement(rng.uniform(0.3, 2 * np.pi - 0.3, model.n))
        if isolation_margin(model, g) >= margin:
            return g
    raise RuntimeError("could not sample a nondegenerate element")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
