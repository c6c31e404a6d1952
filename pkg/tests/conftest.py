"""Shared fixtures: the standard probe pulse and catalog law builders."""

from __future__ import annotations

import numpy as np
import pytest

from thermoevo import (
    ModelFamily,
    ModelSpec,
    WeightedSignal,
    assemble_material_law,
    canonical_spec,
)

#: families whose canonical coefficients satisfy the certified hypotheses
ALL_FAMILIES = [f for f in ModelFamily if f is not ModelFamily.CUSTOM]

#: single-hypothesis negations used as violated fixtures (one per named model)
NEGATED_COEFFS = {
    ModelFamily.LORD_SHULMAN: {"a0": -1.0},
    ModelFamily.GREEN_NAGHDI_I: {"k": -1.0},
    ModelFamily.GREEN_NAGHDI_II: {"k_star": -1.0},
    ModelFamily.GREEN_NAGHDI_III: {"k": -1.0},
    ModelFamily.GREEN_LINDSAY: {"h": -1.0},
    ModelFamily.DPL_I: {"n2": -0.25},
    ModelFamily.DPL_II: {"n2": -0.75},
}


def spec_with(family, **overrides) -> ModelSpec:
    coeffs = dict(canonical_spec(family).coefficients)
    coeffs.update(overrides)
    return ModelSpec(family, coeffs)


def uncoupled_law(family):
    """Canonical law with the thermoelastic coupling turned off."""
    return assemble_material_law(spec_with(family, Gamma=0.0))


def negated_law(family):
    return assemble_material_law(spec_with(family, **NEGATED_COEFFS[family]))


def make_probe(dt: float = 5e-4, rho: float = 1.0) -> WeightedSignal:
    """Standard smooth probe: Gaussian pulse well inside a [0, 4] window."""
    t = dt * np.arange(int(round(4.0 / dt)) + 1)
    return WeightedSignal(t, np.exp(-(((t - 1.25) / 0.25) ** 2)), rho)


def random_smooth(rng, t: np.ndarray, rho: float) -> WeightedSignal:
    """Random smooth compactly supported signal on the given grid."""
    span = t[-1] - t[0]
    center = t[0] + 0.5 * span
    envelope = np.zeros_like(t)
    x = (t - center) / (0.4 * span)
    inside = np.abs(x) < 1.0
    envelope[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    waves = sum(
        rng.uniform(-1, 1) * np.sin(2 * np.pi * rng.uniform(0.2, 2.0) * t + rng.uniform(0, 7))
        for _ in range(4)
    )
    return WeightedSignal(t, envelope * waves, rho)


@pytest.fixture
def probe() -> WeightedSignal:
    return make_probe()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
