import json
import math

import pytest

from app.physics.model import ModelConfig, ProbePoint
from app.physics.spectra import DampingConfig

PAPER_CONFIG = {
    "omega_A_over_2pi_Hz": 2.5e14,
    "mu_eA": 2.0,
    "a_m": 2e-7,
    "gamma_over_2pi_Hz": 1e9,
    "Gamma_ex_over_2pi_Hz": 1e8,
}


@pytest.fixture
def paper_model():
    """Resonant cavity with the published lattice parameters."""
    return ModelConfig.from_lab_units(omega_A_over_2pi_Hz=2.5e14, mu_eA=2.0, a_m=2e-7)


@pytest.fixture
def paper_damping():
    """γ/2π = 1 GHz mirrors, Γ_ex/2π = 100 MHz."""
    return DampingConfig.from_lab_units(Gamma_ex_over_2pi_Hz=1e8, gamma_over_2pi_Hz=1e9)


@pytest.fixture
def lossless_damping(paper_damping):
    """Same mirrors, no excitation damping."""
    return DampingConfig.symmetric(paper_damping.gamma)


@pytest.fixture
def paper_probe():
    """k = 5e-7 1/Å at θ = π/4."""
    return ProbePoint(k=5e3, theta=math.pi / 4)


@pytest.fixture
def config_file(tmp_path):
    """Published parameter set written as a JSON config."""
    path = tmp_path / "config.json"
    path.write_text(json.dumps(PAPER_CONFIG), encoding="utf-8")
    return path
