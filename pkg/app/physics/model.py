"""Physical parameters, cavity dispersion and excitation-photon couplings.

The lattice of two-level atoms sits in the mid-plane (z = 0) of a planar cavity
of mirror spacing L. For in-plane wave vector k the cavity supports an s (TE)
and a p (TM) photon of frequency ω_km = c·sqrt(k² + (mπ/L)²). A transition
dipole μ along x̂, at angle θ to ê_k, couples to them through

    ħ f_s = i C_k s_m sinθ,        ħ f_p = C_k (ω_0m/ω_k) s_m cosθ,

with C_k = sqrt(ħ ω_k μ² / (L a² ε0)), ω_0m = c·m·π/L and s_m = sin(mπ/2)
the mode profile at z = 0 (1 for m = 1).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from scipy import constants

from app.exceptions import InvalidParameterError
from app.physics import units


@dataclass(frozen=True)
class ModelConfig:
    """Physical constants and device parameters, SI with angular frequencies."""

    omega_A: float
    mu: float
    a: float
    L: Optional[float] = None
    m_index: int = 1
    c: float = constants.c
    hbar: float = constants.hbar
    eps0: float = constants.epsilon_0
    L_derived: bool = field(default=False, init=False)

    def __post_init__(self):
        problems = []
        if not self.omega_A > 0:
            problems.append(f"omega_A must be > 0, got {self.omega_A}")
        if not self.mu >= 0:
            problems.append(f"mu must be >= 0, got {self.mu}")
        if not self.a > 0:
            problems.append(f"a must be > 0, got {self.a}")
        if self.L is not None and not self.L > 0:
            problems.append(f"L must be > 0, got {self.L}")
        if int(self.m_index) != self.m_index or self.m_index < 1:
            problems.append(f"m_index must be an integer >= 1, got {self.m_index}")
        for name in ("c", "hbar", "eps0"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0")
        if problems:
            raise InvalidParameterError("; ".join(problems))

        if self.L is None:
            # resonance of the (k=0, m) mode with the transition
            object.__setattr__(self, "L", self.c * self.m_index * math.pi / self.omega_A)
            object.__setattr__(self, "L_derived", True)

    @classmethod
    def from_lab_units(
        cls,
        omega_A_over_2pi_Hz: float,
        mu_eA: float,
        a_m: float,
        L_m: Optional[float] = None,
        m_index: int = 1,
        **overrides,
    ) -> "ModelConfig":
        """Build a config from the I/O units (Hz, e·Å, m)."""
        return cls(
            omega_A=units.hz_to_angular(omega_A_over_2pi_Hz),
            mu=units.eA_to_dipole(mu_eA),
            a=a_m,
            L=L_m,
            m_index=m_index,
            **overrides,
        )

    @property
    def omega_0(self) -> float:
        """Cavity cutoff ω_0 = c·m·π/L of the configured mode."""
        return self.c * self.m_index * math.pi / self.L

    @property
    def mode_profile(self) -> float:
        """sin(mπ/2): field amplitude of mode m at the lattice plane z = 0."""
        return mode_profile_at_lattice(self.m_index)


@dataclass(frozen=True)
class ProbePoint:
    """In-plane wavenumber |k| (1/m) and dipole-to-ê_k angle θ (rad, stored mod 2π)."""

    k: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.k >= 0 and math.isfinite(self.k)):
            raise InvalidParameterError(f"k must be finite and >= 0, got {self.k}")
        if not math.isfinite(self.theta):
            raise InvalidParameterError(f"theta must be finite, got {self.theta}")
        object.__setattr__(self, "theta", self.theta % units.TWO_PI)

    @classmethod
    def from_lab_units(cls, k_per_angstrom: float, theta_rad: float = 0.0) -> "ProbePoint":
        return cls(k=units.per_angstrom_to_per_m(k_per_angstrom), theta=theta_rad)


@dataclass(frozen=True)
class CouplingSet:
    """Couplings and detuning at one probe point (angular frequencies, J for C_k)."""

    omega_k: float
    delta_k: float
    C_k: float
    f_s: complex
    f_p: complex

    @property
    def f_abs(self) -> float:
        """|f| = sqrt(|f_s|² + |f_p|²)."""
        return math.hypot(abs(self.f_s), abs(self.f_p))


def mode_profile_at_lattice(m: int) -> float:
    """sin(mπ/2) evaluated exactly: 0 for even m, ±1 for odd m."""
    if m % 2 == 0:
        return 0.0
    return 1.0 if (m // 2) % 2 == 0 else -1.0


def cavity_dispersion(cfg: ModelConfig, k: float, m: Optional[int] = None) -> float:
    """Cavity photon angular frequency ω_km = c·sqrt(k² + (mπ/L)²)."""
    m = cfg.m_index if m is None else m
    if m < 1:
        raise InvalidParameterError(
            f"mode index m={m} is outside the modeled range (m >= 1 only)"
        )
    if k < 0:
        raise InvalidParameterError(f"k must be >= 0, got {k}")
    return cfg.c * math.hypot(k, m * math.pi / cfg.L)


def cavity_shift(cfg: ModelConfig, k: float) -> float:
    """ω_k − ω_0 for the configured mode, free of cancellation at small k."""
    q = cfg.m_index * math.pi / cfg.L
    return cfg.c * k * k / (math.hypot(k, q) + q)


def coupling_scale(cfg: ModelConfig, omega_k: float) -> float:
    """C_k = sqrt(ħ ω_k μ² / (L a² ε0)), in joules."""
    if not omega_k > 0:
        raise InvalidParameterError(f"omega_k must be > 0, got {omega_k}")
    return cfg.mu * math.sqrt(cfg.hbar * omega_k / (cfg.L * cfg.a * cfg.a * cfg.eps0))


def coupling_constants(cfg: ModelConfig, p: ProbePoint) -> CouplingSet:
    """TE/TM coupling constants f_s, f_p and the detuning δ_k at ``p``."""
    omega_k = cavity_dispersion(cfg, p.k)
    C_k = coupling_scale(cfg, omega_k)
    scale = C_k / cfg.hbar * cfg.mode_profile

    f_s = complex(0.0, scale * math.sin(p.theta))
    f_p = complex(scale * (cfg.omega_0 / omega_k) * math.cos(p.theta), 0.0)

    detuning = cavity_shift(cfg, p.k) + (cfg.omega_0 - cfg.omega_A)
    return CouplingSet(
        omega_k=omega_k,
        delta_k=0.5 * detuning,
        C_k=C_k,
        f_s=f_s,
        f_p=f_p,
    )
