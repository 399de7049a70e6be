import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_serializer,
    field_validator,
    model_validator,
)

from app.exceptions import ConfigValidationError, SweepSpecError
from app.physics import units
from app.physics.model import ModelConfig
from app.physics.polariton import BranchId, DarkModeConvention
from app.physics.spectra import DampingConfig, IncidentField, Polarization

GRID_UNITS = ("Hz", "rad/s", "1/Å", "1/A", "1/m", "rad", "deg")

SPECTRA_OBSERVABLES = ("T_s", "T_p", "R_s", "R_p", "A", "I_s", "I_p")
PHASE_OBSERVABLES = ("phase_t_s", "phase_t_p", "phase_r_s", "phase_r_p")


class ConfigDocument(BaseModel):
    """Physical configuration as read from JSON, in lab units."""

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    omega_A_over_2pi_Hz: float = Field(..., gt=0, description="Transition frequency")
    mu_eA: float = Field(..., ge=0, description="Transition dipole in e·Å")
    a_m: float = Field(..., gt=0, description="Lattice constant")
    L_m: Optional[float] = Field(default=None, gt=0, description="Mirror spacing")
    m_index: int = Field(default=1, ge=1, description="Perpendicular mode number")
    gamma_over_2pi_Hz: Optional[float] = Field(default=None, gt=0)
    gamma_U_over_2pi_Hz: Optional[float] = Field(default=None, gt=0)
    gamma_L_over_2pi_Hz: Optional[float] = Field(default=None, gt=0)
    Gamma_ex_over_2pi_Hz: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def check_mirror_damping(self) -> "ConfigDocument":
        pair = (self.gamma_U_over_2pi_Hz, self.gamma_L_over_2pi_Hz)
        if self.gamma_over_2pi_Hz is not None:
            if any(value is not None for value in pair):
                raise ValueError(
                    "gamma_over_2pi_Hz excludes gamma_U_over_2pi_Hz/gamma_L_over_2pi_Hz"
                )
        elif None in pair:
            raise ValueError(
                "gamma_over_2pi_Hz, or both gamma_U_over_2pi_Hz and "
                "gamma_L_over_2pi_Hz, is required"
            )
        return self

    def model(self, paper_L: Optional[float] = None) -> ModelConfig:
        """ModelConfig in SI; ``paper_L`` overrides the mirror spacing."""
        return ModelConfig.from_lab_units(
            omega_A_over_2pi_Hz=self.omega_A_over_2pi_Hz,
            mu_eA=self.mu_eA,
            a_m=self.a_m,
            L_m=paper_L if paper_L is not None else self.L_m,
            m_index=self.m_index,
        )

    def damping(self) -> DampingConfig:
        return DampingConfig.from_lab_units(
            Gamma_ex_over_2pi_Hz=self.Gamma_ex_over_2pi_Hz,
            gamma_over_2pi_Hz=self.gamma_over_2pi_Hz,
            gamma_U_over_2pi_Hz=self.gamma_U_over_2pi_Hz,
            gamma_L_over_2pi_Hz=self.gamma_L_over_2pi_Hz,
        )

    def materialized(self, model: ModelConfig) -> "ConfigDocument":
        """Copy with every default written out, including the L actually used."""
        return self.model_copy(update={"L_m": model.L})


class SidecarDocument(BaseModel):
    """JSON written next to every run; also accepted as a config."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    config: ConfigDocument
    resolved: Dict[str, Any]
    sweep: Dict[str, Any]
    outputs: List[str]
    software: Dict[str, str]


def resolved_summary(model: ModelConfig, damping: DampingConfig) -> Dict[str, Any]:
    """The configuration in internal SI units, with Hz echoes for the rates."""
    return {
        "omega_A_rad_per_s": model.omega_A,
        "omega_A_over_2pi_Hz": units.angular_to_hz(model.omega_A),
        "omega_0_rad_per_s": model.omega_0,
        "mu_C_m": model.mu,
        "a_m": model.a,
        "L_m": model.L,
        "L_derived": model.L_derived,
        "m_index": model.m_index,
        "gamma_U_rad_per_s": damping.gamma_U,
        "gamma_L_rad_per_s": damping.gamma_L,
        "gamma_rad_per_s": damping.gamma,
        "gamma_over_2pi_Hz": units.angular_to_hz(damping.gamma),
        "Gamma_ex_rad_per_s": damping.Gamma_ex,
        "Gamma_ex_over_2pi_Hz": units.angular_to_hz(damping.Gamma_ex),
    }


def _format_problems(error: ValidationError) -> List[str]:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<document>"
        problems.append(f"{location}: {item['msg']}")
    return problems


def load_config(path) -> ConfigDocument:
    """Read a config, or a sidecar whose ``config`` part is used.

    Raises:
        ConfigValidationError: listing every offending key
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigValidationError([f"{path}: cannot read ({e.strerror or e})"])
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"{path}: not valid JSON ({e.msg} at line {e.lineno})"])

    if not isinstance(data, dict):
        raise ConfigValidationError([f"{path}: expected a JSON object"])

    try:
        if "config" in data:
            return SidecarDocument.model_validate(data).config
        return ConfigDocument.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(_format_problems(e))


class SweepKind(str, Enum):
    DISPERSION = "dispersion"
    WEIGHTS_VS_K = "weights-vs-k"
    WEIGHTS_VS_THETA = "weights-vs-theta"
    SPECTRA = "spectra"
    PHASES = "phases"

    @property
    def quantity(self) -> str:
        """Physical quantity of the swept variable."""
        if self in (SweepKind.DISPERSION, SweepKind.WEIGHTS_VS_K):
            return "wavenumber"
        if self is SweepKind.WEIGHTS_VS_THETA:
            return "angle"
        return "frequency"


class GridSpec(BaseModel):
    """Evenly spaced grid ``start..stop`` (inclusive) of ``count`` points in ``unit``."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    start: float
    stop: float
    count: int = Field(..., ge=2)
    unit: str

    @field_validator("unit")
    @classmethod
    def check_unit(cls, v: str) -> str:
        if v not in GRID_UNITS:
            raise ValueError(f"unit must be one of {', '.join(GRID_UNITS)}, got {v!r}")
        return v

    @model_validator(mode="after")
    def check_bounds(self) -> "GridSpec":
        if not self.start < self.stop:
            raise ValueError(f"start ({self.start}) must be < stop ({self.stop})")
        return self

    @property
    def quantity(self) -> str:
        return units.quantity_of(self.unit)

    def values_si(self) -> np.ndarray:
        return units.convert_to_si(np.linspace(self.start, self.stop, self.count), self.unit)

    @classmethod
    def parse(cls, text: str, default_unit: str) -> "GridSpec":
        """Parse ``START:STOP:COUNT[:UNIT]``."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise SweepSpecError(f"grid {text!r} must be START:STOP:COUNT[:UNIT]")
        try:
            return cls(
                start=parts[0],
                stop=parts[1],
                count=parts[2],
                unit=parts[3] if len(parts) == 4 else default_unit,
            )
        except ValidationError as e:
            raise SweepSpecError(f"grid {text!r}: " + "; ".join(_format_problems(e)))


def parse_quantity(text: str, default_unit: str, quantity: str) -> float:
    """Parse ``VALUE[:UNIT]`` into SI."""
    value, _, unit = text.partition(":")
    unit = unit or default_unit
    if units.quantity_of(unit) != quantity:
        raise SweepSpecError(f"{text!r}: unit {unit} is not a {quantity} unit")
    try:
        number = float(value)
    except ValueError:
        raise SweepSpecError(f"{text!r} is not a number")
    if not math.isfinite(number):
        raise SweepSpecError(f"{text!r} is not finite")
    return units.convert_to_si(number, unit)


def parse_drive(text: str) -> str:
    """Check a drive tag: ``s``, ``p`` or the superposition ``a_s,a_p``."""
    if text in (Polarization.S.value, Polarization.P.value):
        return text
    parts = text.split(",")
    if len(parts) == 2:
        try:
            IncidentField(b_in=[complex(part.replace(" ", "")) for part in parts])
            return text
        except ValueError:
            pass
    raise SweepSpecError(f"drive {text!r} must be 's', 'p' or 'a_s,a_p'")


def drive_field(text: str) -> IncidentField:
    text = parse_drive(text)
    if text in (Polarization.S.value, Polarization.P.value):
        return IncidentField.polarized(Polarization(text))
    return IncidentField(b_in=[complex(part.replace(" ", "")) for part in text.split(",")])


class SweepSpec(BaseModel):
    """One sweep: what is varied, over which grid, with which fixed parameters.

    ``grid`` may be left out for spectra and phases; the runner then centers
    a grid of 2001 points on the transition, ±3|f|/π wide in Hz.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    kind: SweepKind
    grid: Optional[GridSpec] = None
    k_per_m: float = Field(default=5e3, ge=0)
    thetas_rad: List[float] = Field(default_factory=lambda: [math.pi / 4], min_length=1)
    branches: List[BranchId] = Field(
        default_factory=lambda: [BranchId.UPPER, BranchId.MIDDLE, BranchId.LOWER], min_length=1
    )
    drive: str = "s"
    conventions: List[DarkModeConvention] = Field(
        default_factory=lambda: [DarkModeConvention.ORTHONORMAL], min_length=1
    )
    observables: Optional[List[str]] = None
    unwrap_phases: bool = False

    @field_validator("branches", mode="before")
    @classmethod
    def parse_branches(cls, v):
        if not isinstance(v, list):
            return v
        labels = {branch.label: branch for branch in BranchId}
        parsed = []
        for item in v:
            if isinstance(item, str):
                if item.lower() not in labels:
                    raise ValueError(f"unknown branch {item!r}; choose from {', '.join(labels)}")
                item = labels[item.lower()]
            parsed.append(item)
        return parsed

    @field_serializer("branches")
    def dump_branches(self, v: List[BranchId]) -> List[str]:
        return [branch.label for branch in v]

    @field_validator("drive")
    @classmethod
    def check_drive(cls, v: str) -> str:
        return parse_drive(v)

    @model_validator(mode="after")
    def check_consistency(self) -> "SweepSpec":
        if self.grid is None and self.kind not in (SweepKind.SPECTRA, SweepKind.PHASES):
            raise ValueError(f"{self.kind.value} sweeps need an explicit grid")
        if self.grid is not None and self.grid.quantity != self.kind.quantity:
            raise ValueError(
                f"{self.kind.value} sweeps run over {self.kind.quantity}, "
                f"got a grid in {self.grid.unit}"
            )
        if self.grid is not None and self.kind.quantity == "wavenumber" and self.grid.start < 0:
            raise ValueError("wavenumber grids must start at k >= 0")
        if self.kind is SweepKind.WEIGHTS_VS_THETA and len(self.thetas_rad) > 1:
            raise ValueError("weights-vs-theta sweeps take θ from the grid, not from fixed angles")
        if self.observables is not None:
            allowed = SPECTRA_OBSERVABLES + PHASE_OBSERVABLES
            unknown = [name for name in self.observables if name not in allowed]
            if unknown or not self.observables:
                raise ValueError(
                    f"unknown observables {unknown}; choose from {', '.join(allowed)}"
                )
        return self

    @property
    def selected_observables(self) -> Tuple[str, ...]:
        if self.observables is not None:
            return tuple(self.observables)
        return PHASE_OBSERVABLES if self.kind is SweepKind.PHASES else SPECTRA_OBSERVABLES

    def with_overrides(self, **overrides) -> "SweepSpec":
        """Validated copy with the non-None ``overrides`` applied.

        Raises:
            SweepSpecError: if the result is inconsistent
        """
        data = self.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        return build_sweep_spec(**data)


def build_sweep_spec(**fields) -> SweepSpec:
    try:
        return SweepSpec(**fields)
    except ValidationError as e:
        raise SweepSpecError("; ".join(_format_problems(e)))
