import math
from dataclasses import dataclass
from typing import Dict, List

from app.exceptions import UnknownPresetError
from app.physics.polariton import BranchId, DarkModeConvention
from app.sweeps.schemas import GridSpec, SweepKind, SweepSpec

PRESET_K_PER_M = 5e3
PRESET_THETA = math.pi / 4
FIGURE_THETAS = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]
BOTH_CONVENTIONS = [DarkModeConvention.ORTHONORMAL, DarkModeConvention.LITERAL]


@dataclass(frozen=True)
class FigurePreset:
    """A named sweep reproducing the data series of one published figure."""

    name: str
    description: str
    spec: SweepSpec

    @property
    def dual_convention(self) -> bool:
        return len(self.spec.conventions) > 1


def _k_grid(stop: float, count: int = 501, start: float = 0.0) -> GridSpec:
    return GridSpec(start=start, stop=stop, count=count, unit="1/m")


def _theta_grid() -> GridSpec:
    return GridSpec(start=0.0, stop=math.pi, count=181, unit="rad")


def _weights_vs_k(name, description, grid, branch, conventions=None) -> FigurePreset:
    spec = SweepSpec(
        kind=SweepKind.WEIGHTS_VS_K,
        grid=grid,
        thetas_rad=[PRESET_THETA],
        branches=[branch],
        conventions=conventions or [DarkModeConvention.ORTHONORMAL],
    )
    return FigurePreset(name=name, description=description, spec=spec)


def _weights_vs_theta(name, description, branch, conventions=None) -> FigurePreset:
    spec = SweepSpec(
        kind=SweepKind.WEIGHTS_VS_THETA,
        grid=_theta_grid(),
        k_per_m=PRESET_K_PER_M,
        branches=[branch],
        conventions=conventions or [DarkModeConvention.ORTHONORMAL],
    )
    return FigurePreset(name=name, description=description, spec=spec)


def _angle_series(name, description, kind, observables) -> FigurePreset:
    spec = SweepSpec(
        kind=kind,
        k_per_m=PRESET_K_PER_M,
        thetas_rad=FIGURE_THETAS,
        drive="s",
        conventions=BOTH_CONVENTIONS,
        observables=observables,
    )
    return FigurePreset(name=name, description=description, spec=spec)


def _build_presets() -> Dict[str, FigurePreset]:
    presets = [
        FigurePreset(
            name="fig4",
            description="branch dispersions vs k at theta=pi/4",
            spec=SweepSpec(
                kind=SweepKind.DISPERSION,
                grid=_k_grid(1e6),
                thetas_rad=[PRESET_THETA],
            ),
        ),
        _weights_vs_k("fig5", "upper-branch weights vs k", _k_grid(1e6), BranchId.UPPER),
        _weights_vs_k("fig6", "upper-branch weights, small k", _k_grid(1e5), BranchId.UPPER),
        _weights_vs_k(
            "fig7", "upper-branch weights, large k", _k_grid(1e7, start=1e6), BranchId.UPPER
        ),
        _weights_vs_k("fig8", "lower-branch weights vs k", _k_grid(1e6), BranchId.LOWER),
        _weights_vs_k(
            "fig9", "middle-branch weights vs k", _k_grid(1e6), BranchId.MIDDLE, BOTH_CONVENTIONS
        ),
        _weights_vs_theta("fig10", "upper-branch weights vs theta", BranchId.UPPER),
        _weights_vs_theta("fig11", "lower-branch weights vs theta", BranchId.LOWER),
        _weights_vs_theta(
            "fig12", "middle-branch weights vs theta", BranchId.MIDDLE, BOTH_CONVENTIONS
        ),
        _angle_series("fig13", "s-drive transmission T_s", SweepKind.SPECTRA, ["T_s"]),
        _angle_series("fig14", "s-drive reflection R_s", SweepKind.SPECTRA, ["R_s"]),
        _angle_series(
            "fig15", "s-drive cross-polarized T_p and R_p", SweepKind.SPECTRA, ["T_p", "R_p"]
        ),
        _angle_series("fig16", "s-drive absorption A", SweepKind.SPECTRA, ["A"]),
        _angle_series("fig17", "s-drive transmission phase", SweepKind.PHASES, ["phase_t_s"]),
        _angle_series("fig18", "s-drive reflection phase", SweepKind.PHASES, ["phase_r_s"]),
        _angle_series(
            "fig19",
            "s-drive cross-polarized phases",
            SweepKind.PHASES,
            ["phase_t_p", "phase_r_p"],
        ),
    ]
    return {preset.name: preset for preset in presets}


class PresetRegistry:
    """Registry of figure presets."""

    _presets: Dict[str, FigurePreset] = _build_presets()

    @classmethod
    def get(cls, name: str) -> FigurePreset:
        """
        Get the preset registered under ``name``.

        Raises:
            UnknownPresetError: If no such preset exists
        """
        preset = cls._presets.get(name.lower())
        if not preset:
            raise UnknownPresetError(
                f"Unknown preset: {name} (available: {', '.join(cls.names())})"
            )
        return preset

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._presets.keys())

    @classmethod
    def all(cls) -> List[FigurePreset]:
        return list(cls._presets.values())
