import math

import pytest

from app.exceptions import UnknownPresetError
from app.physics.polariton import BranchId, DarkModeConvention
from app.sweeps.presets import FIGURE_THETAS, PresetRegistry
from app.sweeps.schemas import SweepKind


class TestPresetRegistry:
    """Test cases for PresetRegistry."""

    def test_names(self):
        """Test every figure from 4 to 19 is registered, in order."""
        assert PresetRegistry.names() == [f"fig{n}" for n in range(4, 20)]

    def test_get_case_insensitive(self):
        """Test preset lookup ignores case."""
        assert PresetRegistry.get("FIG4").name == "fig4"

    def test_unknown_preset(self):
        """Test unknown names raise UnknownPresetError listing the presets."""
        with pytest.raises(UnknownPresetError, match="fig4"):
            PresetRegistry.get("fig99")

    @pytest.mark.parametrize(
        "name, kind",
        [
            ("fig4", SweepKind.DISPERSION),
            ("fig7", SweepKind.WEIGHTS_VS_K),
            ("fig11", SweepKind.WEIGHTS_VS_THETA),
            ("fig15", SweepKind.SPECTRA),
            ("fig19", SweepKind.PHASES),
        ],
    )
    def test_kinds(self, name, kind):
        """Test each preset runs the expected sweep kind."""
        assert PresetRegistry.get(name).spec.kind is kind

    def test_dual_convention(self):
        """Test presets touching the dark mode emit both conventions."""
        dual = {preset.name for preset in PresetRegistry.all() if preset.dual_convention}
        assert dual == {"fig9", "fig12"} | {f"fig{n}" for n in range(13, 20)}
        assert PresetRegistry.get("fig9").spec.conventions == [
            DarkModeConvention.ORTHONORMAL,
            DarkModeConvention.LITERAL,
        ]

    def test_angle_series(self):
        """Test the spectra presets cover five angles at k = 5e3 1/m with s drive."""
        for n in range(13, 20):
            spec = PresetRegistry.get(f"fig{n}").spec
            assert spec.thetas_rad == FIGURE_THETAS
            assert spec.k_per_m == 5e3
            assert spec.drive == "s"
            assert spec.grid is None

    def test_weight_grids(self):
        """Test the wavenumber ranges of the weight presets."""
        fig6 = PresetRegistry.get("fig6").spec
        fig7 = PresetRegistry.get("fig7").spec
        assert (fig6.grid.start, fig6.grid.stop) == (0.0, 1e5)
        assert (fig7.grid.start, fig7.grid.stop) == (1e6, 1e7)
        assert PresetRegistry.get("fig8").spec.branches == [BranchId.LOWER]

    def test_theta_grid(self):
        """Test the angle presets span 0 to π."""
        grid = PresetRegistry.get("fig10").spec.grid
        assert grid.unit == "rad"
        assert grid.stop == pytest.approx(math.pi)
        assert grid.count == 181
