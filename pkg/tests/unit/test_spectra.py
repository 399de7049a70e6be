import math

import numpy as np
import pytest

from app.exceptions import InvalidParameterError, PoleError
from app.physics.model import ModelConfig, ProbePoint, coupling_constants
from app.physics.polariton import DarkModeConvention, resolve_modes
from app.physics.spectra import (
    DampingConfig,
    IncidentField,
    Polarization,
    SpectraPoint,
    complex_branches,
    evaluate_point,
    lambda_matrix,
    observables,
    principal_phase,
    scatter,
    solve_scattering,
    solve_scattering_closed_form,
    spectrum_sweep,
    unwrap_phases,
)
from app.sweeps.worker_pool import WorkerPool


def setup(cfg, probe, damping, convention=DarkModeConvention.ORTHONORMAL):
    modes = resolve_modes(coupling_constants(cfg, probe), cfg.omega_A, convention)
    return modes, complex_branches(modes, damping)


def resonance_grid(cfg, probe, count=2001):
    """ω_A ± 3|f| in rad/s."""
    f = coupling_constants(cfg, probe).f_abs
    return cfg.omega_A + np.linspace(-3 * f, 3 * f, count)


def make_point(phase):
    fields = dict.fromkeys(
        ["omega", "T_s", "T_p", "R_s", "R_p", "A", "I_s", "I_p"]
        + ["phase_t_p", "phase_r_s", "phase_r_p"],
        0.0,
    )
    return SpectraPoint(phase_t_s=phase, **fields)


class TestDampingConfig:
    """Test cases for DampingConfig."""

    def test_lab_units(self, paper_damping):
        """Test rates are converted to rad/s."""
        assert paper_damping.gamma == pytest.approx(2 * math.pi * 1e9, rel=1e-15)
        assert paper_damping.Gamma_ex == pytest.approx(2 * math.pi * 1e8, rel=1e-15)
        assert paper_damping.identical_mirrors

    def test_mean_mirror_rate(self):
        """Test γ is the mean of γ_U and γ_L."""
        d = DampingConfig(gamma_U=1.0, gamma_L=3.0)
        assert d.gamma == 2.0
        assert not d.identical_mirrors

    def test_negative_rate_rejected(self):
        """Test negative rates are rejected."""
        with pytest.raises(InvalidParameterError, match="Gamma_ex"):
            DampingConfig.symmetric(1.0, Gamma_ex=-1.0)

    def test_missing_mirror_rate(self):
        """Test one mirror rate alone is rejected."""
        with pytest.raises(InvalidParameterError):
            DampingConfig.from_lab_units(Gamma_ex_over_2pi_Hz=0.0, gamma_U_over_2pi_Hz=1e9)


class TestIncidentField:
    """Test cases for IncidentField."""

    def test_polarized(self):
        """Test single-polarization drives on the upper mirror."""
        assert IncidentField.polarized(Polarization.S).single_polarization is Polarization.S
        assert IncidentField.polarized("p").single_polarization is Polarization.P

    def test_mixed_drive(self):
        """Test mixed or two-sided drives report no single polarization."""
        assert IncidentField(b_in=[1, 1j]).single_polarization is None
        assert IncidentField(b_in=[1, 0], c_in=[0, 1]).single_polarization is None

    def test_power_and_reference(self):
        """Test the incident flux and the phase reference."""
        inc = IncidentField(b_in=[0, 0], c_in=[0, 2j])
        assert inc.power == pytest.approx(4.0)
        assert inc.reference_amplitude == 2j

    def test_zero_field_rejected(self):
        """Test a vanishing incident field is rejected."""
        with pytest.raises(InvalidParameterError):
            IncidentField(b_in=[0, 0])

    def test_shape_checked(self):
        """Test amplitudes must be (s, p) pairs."""
        with pytest.raises(InvalidParameterError):
            IncidentField(b_in=[1, 0, 0])


class TestLambdaMatrix:
    """Test cases for lambda_matrix."""

    def test_empty_cavity(self):
        """Test μ=0 gives Λ = i/(ω − ω_k)·I."""
        cfg = ModelConfig.from_lab_units(2.5e14, 0.0, 2e-7)
        probe = ProbePoint(k=5e3, theta=0.3)
        modes, cb = setup(cfg, probe, DampingConfig.symmetric(1e9, Gamma_ex=1e8))
        omega_k = coupling_constants(cfg, probe).omega_k
        omega = omega_k + 3e9
        lam = lambda_matrix(cb, modes, omega)
        np.testing.assert_allclose(lam.matrix, 1j / (omega - omega_k) * np.eye(2), rtol=1e-12)

    def test_anti_hermitian_without_loss(self, paper_model, paper_probe, lossless_damping):
        """Test Λ + Λ† = 0 when Γ_ex = 0."""
        modes, cb = setup(paper_model, paper_probe, lossless_damping)
        for omega in resonance_grid(paper_model, paper_probe, 37):
            lam = lambda_matrix(cb, modes, omega)
            assert lam.anti_hermiticity_defect() <= 1e-12

    def test_lossy_not_anti_hermitian(self, paper_model, paper_probe, paper_damping):
        """Test Γ_ex > 0 breaks anti-Hermiticity."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        upper = modes.omegas[0]
        assert lambda_matrix(cb, modes, upper).anti_hermiticity_defect() > 1e-3

    def test_damped_branches(self, paper_model, paper_probe, paper_damping):
        """Test Γ_r = Γ_ex|X_r|² with an undamped middle branch."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        np.testing.assert_allclose(cb.Gamma, paper_damping.Gamma_ex * modes.weights[:, 0])
        assert cb.Gamma[1] == 0

    def test_pole_error(self, paper_model, paper_probe, paper_damping):
        """Test ω on the undamped middle pole raises PoleError."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        with pytest.raises(PoleError) as exc_info:
            lambda_matrix(cb, modes, float(modes.omegas[1]))
        assert exc_info.value.branch == 1

    def test_pole_tolerance(self, paper_model, paper_probe, paper_damping):
        """Test the tolerance widens the guarded band."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        omega = float(modes.omegas[1]) + 1e3
        lambda_matrix(cb, modes, omega)
        with pytest.raises(PoleError):
            lambda_matrix(cb, modes, omega, pole_tolerance=1e4)

    def test_damped_pole_allowed(self, paper_model, paper_probe, paper_damping):
        """Test ω on a damped branch frequency is finite."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        lam = lambda_matrix(cb, modes, float(modes.omegas[0]))
        assert np.all(np.isfinite(lam.matrix))


class TestScattering:
    """Test cases for the scattering solvers."""

    def test_closed_form_matches_general(self, paper_model, paper_damping):
        """Test closed form and general solve agree on 100 random configurations."""
        rng = np.random.default_rng(7)
        conventions = list(DarkModeConvention)
        polarizations = list(Polarization)
        for _ in range(100):
            probe = ProbePoint(k=rng.uniform(0, 1e5), theta=rng.uniform(0, 2 * math.pi))
            convention = conventions[rng.integers(2)]
            drive = IncidentField.polarized(polarizations[rng.integers(2)])
            modes, cb = setup(paper_model, probe, paper_damping, convention)
            f = coupling_constants(paper_model, probe).f_abs
            omega = paper_model.omega_A + rng.uniform(-3, 3) * f
            lam = lambda_matrix(cb, modes, omega)

            closed = solve_scattering_closed_form(lam, paper_damping, drive)
            general = solve_scattering(lam, paper_damping, drive)
            np.testing.assert_allclose(closed.b_out, general.b_out, atol=1e-12)
            np.testing.assert_allclose(closed.c_out, general.c_out, atol=1e-12)

    def test_closed_form_requires_identical_mirrors(self, paper_model, paper_probe):
        """Test asymmetric mirrors are rejected by the closed form."""
        d = DampingConfig(gamma_U=1e9, gamma_L=2e9)
        modes, cb = setup(paper_model, paper_probe, d)
        lam = lambda_matrix(cb, modes, paper_model.omega_A + 1e10)
        with pytest.raises(InvalidParameterError):
            solve_scattering_closed_form(lam, d, IncidentField.polarized("s"))

    def test_cross_polarized_symmetry(self, paper_model, paper_probe, paper_damping):
        """Test T_p = R_p for s drive on identical mirrors."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        for omega in resonance_grid(paper_model, paper_probe, 41):
            point = evaluate_point(modes, cb, paper_damping, IncidentField.polarized("s"), omega)
            assert point.T_p == pytest.approx(point.R_p, rel=1e-12, abs=1e-300)

    def test_cross_polarized_reciprocity(self, paper_model, paper_probe, paper_damping):
        """Test the s→p conversion equals the p→s conversion."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        for omega in resonance_grid(paper_model, paper_probe, 41):
            s = evaluate_point(modes, cb, paper_damping, IncidentField.polarized("s"), omega)
            p = evaluate_point(modes, cb, paper_damping, IncidentField.polarized("p"), omega)
            assert s.T_p == pytest.approx(p.T_s, rel=1e-10, abs=1e-300)

    def test_intracavity_photons(self, paper_model, paper_probe, paper_damping):
        """Test I = T/γ for identical mirrors."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        for omega in resonance_grid(paper_model, paper_probe, 41):
            point = evaluate_point(modes, cb, paper_damping, IncidentField.polarized("s"), omega)
            assert point.I_s * paper_damping.gamma == pytest.approx(point.T_s, rel=1e-12)
            assert point.I_p * paper_damping.gamma == pytest.approx(
                point.T_p, rel=1e-12, abs=1e-300
            )

    @pytest.mark.parametrize("convention", list(DarkModeConvention))
    def test_flux_conservation(self, paper_model, paper_probe, lossless_damping, convention):
        """Test T + R = 1 without excitation damping."""
        points = spectrum_sweep(
            paper_model,
            paper_probe,
            lossless_damping,
            "s",
            resonance_grid(paper_model, paper_probe),
            convention=convention,
        )
        assert max(abs(point.A) for point in points) <= 1e-10

    def test_absorption_with_loss(self, paper_model, paper_probe, paper_damping):
        """Test A ≥ 0 and some light is absorbed when Γ_ex > 0."""
        points = spectrum_sweep(
            paper_model, paper_probe, paper_damping, "s", resonance_grid(paper_model, paper_probe)
        )
        absorption = np.array([point.A for point in points])
        assert absorption.min() >= -1e-12
        assert absorption.max() > 1e-3

    def test_far_detuned_reflection(self, paper_model, paper_probe, paper_damping):
        """Test a mirror-like response far from every branch."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        omega = paper_model.omega_A + 1e6 * paper_damping.gamma
        point = evaluate_point(modes, cb, paper_damping, IncidentField.polarized("s"), omega)
        assert point.R_s == pytest.approx(1.0, abs=1e-6)
        assert abs(point.phase_r_s) == pytest.approx(math.pi, abs=1e-5)

    def test_p_drive_by_exchange(self, paper_model, paper_probe, paper_damping):
        """Test p drive outputs are the general solve's."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        lam = lambda_matrix(cb, modes, paper_model.omega_A + 1e10)
        inc = IncidentField.polarized("p", amplitude=0.5j)
        closed = solve_scattering_closed_form(lam, paper_damping, inc)
        general = solve_scattering(lam, paper_damping, inc)
        np.testing.assert_allclose(closed.c_out, general.c_out, atol=1e-12)
        np.testing.assert_allclose(closed.a, general.a, atol=1e-12)

    def test_two_sided_drive_conserves_flux(self, paper_model, paper_probe):
        """Test the general solve with asymmetric mirrors and input on both sides."""
        d = DampingConfig(gamma_U=2 * math.pi * 1e9, gamma_L=2 * math.pi * 3e9)
        inc = IncidentField(b_in=[1, 0], c_in=[0, 0.5j])
        modes, cb = setup(paper_model, paper_probe, d)
        for omega in resonance_grid(paper_model, paper_probe, 41):
            point = observables(scatter(lambda_matrix(cb, modes, omega), d, inc), inc)
            assert abs(point.A) <= 1e-10

    def test_mirror_symmetry(self, paper_model, paper_probe, paper_damping):
        """Test driving the lower mirror transmits like driving the upper one."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        lam = lambda_matrix(cb, modes, paper_model.omega_A - 2e10)
        upper = scatter(lam, paper_damping, IncidentField(b_in=[1, 0]))
        lower = scatter(lam, paper_damping, IncidentField(b_in=[0, 0], c_in=[1, 0]))
        np.testing.assert_allclose(lower.b_out, upper.c_out, atol=1e-12)


class TestPhases:
    """Test cases for phase conventions."""

    def test_principal_phase_range(self):
        """Test −π maps to π."""
        assert principal_phase(complex(-1.0, -0.0)) == math.pi
        assert principal_phase(1j) == pytest.approx(math.pi / 2)

    def test_phases_in_range(self, paper_model, paper_probe, paper_damping):
        """Test every phase lies in (−π, π]."""
        points = spectrum_sweep(
            paper_model, paper_probe, paper_damping, "p", resonance_grid(paper_model, paper_probe)
        )
        for point in points:
            for value in (point.phase_t_s, point.phase_t_p, point.phase_r_s, point.phase_r_p):
                assert -math.pi < value <= math.pi

    def test_unwrap(self):
        """Test 2π jumps are removed."""
        points = [make_point(3.0), make_point(-3.0), make_point(-1.0)]
        np.testing.assert_allclose(
            unwrap_phases(points, "phase_t_s"), [3.0, 2 * math.pi - 3.0, 2 * math.pi - 1.0]
        )


class TestThetaZero:
    """Test cases for a dipole along the in-plane wave vector."""

    def test_lorentzian_transmission(self, paper_model, paper_damping):
        """Test T_s is the bare cavity Lorentzian and T_p vanishes."""
        probe = ProbePoint(k=5e3, theta=0.0)
        omega_k = coupling_constants(paper_model, probe).omega_k
        gamma = paper_damping.gamma
        eps = np.linspace(-20 * gamma, 20 * gamma, 400)
        points = spectrum_sweep(paper_model, probe, paper_damping, "s", omega_k + eps)
        for point in points:
            e = point.omega - omega_k
            assert point.T_s == pytest.approx(gamma ** 2 / (e ** 2 + gamma ** 2), abs=1e-12)
            assert point.T_p == 0.0

    def test_transmission_phase(self, paper_model, paper_damping):
        """Test the phase of t_s rises as atan(ε/γ)."""
        probe = ProbePoint(k=5e3, theta=0.0)
        omega_k = coupling_constants(paper_model, probe).omega_k
        gamma = paper_damping.gamma
        eps = np.linspace(-10 * gamma, 10 * gamma, 200)
        points = spectrum_sweep(paper_model, probe, paper_damping, "s", omega_k + eps)
        phases = np.array([point.phase_t_s for point in points])
        offsets = np.array([point.omega for point in points]) - omega_k
        assert np.all(np.diff(phases) > 0)
        np.testing.assert_allclose(phases, np.arctan(offsets / gamma), atol=1e-10)

    def test_literal_convention_reflects(self, paper_model, paper_damping):
        """Test the literal dark mode leaves s light fully reflected."""
        probe = ProbePoint(k=5e3, theta=0.0)
        points = spectrum_sweep(
            paper_model,
            probe,
            paper_damping,
            "s",
            resonance_grid(paper_model, probe, 101),
            convention=DarkModeConvention.LITERAL,
        )
        for point in points:
            assert point.T_s == 0.0
            assert point.R_s == pytest.approx(1.0, abs=1e-12)


class TestSpectrumSweep:
    """Test cases for spectrum_sweep."""

    def test_pole_shifted(self, paper_model, paper_probe, paper_damping):
        """Test a grid point on the dark pole is evaluated one step higher."""
        modes, cb = setup(paper_model, paper_probe, paper_damping)
        pole = float(modes.omegas[1])
        step = 2 * paper_damping.gamma
        grid = [pole - step, pole, pole + step]
        points = spectrum_sweep(paper_model, paper_probe, paper_damping, "s", grid)
        assert [point.pole_shifted for point in points] == [False, True, False]
        assert points[1].omega == pole
        assert points[1].T_s == points[2].T_s

    def test_pole_at_last_point(self, paper_model, paper_probe, paper_damping):
        """Test the last grid point borrows its lower neighbour."""
        modes, _ = setup(paper_model, paper_probe, paper_damping)
        pole = float(modes.omegas[1])
        grid = [pole - paper_damping.gamma, pole]
        points = spectrum_sweep(paper_model, paper_probe, paper_damping, "s", grid)
        assert points[1].pole_shifted
        assert points[1].R_s == points[0].R_s

    def test_grid_finer_than_pole_guard(self, paper_model, paper_probe, paper_damping):
        """Test a grid denser than the pole guard borrows the nearest clear grid point."""
        modes, _ = setup(paper_model, paper_probe, paper_damping)
        pole = float(modes.omegas[1])
        gamma = paper_damping.gamma
        offsets = np.linspace(-5e-3, 5e-3, 101) * gamma
        points = spectrum_sweep(paper_model, paper_probe, paper_damping, "s", pole + offsets)

        shifted = np.array([point.pole_shifted for point in points])
        assert np.all(shifted[np.abs(offsets) < 0.5e-3 * gamma])
        assert not np.any(shifted[np.abs(offsets) > 1.5e-3 * gamma])
        clear = {point.T_s for point in points if not point.pole_shifted}
        for point in points:
            if point.pole_shifted:
                assert point.T_s in clear

    def test_grid_inside_pole_guard(self, paper_model, paper_probe, paper_damping):
        """Test a grid entirely inside the guard is evaluated just outside it."""
        modes, _ = setup(paper_model, paper_probe, paper_damping)
        pole = float(modes.omegas[1])
        grid = pole + np.linspace(-1e-4, 1e-4, 5) * paper_damping.gamma
        points = spectrum_sweep(paper_model, paper_probe, paper_damping, "s", grid)

        assert all(point.pole_shifted for point in points)
        assert [point.omega for point in points] == list(grid)
        assert points[0].T_s == points[1].T_s
        assert points[2].T_s == points[3].T_s == points[4].T_s
        assert all(0.0 <= point.T_s <= 1.0 for point in points)

    def test_invalid_grid(self, paper_model, paper_probe, paper_damping):
        """Test grids must be increasing with at least two points."""
        with pytest.raises(InvalidParameterError):
            spectrum_sweep(paper_model, paper_probe, paper_damping, "s", [1.0])
        with pytest.raises(InvalidParameterError):
            spectrum_sweep(paper_model, paper_probe, paper_damping, "s", [2.0, 1.0])

    def test_unknown_drive(self, paper_model, paper_probe, paper_damping):
        """Test an unknown drive name is rejected."""
        with pytest.raises(InvalidParameterError, match="drive"):
            spectrum_sweep(paper_model, paper_probe, paper_damping, "x", [1.0, 2.0])

    def test_worker_pool_matches_serial(self, paper_model, paper_probe, paper_damping):
        """Test chunked threaded evaluation preserves order and values."""
        grid = resonance_grid(paper_model, paper_probe, 101)
        serial = spectrum_sweep(paper_model, paper_probe, paper_damping, "s", grid)
        with WorkerPool(3) as pool:
            threaded = spectrum_sweep(
                paper_model, paper_probe, paper_damping, "s", grid, mapper=pool.map, chunk_size=7
            )
        assert threaded == serial
