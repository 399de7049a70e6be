"""Linear optical spectra from the input-output relations of the two mirrors.

With polariton damping Γ_r = Γ_ex·|X_r|² and complex frequencies
Ω̄_r = Ω_r − iΓ_r, the intracavity photon amplitudes obey

    (1 + γΛ) a = Λ (sqrt(γ_U) b_in + sqrt(γ_L) c_in),
    Λ_αβ = i Σ_r Y_α^{r*} Y_β^r / (ω − Ω̄_r),     γ = (γ_U + γ_L)/2,

and the outputs follow from sqrt(γ_U) a = b_in + b_out, sqrt(γ_L) a = c_in + c_out.
"""

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Union

import numpy as np

from app.exceptions import InvalidParameterError, PoleError, SingularSystemError
from app.physics import units
from app.physics.model import ModelConfig, ProbePoint, coupling_constants
from app.physics.polariton import DarkModeConvention, PolaritonModes, resolve_modes

POLE_GUARD_FRACTION = 1e-3
POLE_ESCAPE = 1.01  # off-grid shift, in pole guards
SINGULAR_THRESHOLD = 1e-300


class Polarization(str, Enum):
    S = "s"
    P = "p"


@dataclass(frozen=True)
class DampingConfig:
    """Mirror and excitation damping rates, rad/s."""

    gamma_U: float
    gamma_L: float
    Gamma_ex: float = 0.0

    def __post_init__(self):
        for name in ("gamma_U", "gamma_L", "Gamma_ex"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {value}")

    @classmethod
    def symmetric(cls, gamma: float, Gamma_ex: float = 0.0) -> "DampingConfig":
        """Identical mirrors, γ_U = γ_L = γ."""
        return cls(gamma_U=gamma, gamma_L=gamma, Gamma_ex=Gamma_ex)

    @classmethod
    def from_lab_units(
        cls,
        Gamma_ex_over_2pi_Hz: float,
        gamma_over_2pi_Hz: Optional[float] = None,
        gamma_U_over_2pi_Hz: Optional[float] = None,
        gamma_L_over_2pi_Hz: Optional[float] = None,
    ) -> "DampingConfig":
        if gamma_over_2pi_Hz is not None:
            gamma_U_over_2pi_Hz = gamma_L_over_2pi_Hz = gamma_over_2pi_Hz
        if gamma_U_over_2pi_Hz is None or gamma_L_over_2pi_Hz is None:
            raise InvalidParameterError("mirror damping rates are missing")
        return cls(
            gamma_U=units.hz_to_angular(gamma_U_over_2pi_Hz),
            gamma_L=units.hz_to_angular(gamma_L_over_2pi_Hz),
            Gamma_ex=units.hz_to_angular(Gamma_ex_over_2pi_Hz),
        )

    @property
    def gamma(self) -> float:
        return 0.5 * (self.gamma_U + self.gamma_L)

    @property
    def identical_mirrors(self) -> bool:
        return self.gamma_U == self.gamma_L


@dataclass(frozen=True, eq=False)
class ComplexBranches:
    """Ω̄_r = Ω_r − iΓ_r for the three branches."""

    omegas: np.ndarray

    @property
    def Gamma(self) -> np.ndarray:
        return -self.omegas.imag


@dataclass(frozen=True, eq=False)
class LambdaMatrix:
    """2x2 polarization kernel Λ(ω), rows/columns ordered (s, p)."""

    omega: float
    matrix: np.ndarray

    @property
    def ss(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def sp(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def ps(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def pp(self) -> complex:
        return complex(self.matrix[1, 1])

    def exchanged(self) -> "LambdaMatrix":
        return LambdaMatrix(omega=self.omega, matrix=self.matrix[::-1, ::-1].copy())

    def anti_hermiticity_defect(self) -> float:
        """max|Λ + Λ†| relative to max|Λ|; zero for undamped excitations."""
        scale = float(np.max(np.abs(self.matrix)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.matrix + self.matrix.conj().T))) / scale


@dataclass(frozen=True, eq=False)
class IncidentField:
    """Incoming amplitudes (s, p) at the upper mirror (b_in) and lower mirror (c_in)."""

    b_in: np.ndarray
    c_in: np.ndarray = None

    def __post_init__(self):
        b_in = np.array(self.b_in, dtype=complex)
        if self.c_in is None:
            c_in = np.zeros(2, dtype=complex)
        else:
            c_in = np.array(self.c_in, dtype=complex)
        if b_in.shape != (2,) or c_in.shape != (2,):
            raise InvalidParameterError("incident amplitudes must be (s, p) pairs")
        if not (np.any(b_in != 0) or np.any(c_in != 0)):
            raise InvalidParameterError("incident field must not vanish")
        object.__setattr__(self, "b_in", b_in)
        object.__setattr__(self, "c_in", c_in)

    @classmethod
    def polarized(cls, polarization: Polarization, amplitude: complex = 1.0) -> "IncidentField":
        b_in = np.zeros(2, dtype=complex)
        b_in[0 if Polarization(polarization) is Polarization.S else 1] = amplitude
        return cls(b_in=b_in)

    @property
    def power(self) -> float:
        """Total incident photon flux, Σ|b_in|² + Σ|c_in|²."""
        return float(np.sum(np.abs(self.b_in) ** 2) + np.sum(np.abs(self.c_in) ** 2))

    @property
    def reference_amplitude(self) -> complex:
        """Amplitude phases are measured against: b_s, else b_p, else c_s, else c_p."""
        for amplitude in (*self.b_in, *self.c_in):
            if amplitude != 0:
                return complex(amplitude)
        raise InvalidParameterError("incident field must not vanish")

    @property
    def single_polarization(self) -> Optional[Polarization]:
        """The driven polarization for single-side single-polarization input, else None."""
        if np.any(self.c_in != 0):
            return None
        if self.b_in[1] == 0:
            return Polarization.S
        if self.b_in[0] == 0:
            return Polarization.P
        return None


@dataclass(frozen=True, eq=False)
class ScatteringAmplitudes:
    omega: float
    b_out: np.ndarray
    c_out: np.ndarray
    a: np.ndarray


@dataclass(frozen=True)
class SpectraPoint:
    """Observables at one probe frequency; intensities are per incident photon flux."""

    omega: float
    T_s: float
    T_p: float
    R_s: float
    R_p: float
    A: float
    phase_t_s: float
    phase_t_p: float
    phase_r_s: float
    phase_r_p: float
    I_s: float
    I_p: float
    pole_shifted: bool = False


def principal_phase(z: complex) -> float:
    """arg z in (−π, π]."""
    phi = cmath.phase(z)
    return math.pi if phi == -math.pi else phi


def complex_branches(modes: PolaritonModes, d: DampingConfig) -> ComplexBranches:
    """Ω̄_r = Ω_r − i·Γ_ex·|X_r|²."""
    Gamma = d.Gamma_ex * np.abs(modes.X) ** 2
    return ComplexBranches(omegas=modes.omegas - 1j * Gamma)


def lambda_matrix(
    cb: ComplexBranches,
    modes: PolaritonModes,
    omega: float,
    pole_tolerance: float = 0.0,
) -> LambdaMatrix:
    """Λ_αβ(ω) = i Σ_r Y_α^{r*} Y_β^r / (ω − Ω̄_r).

    Raises:
        PoleError: if ω is within ``pole_tolerance`` of an undamped branch that
            carries photon weight
    """
    denominators = omega - cb.omegas
    photon_weight = np.sum(np.abs(modes.Y) ** 2, axis=1)
    for r in range(3):
        if cb.omegas[r].imag == 0 and photon_weight[r] > 0:
            if abs(denominators[r]) < pole_tolerance or denominators[r] == 0:
                raise PoleError(
                    f"omega={omega!r} rad/s sits on the undamped pole of branch {r}",
                    branch=r,
                )

    Y = modes.Y
    matrix = 1j * (Y.conj().T / denominators) @ Y
    return LambdaMatrix(omega=omega, matrix=matrix)


def _check_determinant(D: complex):
    if abs(D) < SINGULAR_THRESHOLD:
        raise SingularSystemError(f"scattering determinant |D|={abs(D):.3e} is singular")


def solve_scattering(
    lam: LambdaMatrix, d: DampingConfig, inc: IncidentField
) -> ScatteringAmplitudes:
    """General solve: any γ_U, γ_L and inputs on both mirrors."""
    su, sl = math.sqrt(d.gamma_U), math.sqrt(d.gamma_L)
    M = np.eye(2, dtype=complex) + d.gamma * lam.matrix
    _check_determinant(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])

    a = np.linalg.solve(M, lam.matrix @ (su * inc.b_in + sl * inc.c_in))
    return ScatteringAmplitudes(
        omega=lam.omega,
        b_out=su * a - inc.b_in,
        c_out=sl * a - inc.c_in,
        a=a,
    )


def _closed_form_s(lam: LambdaMatrix, gamma: float, b: complex):
    """(c_out, b_out) for s-only input b on the upper mirror of identical mirrors."""
    g = gamma
    D = (1 + g * lam.ss) * (1 + g * lam.pp) - g * g * lam.sp * lam.ps
    _check_determinant(D)

    t_ss = (g * lam.ss * (1 + g * lam.pp) - g * g * lam.sp * lam.ps) / D
    t_ps = g * lam.ps / D
    r_ss = -(1 + g * lam.pp) / D
    cross = t_ps * b
    return np.array([t_ss * b, cross]), np.array([r_ss * b, cross])


def solve_scattering_closed_form(
    lam: LambdaMatrix, d: DampingConfig, inc: IncidentField
) -> ScatteringAmplitudes:
    """Closed-form solution for identical mirrors and one incident polarization.

    p input is the s solution of the label-exchanged problem.
    """
    polarization = inc.single_polarization
    if not d.identical_mirrors or polarization is None:
        raise InvalidParameterError(
            "closed form needs identical mirrors and a single upper-mirror polarization"
        )

    if polarization is Polarization.S:
        c_out, b_out = _closed_form_s(lam, d.gamma, inc.b_in[0])
    else:
        c_out, b_out = _closed_form_s(lam.exchanged(), d.gamma, inc.b_in[1])
        c_out, b_out = c_out[::-1], b_out[::-1]

    return ScatteringAmplitudes(
        omega=lam.omega,
        b_out=b_out,
        c_out=c_out,
        a=c_out / math.sqrt(d.gamma),
    )


def scatter(lam: LambdaMatrix, d: DampingConfig, inc: IncidentField) -> ScatteringAmplitudes:
    """Closed form where it applies, general solve otherwise."""
    if d.identical_mirrors and inc.single_polarization is not None:
        return solve_scattering_closed_form(lam, d, inc)
    return solve_scattering(lam, d, inc)


def observables(
    amplitudes: ScatteringAmplitudes, inc: IncidentField, pole_shifted: bool = False
) -> SpectraPoint:
    """T, R, A, phase shifts and intracavity photon numbers.

    A is the deficit T_s + T_p + R_s + R_p + A = 1.
    """
    power = inc.power
    reference = inc.reference_amplitude
    T = np.abs(amplitudes.c_out) ** 2 / power
    R = np.abs(amplitudes.b_out) ** 2 / power
    I = np.abs(amplitudes.a) ** 2 / power
    t = amplitudes.c_out / reference
    r = amplitudes.b_out / reference

    T_s, T_p, R_s, R_p = float(T[0]), float(T[1]), float(R[0]), float(R[1])
    return SpectraPoint(
        omega=amplitudes.omega,
        T_s=T_s,
        T_p=T_p,
        R_s=R_s,
        R_p=R_p,
        A=1.0 - (T_s + T_p + R_s + R_p),
        phase_t_s=principal_phase(t[0]),
        phase_t_p=principal_phase(t[1]),
        phase_r_s=principal_phase(r[0]),
        phase_r_p=principal_phase(r[1]),
        I_s=float(I[0]),
        I_p=float(I[1]),
        pole_shifted=pole_shifted,
    )


def incident_field(drive: Union[Polarization, str, IncidentField]) -> IncidentField:
    if isinstance(drive, IncidentField):
        return drive
    try:
        return IncidentField.polarized(Polarization(drive))
    except ValueError:
        raise InvalidParameterError(f"unknown drive {drive!r}; use 's', 'p' or an IncidentField")


def evaluate_point(
    modes: PolaritonModes,
    cb: ComplexBranches,
    d: DampingConfig,
    inc: IncidentField,
    omega: float,
) -> SpectraPoint:
    lam = lambda_matrix(cb, modes, omega, pole_tolerance=POLE_GUARD_FRACTION * d.gamma)
    return observables(scatter(lam, d, inc), inc)


def _check_grid(omega_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidParameterError("omega grid needs at least 2 points")
    if not np.all(np.diff(grid) > 0):
        raise InvalidParameterError("omega grid must be strictly increasing")
    return grid


def spectrum_sweep(
    cfg: ModelConfig,
    p: ProbePoint,
    d: DampingConfig,
    drive: Union[Polarization, str, IncidentField],
    omega_grid: Sequence[float],
    convention: DarkModeConvention = DarkModeConvention.ORTHONORMAL,
    mapper: Optional[Callable[[Callable, Iterable], Iterable]] = None,
    chunk_size: int = 256,
) -> List[SpectraPoint]:
    """Observables over ``omega_grid`` (rad/s), in grid order.

    A grid point on an undamped pole is flagged with ``pole_shifted`` and takes
    the values of the nearest grid point clear of every pole guard, the higher
    one first. When the grid is too fine for that, it is evaluated just outside
    the guard of the pole it hit. ``mapper`` may be any order-preserving map,
    e.g. a thread pool's.
    """
    grid = _check_grid(omega_grid)
    inc = incident_field(drive)
    modes = resolve_modes(coupling_constants(cfg, p), cfg.omega_A, convention)
    cb = complex_branches(modes, d)
    tolerance = POLE_GUARD_FRACTION * d.gamma

    def off_pole(index: int, error: PoleError) -> SpectraPoint:
        omega = float(grid[index])
        pole = float(cb.omegas[error.branch].real)
        reach = max(POLE_ESCAPE * tolerance, 4 * math.ulp(pole))

        for step in range(1, grid.size):
            nearby = [j for j in (index + step, index - step) if 0 <= j < grid.size]
            if step > 1 and all(abs(grid[j] - omega) > 2 * reach for j in nearby):
                break
            for j in nearby:
                try:
                    return evaluate_point(modes, cb, d, inc, float(grid[j]))
                except PoleError:
                    continue

        side = 1.0 if omega >= pole else -1.0
        for direction in (side, -side):
            try:
                return evaluate_point(modes, cb, d, inc, pole + direction * reach)
            except PoleError:
                continue
        raise error

    def evaluate(index: int) -> SpectraPoint:
        omega = float(grid[index])
        try:
            return evaluate_point(modes, cb, d, inc, omega)
        except PoleError as e:
            return replace(off_pole(index, e), omega=omega, pole_shifted=True)

    def evaluate_chunk(indices: range) -> List[SpectraPoint]:
        return [evaluate(i) for i in indices]

    chunks = [
        range(start, min(start + chunk_size, grid.size))
        for start in range(0, grid.size, chunk_size)
    ]
    results = (mapper or map)(evaluate_chunk, chunks)
    return [point for chunk in results for point in chunk]


def unwrap_phases(points: Sequence[SpectraPoint], attribute: str) -> np.ndarray:
    """Phase ``attribute`` along the grid with 2π jumps removed."""
    return np.unwrap(np.array([getattr(point, attribute) for point in points]))
