"""Polariton branches of the one-excitation block.

In the basis (excitation B, s photon, p photon) the block reads

    H = [[ω_A,  f_s,  f_p ],
         [f_s*, ω_k,  0   ],
         [f_p*, 0,    ω_k ]]

with eigenfrequencies Ω_± = (ω_k + ω_A)/2 ± Δ_k and Ω_0 = ω_k, where
Δ_k = sqrt(δ_k² + |f|²). Row r of the amplitude matrix U holds the polariton
operator coefficients (X_r, Y_r^s, Y_r^p) of A_r = X_r B + Σ_ν Y_r^ν a_ν; these
are the complex conjugates of the eigenvectors of H.
"""

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Tuple

import numpy as np

from app.exceptions import DegenerateCouplingError, InvalidParameterError
from app.physics.model import CouplingSet

DEFAULT_DEGENERACY_THRESHOLD = 1e-14
_PHASE_TOLERANCE = 1e-12


class BranchId(IntEnum):
    """Row index of a branch; rows are ordered by descending frequency."""

    UPPER = 0
    MIDDLE = 1
    LOWER = 2

    @property
    def symbol(self) -> str:
        return ("+", "0", "-")[self.value]

    @property
    def label(self) -> str:
        return self.name.lower()


class DarkModeConvention(str, Enum):
    """How the middle-branch photon amplitudes are chosen.

    ORTHONORMAL uses (f_p*, -f_s*)/|f|, the photon combination orthogonal to the
    dipole, which makes U unitary. LITERAL uses f/|f|, the bright combination
    itself; U is then not unitary, and at θ=0 the cavity fully reflects s light.
    """

    ORTHONORMAL = "orthonormal"
    LITERAL = "paper"


@dataclass(frozen=True, eq=False)
class PolaritonModes:
    omegas: np.ndarray
    Delta_k: float
    amplitudes: np.ndarray
    convention: DarkModeConvention = DarkModeConvention.ORTHONORMAL

    def __post_init__(self):
        omegas = np.array(self.omegas, dtype=float)
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if omegas.shape != (3,) or amplitudes.shape != (3, 3):
            raise InvalidParameterError("expected 3 branches with 3 amplitudes each")
        omegas.setflags(write=False)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def X(self) -> np.ndarray:
        """Excitation amplitudes per branch."""
        return self.amplitudes[:, 0]

    @property
    def Y(self) -> np.ndarray:
        """Photon amplitudes per branch, shape (3, 2), columns (s, p)."""
        return self.amplitudes[:, 1:]

    @property
    def weights(self) -> np.ndarray:
        """|X_r|², |Y_r^s|², |Y_r^p|² per branch."""
        return np.abs(self.amplitudes) ** 2

    def branch(self, branch: BranchId) -> np.ndarray:
        return self.amplitudes[int(branch)]

    def exchanged(self) -> "PolaritonModes":
        """Same modes with the s and p labels swapped."""
        return PolaritonModes(
            omegas=self.omegas,
            Delta_k=self.Delta_k,
            amplitudes=self.amplitudes[:, [0, 2, 1]],
            convention=self.convention,
        )

    def unitarity_defect(self) -> float:
        """max |U·U† − I|."""
        U = self.amplitudes
        return float(np.max(np.abs(U @ U.conj().T - np.eye(3))))

    def normalization_defect(self) -> float:
        """max over branches of | |X_r|² + Σ_ν |Y_r^ν|² − 1 |."""
        return float(np.max(np.abs(self.weights.sum(axis=1) - 1.0)))


@dataclass(frozen=True)
class Birefringence:
    """Ordinary (dark) and extraordinary (photon-like coupled) refracted modes."""

    ordinary: float
    extraordinary: float

    @property
    def splitting(self) -> float:
        return self.extraordinary - self.ordinary


def fix_phase(row: np.ndarray) -> np.ndarray:
    """Rotate ``row`` so its first non-negligible component is real and positive."""
    row = np.asarray(row, dtype=complex)
    scale = float(np.max(np.abs(row)))
    if scale == 0.0:
        return row
    for c in row:
        if abs(c) > _PHASE_TOLERANCE * scale:
            return row * (abs(c) / c)
    return row


def eigenfrequencies(cs: CouplingSet, omega_A: float) -> Tuple[float, float, float]:
    """(Ω_+, Ω_0, Ω_−), descending."""
    f = cs.f_abs
    if f == 0.0:
        return max(cs.omega_k, omega_A), cs.omega_k, min(cs.omega_k, omega_A)

    Delta = math.hypot(cs.delta_k, f)
    center = omega_A + cs.delta_k
    upper = max(center + Delta, cs.omega_k)
    lower = min(center - Delta, cs.omega_k)
    return upper, cs.omega_k, lower


def hopfield_amplitudes(
    cs: CouplingSet,
    omega_A: float,
    convention: DarkModeConvention = DarkModeConvention.ORTHONORMAL,
    degeneracy_threshold: float = DEFAULT_DEGENERACY_THRESHOLD,
) -> PolaritonModes:
    """Closed-form Hopfield amplitudes of the three branches.

    Raises:
        DegenerateCouplingError: if |f| <= degeneracy_threshold·ω_A
    """
    convention = DarkModeConvention(convention)
    f = cs.f_abs
    if f <= degeneracy_threshold * omega_A:
        raise DegenerateCouplingError(
            f"|f|={f:.3e} rad/s is below {degeneracy_threshold:g}·omega_A; "
            "use the decoupled assignment"
        )

    delta = cs.delta_k
    Delta = math.hypot(delta, f)
    # Δ∓δ without cancellation
    if delta >= 0:
        d_plus = Delta + delta
        d_minus = f * f / d_plus
    else:
        d_minus = Delta - delta
        d_plus = f * f / d_minus

    fvec = np.array([cs.f_s, cs.f_p], dtype=complex)
    upper = np.concatenate(
        ([math.sqrt(d_minus / (2.0 * Delta))], fvec / math.sqrt(2.0 * Delta * d_minus))
    )
    lower = np.concatenate(
        ([-math.sqrt(d_plus / (2.0 * Delta))], fvec / math.sqrt(2.0 * Delta * d_plus))
    )

    if convention is DarkModeConvention.ORTHONORMAL:
        middle = fix_phase(np.array([0.0, np.conj(cs.f_p) / f, -np.conj(cs.f_s) / f]))
    else:
        middle = np.array([0.0, cs.f_s / f, cs.f_p / f], dtype=complex)

    return PolaritonModes(
        omegas=np.array(eigenfrequencies(cs, omega_A)),
        Delta_k=Delta,
        amplitudes=np.vstack([upper, middle, lower]),
        convention=convention,
    )


def decoupled_modes(
    cs: CouplingSet,
    omega_A: float,
    convention: DarkModeConvention = DarkModeConvention.ORTHONORMAL,
) -> PolaritonModes:
    """Uncoupled assignment {excitation, s photon, p photon}, by descending frequency.

    Ties keep the order excitation, s, p.
    """
    states = [
        (omega_A, (1.0, 0.0, 0.0)),
        (cs.omega_k, (0.0, 1.0, 0.0)),
        (cs.omega_k, (0.0, 0.0, 1.0)),
    ]
    states.sort(key=lambda state: -state[0])
    return PolaritonModes(
        omegas=np.array([state[0] for state in states]),
        Delta_k=math.hypot(cs.delta_k, cs.f_abs),
        amplitudes=np.array([state[1] for state in states], dtype=complex),
        convention=DarkModeConvention(convention),
    )


def resolve_modes(
    cs: CouplingSet,
    omega_A: float,
    convention: DarkModeConvention = DarkModeConvention.ORTHONORMAL,
    degeneracy_threshold: float = DEFAULT_DEGENERACY_THRESHOLD,
) -> PolaritonModes:
    """Hopfield amplitudes, or the decoupled assignment when |f| is negligible."""
    try:
        return hopfield_amplitudes(cs, omega_A, convention, degeneracy_threshold)
    except DegenerateCouplingError:
        return decoupled_modes(cs, omega_A, convention)


def hamiltonian_block(cs: CouplingSet, omega_A: float, shift: float = 0.0) -> np.ndarray:
    """The 3x3 one-excitation block, minus ``shift`` on the diagonal."""
    return np.array(
        [
            [omega_A - shift, cs.f_s, cs.f_p],
            [np.conj(cs.f_s), cs.omega_k - shift, 0.0],
            [np.conj(cs.f_p), 0.0, cs.omega_k - shift],
        ],
        dtype=complex,
    )


def diagonalize_oracle(cs: CouplingSet, omega_A: float) -> PolaritonModes:
    """Numerical eigendecomposition of the block, independent of the closed forms."""
    H = hamiltonian_block(cs, omega_A, shift=omega_A)
    # ω_k − ω_A from the detuning keeps the small diagonal exact
    H[1, 1] = H[2, 2] = 2.0 * cs.delta_k
    w, v = np.linalg.eigh(H)

    order = sorted(range(3), key=lambda j: (-w[j], int(np.argmax(np.abs(v[:, j])))))
    rows = [fix_phase(np.conj(v[:, j])) for j in order]
    return PolaritonModes(
        omegas=omega_A + w[order],
        Delta_k=math.hypot(cs.delta_k, cs.f_abs),
        amplitudes=np.vstack(rows),
        convention=DarkModeConvention.ORTHONORMAL,
    )


def large_detuning_approx(cs: CouplingSet, omega_A: float) -> Tuple[float, float, float]:
    """Dispersive approximation (Ω_+, Ω_0, Ω_−) for |δ_k| >> |f|.

    The photon-like and excitation-like lines are pushed apart by |f|²/2|δ|;
    the error is O(|f|⁴/|δ|³).
    """
    delta = cs.delta_k
    if delta == 0:
        raise InvalidParameterError("large-detuning approximation needs delta_k != 0")
    shift = cs.f_abs ** 2 / (2.0 * abs(delta))
    return (
        max(cs.omega_k, omega_A) + shift,
        cs.omega_k,
        min(cs.omega_k, omega_A) - shift,
    )


def birefringent_split(cs: CouplingSet, omega_A: float) -> Birefringence:
    """The two refracted cavity fields: the dark branch and the photon-like coupled one."""
    upper, middle, lower = eigenfrequencies(cs, omega_A)
    extraordinary = upper if cs.delta_k >= 0 else lower
    return Birefringence(ordinary=middle, extraordinary=extraordinary)
