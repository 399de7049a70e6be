import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.physics import units
from app.physics.model import (
    ProbePoint,
    cavity_dispersion,
    coupling_constants,
    coupling_scale,
)
from app.physics.polariton import DarkModeConvention, eigenfrequencies, resolve_modes
from app.physics.spectra import Polarization, spectrum_sweep, unwrap_phases
from app.sweeps.schemas import (
    PHASE_OBSERVABLES,
    ConfigDocument,
    SweepKind,
    SweepSpec,
    drive_field,
    resolved_summary,
)
from app.sweeps.worker_pool import WorkerPool
from app.utils.logging import get_logger
from app.utils.metrics import (
    pole_perturbations_total,
    spectra_points_evaluated_total,
    sweep_duration_seconds,
    sweeps_total,
)

logger = get_logger(__name__)

DEFAULT_OMEGA_POINTS = 2001
DEFAULT_OMEGA_HALF_WIDTH = 3.0  # in units of |f|/π, Hz


@dataclass(frozen=True, eq=False)
class ResultTable:
    """One CSV worth of columns, in output order."""

    name: str
    columns: Dict[str, np.ndarray]
    convention: Optional[DarkModeConvention] = None

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values())))


def theta_suffix(theta: float) -> str:
    return f"_theta_{math.degrees(theta):g}deg"


def theta_suffixes(spec: SweepSpec) -> List[Tuple[float, str]]:
    """Each fixed angle with its column suffix; a lone angle gets none."""
    if len(spec.thetas_rad) == 1:
        return [(spec.thetas_rad[0], "")]
    return [(theta, theta_suffix(theta)) for theta in spec.thetas_rad]


def observable_column(name: str) -> str:
    return f"{name}_rad" if name in PHASE_OBSERVABLES else name


class SweepRunner:
    """Evaluates sweeps for one physical configuration."""

    def __init__(
        self,
        document: ConfigDocument,
        paper_L: Optional[float] = None,
        worker_count: Optional[int] = None,
        chunk_size: Optional[int] = None,
    ):
        self.document = document
        self.model = document.model(paper_L)
        self.damping = document.damping()
        self.worker_count = worker_count or settings.worker_count
        self.chunk_size = chunk_size or settings.chunk_size

    @property
    def resolved(self) -> Dict:
        return resolved_summary(self.model, self.damping)

    @property
    def effective_config(self) -> ConfigDocument:
        """The config with the L actually used written out."""
        return self.document.materialized(self.model)

    def default_omega_grid(self, k: float) -> np.ndarray:
        """2001 points centered on ω_A, ±3|f|/π wide in Hz, in rad/s."""
        f_max = coupling_scale(self.model, cavity_dispersion(self.model, k)) / self.model.hbar
        f_max *= abs(self.model.mode_profile)
        if f_max == 0.0:
            f_max = self.damping.gamma
        center = units.angular_to_hz(self.model.omega_A)
        half_width = DEFAULT_OMEGA_HALF_WIDTH * f_max / math.pi
        grid_hz = np.linspace(center - half_width, center + half_width, DEFAULT_OMEGA_POINTS)
        return units.hz_to_angular(grid_hz)

    def run(self, spec: SweepSpec, name: str) -> List[ResultTable]:
        """
        Evaluate ``spec``.

        Returns:
            One table per dark-mode convention (one in total for dispersion)

        Raises:
            ValueError: For invalid parameters; nothing is retried
        """
        kind = spec.kind.value
        start_time = time.time()
        logger.info(
            "sweep_started",
            name=name,
            kind=kind,
            conventions=[c.value for c in spec.conventions],
            worker_count=self.worker_count,
        )

        try:
            if spec.kind is SweepKind.DISPERSION:
                tables = [self._dispersion(spec, name)]
            elif spec.kind in (SweepKind.WEIGHTS_VS_K, SweepKind.WEIGHTS_VS_THETA):
                tables = [
                    self._weights(spec, self._table_name(spec, name, c), c)
                    for c in spec.conventions
                ]
            else:
                tables = [
                    self._spectra(spec, self._table_name(spec, name, c), c)
                    for c in spec.conventions
                ]
        except ValueError as e:
            sweeps_total.labels(kind=kind, status="failed").inc()
            logger.error("sweep_failed", name=name, kind=kind, error=str(e))
            raise

        duration = time.time() - start_time
        sweep_duration_seconds.labels(kind=kind).observe(duration)
        sweeps_total.labels(kind=kind, status="success").inc()
        logger.info(
            "sweep_completed",
            name=name,
            kind=kind,
            tables=[table.name for table in tables],
            points=sum(table.n_rows for table in tables),
            duration_ms=int(duration * 1000),
        )
        return tables

    @staticmethod
    def _table_name(spec: SweepSpec, name: str, convention: DarkModeConvention) -> str:
        if len(spec.conventions) > 1:
            return f"{name}_{convention.value}"
        return name

    def _dispersion(self, spec: SweepSpec, name: str) -> ResultTable:
        ks = spec.grid.values_si()
        columns = {
            "k_per_m": ks,
            "omega_k_over_2pi_Hz": units.angular_to_hz(
                np.array([cavity_dispersion(self.model, float(k)) for k in ks])
            ),
        }
        for theta, suffix in theta_suffixes(spec):
            omegas = np.array(
                [
                    eigenfrequencies(
                        coupling_constants(self.model, ProbePoint(k=float(k), theta=theta)),
                        self.model.omega_A,
                    )
                    for k in ks
                ]
            )
            values = units.angular_to_hz(omegas)
            columns["Omega_upper_over_2pi_Hz" + suffix] = values[:, 0]
            columns["Omega_middle_over_2pi_Hz" + suffix] = values[:, 1]
            columns["Omega_lower_over_2pi_Hz" + suffix] = values[:, 2]
        return ResultTable(name=name, columns=columns)

    def _weights(
        self, spec: SweepSpec, name: str, convention: DarkModeConvention
    ) -> ResultTable:
        grid = spec.grid.values_si()
        if spec.kind is SweepKind.WEIGHTS_VS_K:
            sweep_column = "k_per_m"
            series = [
                ([ProbePoint(k=float(k), theta=theta) for k in grid], suffix)
                for theta, suffix in theta_suffixes(spec)
            ]
        else:
            sweep_column = "theta_rad"
            series = [([ProbePoint(k=spec.k_per_m, theta=float(theta)) for theta in grid], "")]

        columns = {sweep_column: grid}
        for points, suffix in series:
            weights = np.array(
                [
                    resolve_modes(
                        coupling_constants(self.model, p), self.model.omega_A, convention
                    ).weights
                    for p in points
                ]
            )
            for branch in spec.branches:
                label = branch.label + suffix
                columns[f"abs_X_sq_{label}"] = weights[:, int(branch), 0]
                columns[f"abs_Y_s_sq_{label}"] = weights[:, int(branch), 1]
                columns[f"abs_Y_p_sq_{label}"] = weights[:, int(branch), 2]
        return ResultTable(name=name, columns=columns, convention=convention)

    def _spectra(
        self, spec: SweepSpec, name: str, convention: DarkModeConvention
    ) -> ResultTable:
        if spec.grid is not None:
            omega_grid = spec.grid.values_si()
        else:
            omega_grid = self.default_omega_grid(spec.k_per_m)
        inc = drive_field(spec.drive)
        drive_label = spec.drive
        if drive_label not in (Polarization.S.value, Polarization.P.value):
            drive_label = "superposition"

        columns = {"omega_over_2pi_Hz": units.angular_to_hz(omega_grid)}
        with WorkerPool(self.worker_count) as pool:
            for theta, suffix in theta_suffixes(spec):
                points = spectrum_sweep(
                    self.model,
                    ProbePoint(k=spec.k_per_m, theta=theta),
                    self.damping,
                    inc,
                    omega_grid,
                    convention=convention,
                    mapper=pool.map,
                    chunk_size=self.chunk_size,
                )
                spectra_points_evaluated_total.labels(drive=drive_label).inc(len(points))

                for observable in spec.selected_observables:
                    columns[observable_column(observable) + suffix] = np.array(
                        [getattr(point, observable) for point in points]
                    )
                    if spec.unwrap_phases and observable in PHASE_OBSERVABLES:
                        columns[f"{observable}_unwrapped_rad{suffix}"] = unwrap_phases(
                            points, observable
                        )

                shifted = np.array([int(point.pole_shifted) for point in points], dtype=int)
                columns["pole_shifted" + suffix] = shifted
                if shifted.any():
                    pole_perturbations_total.inc(int(shifted.sum()))
                    logger.warning(
                        "pole_perturbed",
                        name=name,
                        theta=theta,
                        convention=convention.value,
                        points=int(shifted.sum()),
                    )

        return ResultTable(name=name, columns=columns, convention=convention)
