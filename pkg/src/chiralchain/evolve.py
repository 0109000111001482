"""Time propagation of amplitude states under the coupling matrix.

The default path diagonalizes the generator once and evaluates
``a(t) = V exp(L t) V^-1 a(0)`` at every output time, which makes very long
horizons (gamma t ~ 1e4 on a logarithmic grid) cheap.  Fully cascaded chains
(|D| = 1) and fine-tuned phases produce defective generators; those are
detected through the eigenvector condition number and the reconstruction
residual, and propagation falls back to scaling-and-squaring matrix
exponentials stepped over the grid gaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DefectiveMatrixError, DimensionMismatchError, NonConvergedError
from .model import AmplitudeState, CouplingMatrix
from .spectral import SpectralSample

__all__ = [
    "TimeGrid",
    "AmplitudeTrajectory",
    "ModalRepresentation",
    "log_time_grid",
    "linear_time_grid",
    "eigendecompose",
    "propagate",
]

#: Eigenvector condition number beyond which the basis is treated as defective.
CONDITION_LIMIT = 1e12

#: Reconstruction residual limit, relative to max|M| (100x round-off at N=500).
RESIDUAL_LIMIT = 1e-8

#: Allowed upward noise in the (physically non-increasing) norm sequence.
NORM_SLACK = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Ascending output times in units of 1/gamma."""

    points: np.ndarray
    spacing: str = "logarithmic"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("time grid must be a non-empty 1-D array")
        if pts[0] < 0.0 or np.any(np.diff(pts) <= 0.0):
            raise ValueError("time grid must be non-negative and strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    def index_of(self, t: float) -> int:
        """Index of the grid point closest to ``t``."""
        return int(np.argmin(np.abs(self.points - t)))


def log_time_grid(
    t_min: float = 1e-2,
    t_max: float = 1e4,
    n_points: int = 200,
    include_zero: bool = True,
) -> TimeGrid:
    """Logarithmic grid over [t_min, t_max], optionally prefixed with t = 0."""
    pts = np.logspace(np.log10(t_min), np.log10(t_max), n_points)
    if include_zero:
        pts = np.concatenate([[0.0], pts])
    return TimeGrid(pts, "logarithmic")


def linear_time_grid(t_min: float, t_max: float, n_points: int) -> TimeGrid:
    return TimeGrid(np.linspace(t_min, t_max, n_points), "linear")


@dataclass(frozen=True)
class ModalRepresentation:
    """Trajectory in the eigenbasis: a(t) = sum_n coefficients[n] *
    exp(eigenvalues[n] t) * vectors[:, n].

    Kept on spectral-path trajectories so quadratic functionals of a(t),
    such as time-integrated photon fluxes, can be integrated in closed form
    instead of by quadrature on the output grid.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    coefficients: np.ndarray


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Amplitudes along a time grid: row k holds a(t_k)."""

    grid: TimeGrid
    amplitudes: np.ndarray
    config_digest: str = ""
    modal: ModalRepresentation | None = None

    @property
    def norms(self) -> np.ndarray:
        """Total surviving population per grid point."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def state_at(self, index: int) -> AmplitudeState:
        return AmplitudeState.from_amplitudes(self.amplitudes[index])


def eigendecompose(
    matrix: CouplingMatrix, disorder_seed: int = -1, validate: bool = True
) -> SpectralSample:
    """Diagonalize the generator, sorted by energy shift (imaginary part).

    With ``validate`` (the default, required before using the decomposition
    to propagate), a near-defective eigenvector basis is rejected.  Level
    statistics only need eigenvalues and eigenvector weights and may pass
    ``validate=False``.

    Raises
    ------
    DefectiveMatrixError
        If the eigenvector condition number exceeds CONDITION_LIMIT or the
        reconstruction ``V L V^-1`` misses the matrix by more than
        RESIDUAL_LIMIT (relative, max norm).  Callers fall back to stepped
        matrix exponentials.
    """
    entries = matrix.entries
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatchError("coupling matrix must be square")
    values, vectors = np.linalg.eig(entries)

    if validate:
        scale = float(np.max(np.abs(entries)))
        try:
            inverse = np.linalg.inv(vectors)
        except np.linalg.LinAlgError as exc:
            raise DefectiveMatrixError("eigenvector matrix is singular") from exc
        condition = float(np.linalg.norm(vectors, 1) * np.linalg.norm(inverse, 1))
        if condition > CONDITION_LIMIT:
            raise DefectiveMatrixError(
                f"eigenvector condition number {condition:.3e} exceeds "
                f"{CONDITION_LIMIT:.0e}"
            )
        residual = float(np.max(np.abs((vectors * values) @ inverse - entries)))
        if residual > RESIDUAL_LIMIT * max(scale, np.finfo(float).tiny):
            raise DefectiveMatrixError(
                f"eigendecomposition residual {residual:.3e} exceeds tolerance"
            )

    order = np.lexsort((np.arange(values.size), values.real, values.imag))
    return SpectralSample(values[order], vectors[:, order], disorder_seed)


def propagate(
    matrix: CouplingMatrix,
    initial: AmplitudeState,
    grid: TimeGrid,
    decomposition: SpectralSample | None = None,
) -> AmplitudeTrajectory:
    """Evolve ``initial`` under ``da/dt = M a`` and sample it on ``grid``.

    A precomputed ``decomposition`` of the same matrix may be passed to share
    work with spectral statistics.  The returned trajectory satisfies the
    norm monotonicity contract (non-increasing within NORM_SLACK); if the
    spectral path cannot deliver that, the matrix-exponential fallback is
    used transparently.
    """
    a0 = np.asarray(initial.amplitudes, dtype=complex)
    if a0.shape != (matrix.n,):
        raise DimensionMismatchError(
            f"initial state has {a0.shape[0]} amplitudes for {matrix.n} sites"
        )
    amps = None
    modal = None
    if decomposition is None:
        try:
            decomposition = eigendecompose(matrix)
        except DefectiveMatrixError:
            decomposition = None
    if decomposition is not None:
        coeffs = np.linalg.solve(decomposition.eigenvectors, a0)
        phases = np.exp(np.outer(grid.points, decomposition.eigenvalues))
        amps = (phases * coeffs) @ decomposition.eigenvectors.T
        if _norms_ok(amps, initial.norm_sq):
            modal = ModalRepresentation(
                decomposition.eigenvalues, decomposition.eigenvectors, coeffs
            )
        else:
            amps = None  # spectral path too inaccurate; re-do by stepping
    if amps is None:
        amps = _propagate_stepped(matrix.entries, a0, grid.points)
        if not _norms_ok(amps, initial.norm_sq):
            raise NonConvergedError(
                "fallback propagator violated norm monotonicity"
            )
    return AmplitudeTrajectory(grid, amps, modal=modal)


def _norms_ok(amps: np.ndarray, norm0: float) -> bool:
    if not np.all(np.isfinite(amps)):
        return False
    norms = np.concatenate([[norm0], np.sum(np.abs(amps) ** 2, axis=1)])
    return bool(np.all(np.diff(norms) <= NORM_SLACK))


def _propagate_stepped(entries: np.ndarray, a0: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring matrix exponential stepped over the grid gaps."""
    out = np.empty((points.size, a0.size), dtype=complex)
    current = a0.astype(complex)
    t_prev = 0.0
    for k, t in enumerate(points):
        gap = t - t_prev
        if gap > 0.0:
            current = scipy.linalg.expm(entries * gap) @ current
        out[k] = current
        t_prev = t
    if not np.all(np.isfinite(out)):
        raise NonConvergedError("matrix-exponential stepping produced non-finite values")
    return out
