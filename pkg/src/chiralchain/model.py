"""Single-excitation model of a chirally coupled 1D emitter chain.

Conventions used throughout the library:

- ``gamma_total = gamma_left + gamma_right`` fixes the unit system: rates are
  quoted in units of gamma and times in units of 1/gamma.
- Sites are indexed ``0 .. n_total-1`` from left to right.  The clean zone
  occupies sites ``[0, n_clean)`` and the disordered zone
  ``[n_clean, n_total)``.
- Each site carries a phase ``phi_mu = xi * mu + W_mu`` where ``xi`` is the
  interatomic propagation phase and ``W_mu`` the onsite phase disorder
  (radians, zero on clean sites).  Small position deviations never reorder
  sites, so pairwise phases are plain differences of the ``phi_mu``.
- The single-excitation amplitudes ``a_mu`` evolve as ``da/dt = M a`` with the
  non-Hermitian generator built by :func:`build_coupling_matrix`:

      M[mu][mu] = -gamma/2
      M[mu][nu] = -gamma_right * exp(+i (phi_mu - phi_nu))   for nu < mu
      M[mu][nu] = -gamma_left  * exp(-i (phi_mu - phi_nu))   for nu > mu

  i.e. every emitter is driven by the field emitted to its side with the full
  directional rate, the standard cascaded/chiral convention.  The Hermitian
  part of M is the rank-2 negative-semidefinite form
  ``-(gamma_right u u^+ + gamma_left w w^+)`` with ``u_mu = exp(i phi_mu)``,
  ``w = conj(u)``, so the excitation norm can only decrease.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DimensionMismatchError

__all__ = [
    "SystemConfig",
    "DisorderRealization",
    "CouplingMatrix",
    "AmplitudeState",
    "sample_disorder",
    "site_phases",
    "build_coupling_matrix",
    "dicke_initial_state",
    "zone_sites",
]


@dataclass(frozen=True)
class SystemConfig:
    """Physical and zone-layout parameters of one chain instance.

    Parameters
    ----------
    n_total : int
        Total emitter count N.
    n_clean : int
        Clean-zone size (leftmost sites, no phase disorder).
    n_disordered : int
        Disordered-zone size (rightmost sites); must satisfy
        ``n_clean + n_disordered == n_total``.
    xi : float
        Interatomic phase in radians (photon wave vector times lattice
        spacing).
    directionality : float
        D = (gamma_right - gamma_left) / gamma_total, in [-1, 1].
        D = 0 is reciprocal coupling, |D| = 1 fully cascaded.
    gamma_total : float
        Total single-emitter decay rate; 1.0 fixes the time unit.
    disorder_strength : float
        Half-width of the onsite phase distribution in units of pi,
        in [0, 1].
    """

    n_total: int
    n_clean: int
    n_disordered: int
    xi: float
    directionality: float = 0.0
    gamma_total: float = 1.0
    disorder_strength: float = 0.0

    def __post_init__(self) -> None:
        if self.n_total < 1:
            raise ConfigError(f"n_total must be positive, got {self.n_total}")
        if self.n_clean < 0 or self.n_disordered < 0:
            raise ConfigError("zone sizes must be non-negative")
        if self.n_clean + self.n_disordered != self.n_total:
            raise ConfigError(
                f"n_clean + n_disordered must equal n_total: "
                f"{self.n_clean} + {self.n_disordered} != {self.n_total}"
            )
        if not np.isfinite(self.xi):
            raise ConfigError(f"xi must be finite, got {self.xi}")
        if not -1.0 <= self.directionality <= 1.0:
            raise ConfigError(
                f"directionality must lie in [-1, 1], got {self.directionality}"
            )
        if not self.gamma_total > 0.0:
            raise ConfigError(f"gamma_total must be positive, got {self.gamma_total}")
        if not 0.0 <= self.disorder_strength <= 1.0:
            raise ConfigError(
                f"disorder_strength must lie in [0, 1], got {self.disorder_strength}"
            )

    @property
    def gamma_right(self) -> float:
        return 0.5 * self.gamma_total * (1.0 + self.directionality)

    @property
    def gamma_left(self) -> float:
        return 0.5 * self.gamma_total * (1.0 - self.directionality)

    @property
    def clean_sites(self) -> np.ndarray:
        return np.arange(self.n_clean)

    @property
    def disordered_sites(self) -> np.ndarray:
        return np.arange(self.n_clean, self.n_total)

    @property
    def right_half_sites(self) -> np.ndarray:
        return np.arange(self.n_total // 2, self.n_total)

    def digest(self) -> str:
        """Stable content hash of the configuration (hex sha256)."""
        payload = {f.name: getattr(self, f.name) for f in fields(self)}
        blob = json.dumps(payload, sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class DisorderRealization:
    """One sampled vector of onsite phases W_mu plus the seed that made it."""

    phases: np.ndarray
    seed: int

    def digest(self) -> str:
        h = hashlib.sha256(np.ascontiguousarray(self.phases).tobytes())
        h.update(str(self.seed).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense N x N generator M of the amplitude dynamics, units of gamma."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class AmplitudeState:
    """Complex amplitudes a_mu with the cached total population."""

    amplitudes: np.ndarray
    norm_sq: float

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "AmplitudeState":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls(amplitudes, float(np.sum(np.abs(amplitudes) ** 2)))


def sample_disorder(config: SystemConfig, seed: int) -> DisorderRealization:
    """Draw one disorder realization: W_mu = 0 on clean sites and i.i.d.
    uniform on ``pi * [-w, +w]`` on disordered sites (w = disorder_strength).

    Identical (config, seed) pairs reproduce identical phases bit-for-bit.
    """
    rng = np.random.default_rng(seed)
    phases = np.zeros(config.n_total)
    half_width = np.pi * config.disorder_strength
    phases[config.n_clean:] = rng.uniform(
        -half_width, half_width, size=config.n_disordered
    )
    return DisorderRealization(phases, int(seed))


def site_phases(config: SystemConfig, disorder: DisorderRealization) -> np.ndarray:
    """Per-site propagation phases phi_mu = xi * mu + W_mu.

    These same phases enter the coupling matrix and the output photon flux;
    only differences (and global rotations) of phi are ever observable.
    """
    if disorder.phases.shape != (config.n_total,):
        raise DimensionMismatchError(
            f"disorder has {disorder.phases.shape[0]} phases for "
            f"{config.n_total} sites"
        )
    return config.xi * np.arange(config.n_total) + disorder.phases


def build_coupling_matrix(
    config: SystemConfig, disorder: DisorderRealization
) -> CouplingMatrix:
    """Assemble the dense non-Hermitian generator M (see module docstring).

    The coupling is infinite-range, so the matrix is genuinely dense; at
    D = +1 it is lower triangular (fully cascaded, no back-action).
    """
    phi = site_phases(config, disorder)
    diff = phi[:, None] - phi[None, :]
    kernel = np.exp(1j * diff)
    m = -(
        config.gamma_right * np.tril(kernel, -1)
        + config.gamma_left * np.triu(np.conj(kernel), 1)
    )
    np.fill_diagonal(m, -0.5 * config.gamma_total)
    return CouplingMatrix(m)


def zone_sites(config: SystemConfig, zone) -> np.ndarray:
    """Resolve a zone selector to an array of site indices.

    ``zone`` may be one of the strings "disordered", "clean", "right_half",
    "left_half", or any iterable of site indices.
    """
    if isinstance(zone, str):
        named = {
            "disordered": config.disordered_sites,
            "clean": config.clean_sites,
            "right_half": config.right_half_sites,
            "left_half": np.arange(config.n_total // 2),
        }
        if zone not in named:
            raise ConfigError(f"unknown zone {zone!r}; expected one of {sorted(named)}")
        return named[zone]
    sites = np.asarray(list(zone), dtype=int)
    if sites.size and (sites.min() < 0 or sites.max() >= config.n_total):
        raise ConfigError(f"zone sites out of range for n_total={config.n_total}")
    return sites


def dicke_initial_state(config: SystemConfig, zone="disordered") -> AmplitudeState:
    """Symmetric Dicke state: a_mu = 1/sqrt(|zone|) on zone sites, 0 elsewhere."""
    sites = zone_sites(config, zone)
    if sites.size == 0:
        raise ConfigError("cannot build a Dicke state on an empty zone")
    amplitudes = np.zeros(config.n_total, dtype=complex)
    amplitudes[sites] = 1.0 / np.sqrt(sites.size)
    return AmplitudeState.from_amplitudes(amplitudes)


def trajectory_digest(config: SystemConfig, disorder: DisorderRealization) -> str:
    """Provenance hash tying a trajectory to its (config, disorder) pair."""
    h = hashlib.sha256((config.digest() + disorder.digest()).encode())
    return h.hexdigest()
