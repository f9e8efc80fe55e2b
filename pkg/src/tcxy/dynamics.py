"""Spectral time evolution and the full-vs-effective J_phi comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import DomainError
from .hamiltonians import BUILDERS, SystemParams, ValidityReport, validity_report

NORM_TOL = 1e-10


class Propagator:
    """exp(-i H t) from a single Hermitian eigendecomposition of H."""

    def __init__(self, h: np.ndarray):
        h = np.asarray(h)
        if not hilbert.is_hermitian(h):
            raise DomainError("time evolution needs a Hermitian Hamiltonian")
        self.dim = h.shape[0]
        self.energies, self.vectors = np.linalg.eigh(h)

    def _coefficients(self, psi0: np.ndarray) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (self.dim,):
            raise DomainError(f"state of shape {psi0.shape} does not match Hamiltonian dimension {self.dim}")
        return self.vectors.conj().T @ psi0

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        c = self._coefficients(psi0)
        return self.vectors @ (np.exp(-1j * self.energies * t) * c)

    def evolve_many(self, psi0: np.ndarray, times) -> np.ndarray:
        """States at all ``times`` as the columns of a (dim, len(times)) array."""
        c = self._coefficients(psi0)
        phases = np.exp(-1j * np.outer(self.energies, np.asarray(times, dtype=float)))
        return self.vectors @ (phases * c[:, None])


def evolve(h: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    return Propagator(h).evolve(psi0, t)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    observable_label: str
    max_imag: float = 0.0


def initial_state(p: SystemParams) -> np.ndarray:
    """|theta, phi> (spins) tensor |alpha> (cavity)."""
    spec = p.hilbert
    return hilbert.tensor(
        hilbert.spin_coherent_state(spec, p.theta, p.phi),
        hilbert.coherent_state(spec, p.alpha),
    )


def j_phi(p: SystemParams) -> np.ndarray:
    n = p.n_spins
    op = math.cos(p.varphi) * hilbert.spin_collective(n, "x") + math.sin(p.varphi) * hilbert.spin_collective(n, "y")
    return hilbert.embed_spin(op, p.hilbert)


def expectation_series(prop: Propagator, psi0: np.ndarray, op: np.ndarray, times) -> tuple[np.ndarray, float]:
    states = prop.evolve_many(psi0, times)
    vals = np.einsum("it,it->t", states.conj(), op @ states)
    return vals.real, float(np.max(np.abs(vals.imag), initial=0.0))


def j_phi_series(p: SystemParams, which: str, times) -> TimeSeries:
    """<J_phi(t)> under the ``full``, ``eff`` or ``eff_s`` Hamiltonian."""
    if which not in BUILDERS:
        raise DomainError(f"which must be one of {sorted(BUILDERS)}, got {which!r}")
    times = np.asarray(times, dtype=float)
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise DomainError("times must be strictly increasing")
    prop = Propagator(BUILDERS[which](p))
    values, max_imag = expectation_series(prop, initial_state(p), j_phi(p), times)
    return TimeSeries(times, values, f"J_phi[{which}]", max_imag)


@dataclass(frozen=True)
class DynamicsComparison:
    max_abs_dev: float
    mean_abs_dev: float
    series_full: TimeSeries
    series_eff: TimeSeries
    validity: ValidityReport


def compare_dynamics(p: SystemParams, times) -> DynamicsComparison:
    report = validity_report(p)
    if not report.passed:
        warnings.warn(
            "dispersive validity conditions not met: "
            + ", ".join(f"{k}={v:.3g}" for k, v in report.as_dict().items() if k.startswith("r")),
            RuntimeWarning,
            stacklevel=2,
        )
    full = j_phi_series(p, "full", times)
    eff = j_phi_series(p, "eff", times)
    dev = np.abs(full.values - eff.values)
    return DynamicsComparison(float(dev.max()), float(dev.mean()), full, eff, report)
