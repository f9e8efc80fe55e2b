"""Free-fermion solution of the periodic XY chain.

The chain ``H0(h) = -(lam/2) sum_i [(1+gamma)/2 sx_i sx_{i+1} + (1-gamma)/2 sy_i sy_{i+1}] - (h/2) sum_i sz_i``
maps to a BCS-like quadratic fermion model. Every ground-state moment of
``J_z`` used here is a sum (or integral) over momenta of the Bogoliubov
angles ``(sin nu_k, cos nu_k)``.

Two momentum sectors are offered:

``"paper"``
    ``k = 2 pi m / N`` for ``m = -N/2+1, ..., N/2`` (periodic fermions; the
    physical states here have odd fermion parity).
``"antiperiodic"``
    ``k = +-(2m-1) pi / N`` (even fermion parity; contains the even-parity
    spin ground state).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _accel
from .errors import DomainError, UnsupportedConfigurationError

SECTORS = ("paper", "antiperiodic")


@dataclass(frozen=True)
class XYParams:
    """Coupling ``lam``, anisotropy ``gamma``, field ``h`` and chain length ``n_spins``."""

    lam: float
    gamma: float
    h: float
    n_spins: int

    def __post_init__(self):
        if self.lam < 0:
            raise DomainError(f"lam must be >= 0, got {self.lam}")
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise DomainError(f"n_spins must be a positive integer, got {self.n_spins}")

    def gap_tolerance(self) -> float:
        return 1e-12 * max(self.lam, abs(self.h), 1.0)


@dataclass(frozen=True)
class MomentumGrid:
    sector: str
    momenta: np.ndarray


@dataclass(frozen=True)
class BogoliubovSpectrum:
    grid: MomentumGrid
    energies: np.ndarray
    sin_nu: np.ndarray
    cos_nu: np.ndarray
    gapless: np.ndarray  # True where the gapless-mode convention was applied


@dataclass(frozen=True)
class JzMoments:
    """Mean, second moment and variance of J_z.

    For thermodynamic-limit results the fields hold densities instead:
    ``mean = <J_z>/N``, ``second = <J_z^2>/N^2``, ``variance = Var(J_z)/N``.
    """

    mean: float
    second: float
    variance: float


class Phase(str, enum.Enum):
    FERROMAGNETIC = "ferromagnetic"
    PARAMAGNETIC = "paramagnetic"
    CRITICAL = "critical"
    FACTORIZATION_POINT = "factorization_point"


def _check_sector(sector: str) -> None:
    if sector not in SECTORS:
        raise DomainError(f"sector must be one of {SECTORS}, got {sector!r}")


def momentum_grid(n_spins: int, sector: str = "paper") -> MomentumGrid:
    _check_sector(sector)
    if n_spins < 2 or n_spins % 2:
        raise UnsupportedConfigurationError(
            f"momentum grids need an even chain length >= 2, got N={n_spins}", key="n_spins"
        )
    if sector == "paper":
        m = np.arange(-n_spins // 2 + 1, n_spins // 2 + 1)
        k = 2.0 * np.pi * m / n_spins
    else:
        m = np.arange(1, n_spins // 2 + 1)
        pos = (2 * m - 1) * np.pi / n_spins
        k = np.sort(np.concatenate([-pos, pos]))
    return MomentumGrid(sector, k)


def excitation_energy(k, p: XYParams):
    """Lambda_k = sqrt((h - lam cos k)^2 + lam^2 gamma^2 sin^2 k)."""
    k = np.asarray(k, dtype=float)
    a = p.h - p.lam * np.cos(k)
    b = p.lam * p.gamma * np.sin(k)
    return np.sqrt(a * a + b * b)


def bogoliubov_angles(k, p: XYParams, epsilon: float | None = None):
    """``(sin nu_k, cos nu_k)``; gapless modes get ``(0, -1)``."""
    eps = p.gap_tolerance() if epsilon is None else epsilon
    k = np.asarray(k, dtype=float)
    a = p.lam * np.cos(k) - p.h
    b = p.lam * p.gamma * np.sin(k)
    energy = np.sqrt(a * a + b * b)
    gapped = energy > eps
    safe = np.where(gapped, energy, 1.0)
    sin_nu = np.where(gapped, b / safe, 0.0)
    cos_nu = np.where(gapped, a / safe, -1.0)
    return sin_nu, cos_nu


def bogoliubov_spectrum(p: XYParams, sector: str = "paper", epsilon: float | None = None) -> BogoliubovSpectrum:
    grid = momentum_grid(p.n_spins, sector)
    eps = p.gap_tolerance() if epsilon is None else epsilon
    energies = excitation_energy(grid.momenta, p)
    sin_nu, cos_nu = bogoliubov_angles(grid.momenta, p, eps)
    return BogoliubovSpectrum(grid, energies, sin_nu, cos_nu, energies <= eps)


def jz_moments(p: XYParams, sector: str = "paper") -> JzMoments:
    """Ground-state J_z moments from finite momentum sums.

    ``Var = (1/2) sum sin^2 nu``, ``<J_z> = -(1/2) sum cos nu`` and
    ``<J_z^2> = Var + <J_z>^2``.
    """
    grid = momentum_grid(p.n_spins, sector)
    sum_sin2, sum_cos, _ = _accel.angle_sums(grid.momenta, float(p.lam), float(p.gamma), float(p.h), p.gap_tolerance())
    variance = 0.5 * sum_sin2
    mean = -0.5 * sum_cos
    return JzMoments(mean, 0.5 * sum_sin2 + 0.25 * sum_cos**2, variance)


def has_zero_mode(p: XYParams, sector: str = "paper") -> bool:
    """True when some grid momentum sits exactly on a gap closing."""
    return bool(bogoliubov_spectrum(p, sector).gapless.any())


def ground_energy(p: XYParams, sector: str = "antiperiodic") -> float:
    """Quasiparticle vacuum energy ``-(1/2) sum_k Lambda_k`` on the chosen grid."""
    return float(-0.5 * np.sum(bogoliubov_spectrum(p, sector).energies))


def _kinks(p: XYParams) -> list[float]:
    """Points in (0, pi) where the angle integrands are non-smooth or sharply varying."""
    pts = []
    r = p.h / p.lam
    if -1.0 <= r <= 1.0:
        pts.append(math.acos(r))
    if p.gamma > 1.0:
        w = 1.0 / p.gamma
        pts.extend([w, math.pi - w])
    if 0.0 < p.gamma < 1.0:
        pts.extend([p.gamma, math.pi - p.gamma])
    return sorted(x for x in set(pts) if 0.0 < x < math.pi)


def jz_moments_thermo(p: XYParams, epsabs: float = 1e-12) -> JzMoments:
    """Thermodynamic-limit densities ``<J_z>/N``, ``<J_z^2>/N^2``, ``Var/N``.

    Both integrands are even in k, so the integrals run over [0, pi] with
    explicit break points at ``arccos(h/lam)`` and at the 1/gamma features.
    """
    if p.lam <= 0:
        raise DomainError("thermodynamic moments need lam > 0")

    def sin2(k):
        s, _ = bogoliubov_angles(k, p)
        return float(s * s)

    def cos_(k):
        _, c = bogoliubov_angles(k, p)
        return float(c)

    pts = _kinks(p)
    edges = [0.0, *pts, math.pi]
    tot_sin2 = 0.0
    tot_cos = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        tot_sin2 += integrate.quad(sin2, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=400)[0]
        tot_cos += integrate.quad(cos_, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=400)[0]
    # (1/(4 pi)) * integral over (-pi, pi) = (1/(2 pi)) * integral over (0, pi)
    var_density = tot_sin2 / (2.0 * math.pi)
    mean_density = -tot_cos / (2.0 * math.pi)
    return JzMoments(mean_density, mean_density**2, var_density)


def phase_classify(p: XYParams, tol: float = 1e-12) -> Phase:
    """Ground-state phase of the chain, after rescaling to lam = 1."""
    if p.lam == 0:
        return Phase.CRITICAL if p.h == 0 else Phase.PARAMAGNETIC
    h = abs(p.h) / p.lam
    if abs(h - 1.0) <= tol:
        return Phase.CRITICAL
    if abs(p.gamma**2 + h**2 - 1.0) <= tol:
        return Phase.FACTORIZATION_POINT
    return Phase.FERROMAGNETIC if h < 1.0 else Phase.PARAMAGNETIC
