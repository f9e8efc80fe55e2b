"""Full and effective Hamiltonians of the XY-chain Tavis-Cummings model.

All frequency-like quantities (``omega0``, ``omega_a``, ``g``, ``lam``, ``h``)
are angular frequencies. Matrices live on the spin-major product space of
:mod:`tcxy.hilbert`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import hilbert
from .edoracle import xy_hamiltonian
from .errors import ConfigurationError, SingularDetuningError
from .freefermion import XYParams

VALIDITY_THRESHOLD = 10.0


@dataclass(frozen=True)
class SystemParams:
    omega0: float
    omega_a: float
    g: float
    xy: XYParams
    n_bar: float = 0.0
    alpha_phase: float = 0.0
    theta: float = math.pi / 2
    phi: float = 0.0
    varphi: float = 0.0
    fock_cutoff: int | None = field(default=None)

    def __post_init__(self):
        if self.n_bar < 0:
            raise ConfigurationError(f"n_bar must be >= 0, got {self.n_bar}", key="n_bar")

    @property
    def n_spins(self) -> int:
        return self.xy.n_spins

    @property
    def detuning(self) -> float:
        """Delta = omega0 - h - omega_a, recomputed from the current field."""
        return self.omega0 - self.xy.h - self.omega_a

    @property
    def alpha(self) -> complex:
        return math.sqrt(self.n_bar) * complex(math.cos(self.alpha_phase), math.sin(self.alpha_phase))

    @property
    def hilbert(self) -> hilbert.HilbertSpec:
        cutoff = hilbert.default_cutoff(self.n_bar) if self.fock_cutoff is None else self.fock_cutoff
        return hilbert.HilbertSpec(self.n_spins, cutoff)

    def with_field(self, h: float) -> "SystemParams":
        return replace(self, xy=replace(self.xy, h=h))

    def with_xy(self, **changes) -> "SystemParams":
        return replace(self, xy=replace(self.xy, **changes))


@dataclass(frozen=True)
class ValidityReport:
    """Ratios that must all be large for the dispersive reduction to hold.

    ``r1 = Delta^2/(g^2 N)``, ``r2 = Delta^2 n/(g^2 N^2)``, ``r3 = |Delta|/lam``,
    ``r4 = n/N``. ``residue_bound`` is the heuristic size ``lam`` of the
    frequency residue neglected next to Delta.
    """

    r1: float
    r2: float
    r3: float
    r4: float
    threshold: float
    passed: bool
    residue_bound: float

    def as_dict(self) -> dict:
        return {
            "r1": self.r1,
            "r2": self.r2,
            "r3": self.r3,
            "r4": self.r4,
            "threshold": self.threshold,
            "pass": self.passed,
            "residue_bound": self.residue_bound,
        }


def _dispersive_coupling(p: SystemParams) -> float:
    delta = p.detuning
    if delta == 0:
        raise SingularDetuningError("effective Hamiltonians are undefined at zero detuning")
    return p.g**2 / delta


class _Ops:
    """Spin-factor and cavity-factor building blocks for one parameter set."""

    def __init__(self, p: SystemParams):
        self.spec = p.hilbert
        n = p.n_spins
        self.jz = hilbert.spin_collective(n, "z")
        self.jp = hilbert.spin_collective(n, "+")
        self.jm = self.jp.conj().T
        self.id_s = np.eye(self.spec.spin_dim)
        self.id_c = np.eye(self.spec.cavity_dim)
        self.num = np.diag(np.arange(self.spec.cavity_dim, dtype=float))

    def a(self):
        if self.spec.fock_cutoff < 1:
            raise ConfigurationError("cavity coupling requested with fock_cutoff = 0", key="fock_cutoff")
        return hilbert.annihilation(self.spec.fock_cutoff)


def spin_chain(xy: XYParams) -> np.ndarray:
    """H0(h) on the spin factor, periodic boundary included."""
    return xy_hamiltonian(xy).astype(complex)


def build_full(p: SystemParams) -> np.ndarray:
    """omega0 J_z + omega_a a^dag a + H0(h) + g (a^dag J_- + a J_+)."""
    o = _Ops(p)
    h = np.kron(p.omega0 * o.jz + spin_chain(p.xy), o.id_c)
    h = h + p.omega_a * np.kron(o.id_s, o.num)
    if p.g != 0:
        a = o.a()
        h = h + p.g * (np.kron(o.jm, a.conj().T) + np.kron(o.jp, a))
    return h


def build_eff(p: SystemParams) -> np.ndarray:
    """H0(h - omega0) + (2 g^2/Delta) J_z a^dag a."""
    chi = _dispersive_coupling(p)
    o = _Ops(p)
    h0 = spin_chain(replace(p.xy, h=p.xy.h - p.omega0))
    return np.kron(h0, o.id_c) + 2.0 * chi * np.kron(o.jz, o.num)


def build_eff_s(p: SystemParams) -> np.ndarray:
    """build_eff plus the exchange term (g^2/Delta) J_+ J_-."""
    chi = _dispersive_coupling(p)
    o = _Ops(p)
    return build_eff(p) + chi * np.kron(o.jp @ o.jm, o.id_c)


def build_eff_rotating(p: SystemParams) -> np.ndarray:
    """-Delta a^dag a + (2 g^2/Delta) J_z a^dag a + (g^2/Delta) J_+ J_-."""
    chi = _dispersive_coupling(p)
    o = _Ops(p)
    return (
        -p.detuning * np.kron(o.id_s, o.num)
        + 2.0 * chi * np.kron(o.jz, o.num)
        + chi * np.kron(o.jp @ o.jm, o.id_c)
    )


BUILDERS = {"full": build_full, "eff": build_eff, "eff_s": build_eff_s}


def validity_report(p: SystemParams, threshold: float = VALIDITY_THRESHOLD) -> ValidityReport:
    n = p.n_spins
    d2 = p.detuning**2
    g2 = p.g**2
    r1 = math.inf if g2 == 0 else d2 / (g2 * n)
    r2 = math.inf if g2 == 0 else d2 * p.n_bar / (g2 * n * n)
    r3 = math.inf if p.xy.lam == 0 else abs(p.detuning) / p.xy.lam
    r4 = p.n_bar / n
    passed = min(r1, r2, r3, r4) >= threshold
    return ValidityReport(r1, r2, r3, r4, threshold, passed, p.xy.lam)
