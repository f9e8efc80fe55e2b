"""Operators and states on N spin-1/2 sites times one truncated cavity mode.

Basis ordering is spin-major: site 1 is the slowest-varying tensor factor and
the cavity Fock factor ``|0>, ..., |n_max>`` comes last. Within one site the
order is ``(|up>, |down>)`` so that ``sigma^z = diag(1, -1)``.

Operators are plain dense ``numpy`` arrays and states plain 1-D complex
arrays; the dataclasses here only carry the space description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import special, stats

from .errors import ConfigurationError, DomainError, TruncationError

TAIL_TOLERANCE = 1e-8
HERMITIAN_RTOL = 1e-12

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# sigma^+ = |up><down| raises m_z
_RAISE = np.array([[0, 1], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class HilbertSpec:
    """Spin-chain length and Fock cutoff of the product space."""

    n_spins: int
    fock_cutoff: int = 0

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise DomainError(f"n_spins must be a positive integer, got {self.n_spins}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 0:
            raise DomainError(f"fock_cutoff must be a non-negative integer, got {self.fock_cutoff}")

    @property
    def spin_dim(self) -> int:
        return 2**self.n_spins

    @property
    def cavity_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return self.spin_dim * self.cavity_dim


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    """``max|M - M^dagger| <= rtol * max|M|`` (the zero matrix counts as Hermitian)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = np.max(np.abs(m)) if m.size else 0.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= rtol * scale)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two states or of two square operators."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise DomainError(f"cannot tensor a {a.ndim}-d and a {b.ndim}-d array")
    if a.ndim == 2 and (a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]):
        raise DomainError(f"operators must be square, got {a.shape} and {b.shape}")
    return np.kron(a, b)


# --- spin factor -------------------------------------------------------------


def spin_pauli(n_spins: int, site: int, axis: str) -> np.ndarray:
    """sigma^axis on ``site`` (1-based) acting on the 2^N spin factor only."""
    if axis not in _PAULI:
        raise DomainError(f"axis must be one of x, y, z; got {axis!r}")
    if not 1 <= site <= n_spins:
        raise DomainError(f"site {site} out of range 1..{n_spins}")
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (n_spins - site))
    return np.kron(np.kron(left, _PAULI[axis]), right)


def spin_collective(n_spins: int, axis: str) -> np.ndarray:
    """J_axis on the spin factor; ``axis`` in ``x, y, z, +, -``."""
    if axis == "z":
        # diagonal: (number up - number down) / 2
        idx = np.arange(2**n_spins)
        ndown = np.zeros_like(idx)
        for i in range(n_spins):
            ndown += (idx >> i) & 1
        return np.diag((n_spins - 2 * ndown) / 2.0).astype(complex)
    if axis in ("x", "y"):
        return 0.5 * sum(spin_pauli(n_spins, i, axis) for i in range(1, n_spins + 1))
    if axis in ("+", "-"):
        jp = np.zeros((2**n_spins, 2**n_spins), dtype=complex)
        for i in range(1, n_spins + 1):
            left = np.eye(2 ** (i - 1))
            right = np.eye(2 ** (n_spins - i))
            jp += np.kron(np.kron(left, _RAISE), right)
        return jp if axis == "+" else jp.conj().T
    raise DomainError(f"axis must be one of x, y, z, +, -; got {axis!r}")


def parity_diagonal(n_spins: int) -> np.ndarray:
    """Diagonal of prod_i sigma^z_i, i.e. (-1)^(number of down spins)."""
    idx = np.arange(2**n_spins)
    ndown = np.zeros_like(idx)
    for i in range(n_spins):
        ndown += (idx >> i) & 1
    return np.where(ndown % 2 == 0, 1.0, -1.0)


# --- embedding into the product space ----------------------------------------


def embed_spin(op: np.ndarray, spec: HilbertSpec) -> np.ndarray:
    """op (spin factor) tensor identity (cavity factor)."""
    return np.kron(op, np.eye(spec.cavity_dim))


def embed_cavity(op: np.ndarray, spec: HilbertSpec) -> np.ndarray:
    return np.kron(np.eye(spec.spin_dim), op)


def pauli_site(spec: HilbertSpec, site: int, axis: str) -> np.ndarray:
    return embed_spin(spin_pauli(spec.n_spins, site, axis), spec)


def collective_spin(spec: HilbertSpec, axis: str) -> np.ndarray:
    return embed_spin(spin_collective(spec.n_spins, axis), spec)


def annihilation(fock_cutoff: int) -> np.ndarray:
    """Truncated ``a`` on the cavity factor: a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, fock_cutoff + 1, dtype=float)), 1).astype(complex)


def boson_ops(spec: HilbertSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(a, a^dagger)`` on the full product space."""
    if spec.fock_cutoff < 1:
        raise ConfigurationError("cavity operators need fock_cutoff >= 1", key="fock_cutoff")
    a = embed_cavity(annihilation(spec.fock_cutoff), spec)
    return a, a.conj().T


def number_op(spec: HilbertSpec) -> np.ndarray:
    return embed_cavity(np.diag(np.arange(spec.cavity_dim, dtype=float)).astype(complex), spec)


# --- states ------------------------------------------------------------------


def poisson_tail(n_bar: float, fock_cutoff: int) -> float:
    """Probability mass of a coherent state beyond ``|fock_cutoff>``."""
    if n_bar == 0:
        return 0.0
    return float(stats.poisson.sf(fock_cutoff, n_bar))


def default_cutoff(n_bar: float) -> int:
    """Heuristic cutoff ``ceil(n + 10 sqrt(n) + 10)`` for a mean photon number n."""
    return int(math.ceil(n_bar + 10.0 * math.sqrt(n_bar) + 10.0))


def required_cutoff(n_bar: float, tol: float = TAIL_TOLERANCE) -> int:
    """Smallest cutoff whose Poisson tail is at most ``tol``."""
    if n_bar == 0:
        return 0
    n = int(stats.poisson.ppf(1.0 - tol, n_bar))
    n = max(n - 5, 0)
    while poisson_tail(n_bar, n) > tol:
        n += 1
    return n


def coherent_state(spec: HilbertSpec, alpha: complex, tol: float = TAIL_TOLERANCE) -> np.ndarray:
    """Truncated, renormalised coherent state on the cavity factor."""
    n_bar = abs(alpha) ** 2
    tail = poisson_tail(n_bar, spec.fock_cutoff)
    if tail > tol:
        raise TruncationError(
            f"Poisson tail {tail:.3e} beyond n_max={spec.fock_cutoff} exceeds {tol:g} for |alpha|^2={n_bar:g}",
            required_cutoff(n_bar, tol),
        )
    n = np.arange(spec.cavity_dim)
    if alpha == 0:
        psi = np.zeros(spec.cavity_dim, dtype=complex)
        psi[0] = 1.0
        return psi
    # amplitudes alpha^n / sqrt(n!) in log space; the e^{-|alpha|^2/2} factor is restored by normalising
    log_mag = n * math.log(abs(alpha)) - 0.5 * special.gammaln(n + 1)
    psi = np.exp(log_mag - log_mag.max()) * np.exp(1j * n * np.angle(alpha))
    return psi / np.linalg.norm(psi)


def spin_coherent_state(spec: HilbertSpec, theta: float, phi: float) -> np.ndarray:
    """Product state of ``cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`` on every site."""
    single = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex)
    psi = reduce(np.kron, [single] * spec.n_spins)
    return psi / np.linalg.norm(psi)


def expectation(op: np.ndarray, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, op @ psi))
