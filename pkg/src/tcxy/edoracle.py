"""Brute-force exact diagonalisation of the periodic XY chain.

Independent of the momentum-space formulas: the Hamiltonian is assembled
bit by bit in the sigma^z basis and diagonalised numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _accel
from .errors import BudgetError, DomainError
from .freefermion import JzMoments, XYParams

MAX_SPINS = 14
DENSE_LIMIT = 256
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class EdGroundState:
    energy: float
    state: np.ndarray
    parity: int


def _basis(n_spins: int, parity: str | None):
    states = np.arange(2**n_spins, dtype=np.int64)
    if parity is not None:
        ndown = np.zeros_like(states)
        for i in range(n_spins):
            ndown += (states >> i) & 1
        want = 0 if parity == "even" else 1
        states = states[ndown % 2 == want]
    lookup = np.full(2**n_spins, -1, dtype=np.int64)
    lookup[states] = np.arange(states.size)
    return states, lookup


def xy_hamiltonian(p: XYParams, parity: str | None = None, sparse: bool = False):
    """H0(h) in the full 2^N basis, or restricted to one parity sector.

    ``parity`` is ``None`` (all states), ``"even"`` (prod sz = +1) or
    ``"odd"``. Returns a real dense array unless ``sparse`` is set.
    """
    if parity not in (None, "even", "odd"):
        raise DomainError(f"parity must be None, 'even' or 'odd'; got {parity!r}")
    states, lookup = _basis(p.n_spins, parity)
    rows, cols, vals = _accel.xy_coo(int(p.n_spins), float(p.lam), float(p.gamma), float(p.h), states, lookup)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(states.size, states.size)).tocsr()
    return m if sparse else m.toarray()


def _sector_states(n_spins: int, parity: str | None) -> np.ndarray:
    return _basis(n_spins, parity)[0]


def _jz_diag(n_spins: int, states: np.ndarray) -> np.ndarray:
    ndown = np.zeros_like(states)
    for i in range(n_spins):
        ndown += (states >> i) & 1
    return (n_spins - 2 * ndown) / 2.0


def _lowest(p: XYParams, parity: str):
    """Lowest few eigenpairs of one parity sector."""
    h = xy_hamiltonian(p, parity, sparse=True)
    n = h.shape[0]
    if n <= DENSE_LIMIT:
        w, v = np.linalg.eigh(h.toarray())
        return w[: min(n, 8)], v[:, : min(n, 8)]
    v0 = np.random.default_rng(0).standard_normal(n)
    w, v = spla.eigsh(h, k=6, which="SA", tol=0, v0=v0)
    order = np.argsort(w)
    return w[order], v[:, order]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[i]) / vec[i])


def xy_ground_state(p: XYParams, parity: str | None = None) -> EdGroundState:
    """Ground state of H0(h) by exact diagonalisation.

    With ``parity=None`` the global ground state is returned; a degeneracy
    between sectors is resolved toward even parity. Inside a degenerate
    manifold of one sector the state of largest <J_z> is chosen (consistent
    with treating exact zero modes as empty). The largest-magnitude amplitude
    is made real and positive.
    """
    if p.n_spins > MAX_SPINS:
        raise BudgetError(f"dense ED limited to N <= {MAX_SPINS}, got N={p.n_spins}")
    n = p.n_spins
    scale = max(1.0, p.lam, abs(p.h)) * n
    sectors = ("even", "odd") if parity is None else (parity,)
    candidates = []
    for sec in sectors:
        w, v = _lowest(p, sec)
        candidates.append((w[0], sec, w, v))
    e0 = min(c[0] for c in candidates)
    # prefer even parity among (near-)degenerate sectors
    for energy, sec, w, v in candidates:
        if energy <= e0 + DEGENERACY_TOL * scale:
            break
    manifold = v[:, w <= w[0] + DEGENERACY_TOL * scale]
    states = _sector_states(n, sec)
    jz = _jz_diag(n, states)
    if manifold.shape[1] > 1:
        proj = manifold.T.conj() @ (jz[:, None] * manifold)
        _, u = np.linalg.eigh(proj)
        vec = manifold @ u[:, -1]
    else:
        vec = manifold[:, 0]
    vec = vec / np.linalg.norm(vec)
    full = np.zeros(2**n, dtype=complex)
    full[states] = vec
    full = _fix_phase(full)
    return EdGroundState(float(energy), full, 1 if sec == "even" else -1)


def jz_moments_ed(p: XYParams, parity: str | None = "even") -> JzMoments:
    """J_z moments of the ED ground state (even-parity sector by default)."""
    gs = xy_ground_state(p, parity)
    jz = _jz_diag(p.n_spins, np.arange(2**p.n_spins, dtype=np.int64))
    prob = np.abs(gs.state) ** 2
    mean = float(prob @ jz)
    second = float(prob @ jz**2)
    return JzMoments(mean, second, max(second - mean**2, 0.0))


def qfi_ed(p, t: float, **kwargs) -> float:
    """Fidelity-based QFI of the full light-matter model (end-to-end reference)."""
    from .metrology import qfi_numeric

    return qfi_numeric(p, t, which="full", **kwargs)
