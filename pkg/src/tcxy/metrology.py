"""Quantum Fisher information for estimating the field h.

The closed form used throughout is

    F_h = 4 t^2 [ (1 - 2 g^2 n / Delta^2)^2 Var(J_z) + (4 g^4 / Delta^4) n <J_z^2> ]

with ground-state moments from :mod:`tcxy.freefermion`. :func:`qfi_numeric`
is an independent fidelity-susceptibility estimate obtained by evolving the
actual state under H(h) and H(h + dh).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .dynamics import Propagator
from .edoracle import xy_ground_state
from .errors import BudgetError, DomainError, RegimePreconditionError, SingularDetuningError, StepTooLargeError, StepTooSmallError
from .freefermion import JzMoments, jz_moments, jz_moments_thermo
from .hamiltonians import BUILDERS, SystemParams

REGIMES = ("tc_no_interaction", "ising_weak", "strong_field", "xx_para", "xx_ferro", "large_gamma")
# factor standing in for "much less / much greater than"
MARGIN = 10.0

DEFICIT_FLOOR = 1e-12
DEFICIT_CEIL = 1e-2
DEFICIT_WINDOW = (4e-8, 1e-4)
DEFICIT_TARGET = 1e-6
MAX_DIM = 4096


@dataclass(frozen=True)
class QfiResult:
    value: float
    t: float
    var_term: float
    jz2_term: float
    regime_label: str | None = None


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    intercept: float
    r_squared: float
    n_bar_range: tuple[float, float]


@dataclass(frozen=True)
class GeneratorCoefficients:
    """Generator ``(spin + photon * a^dag a) J_z t`` with ``photon = -2 g^2/Delta^2``.

    The overall sign is kept as commonly printed; differentiating the
    effective Hamiltonian gives the opposite sign, which the QFI ignores.
    """

    spin: float
    photon: float
    t: float

    def matrix(self, spec: hilbert.HilbertSpec) -> np.ndarray:
        jz = hilbert.spin_collective(spec.n_spins, "z")
        cav = self.spin * np.eye(spec.cavity_dim) + self.photon * np.diag(np.arange(spec.cavity_dim, dtype=float))
        return self.t * np.kron(jz, cav)


def generator_coefficients(p: SystemParams, t: float = 1.0) -> GeneratorCoefficients:
    delta = p.detuning
    if delta == 0:
        raise SingularDetuningError("generator undefined at zero detuning")
    return GeneratorCoefficients(1.0, -2.0 * p.g**2 / delta**2, t)


def _moments(p: SystemParams, sector: str) -> tuple[float, float]:
    m = moments_for(p, sector)
    return m.variance, m.second


def qfi_from_moments(p: SystemParams, t: float, variance: float, second: float) -> QfiResult:
    delta = p.detuning
    if delta == 0:
        raise SingularDetuningError("QFI formula undefined at zero detuning")
    c = 2.0 * p.g**2 / delta**2
    var_term = (1.0 - c * p.n_bar) ** 2 * variance
    jz2_term = c * c * p.n_bar * second
    return QfiResult(4.0 * t * t * (var_term + jz2_term), t, var_term, jz2_term)


def qfi_analytic(p: SystemParams, t: float, sector: str = "paper") -> QfiResult:
    """Closed-form QFI; ``sector`` is ``paper``, ``antiperiodic`` or ``thermo``."""
    variance, second = _moments(p, sector)
    return qfi_from_moments(p, t, variance, second)


def local_exponent(p: SystemParams, sector: str = "paper") -> float:
    """d log F / d log n at the current n (analytic, t-independent)."""
    variance, second = _moments(p, sector)
    c = 2.0 * p.g**2 / p.detuning**2
    n = p.n_bar
    f = (1.0 - c * n) ** 2 * variance + c * c * n * second
    df = -2.0 * c * (1.0 - c * n) * variance + c * c * second
    return n * df / f


def _require(ok: bool, regime: str, inequality: str, p: SystemParams) -> None:
    if not ok:
        xy = p.xy
        raise RegimePreconditionError(
            f"{regime} requires {inequality}; got lam={xy.lam:g}, gamma={xy.gamma:g}, h={xy.h:g}"
        )


def detect_regime(p: SystemParams) -> str | None:
    """Name of the closed-form regime whose preconditions hold, if any."""
    for regime in REGIMES:
        try:
            _check_regime(p, regime)
        except RegimePreconditionError:
            continue
        return regime
    return None


def _check_regime(p: SystemParams, regime: str) -> None:
    lam, gamma, h = p.xy.lam, p.xy.gamma, abs(p.xy.h)
    if regime == "tc_no_interaction":
        _require(lam == 0, regime, "lam == 0", p)
    elif regime == "ising_weak":
        _require(lam > 0, regime, "lam > 0", p)
        _require(gamma == 1, regime, "gamma == 1", p)
        _require(h * MARGIN <= lam, regime, f"h <= lam/{MARGIN:g} (h << lam)", p)
    elif regime == "strong_field":
        _require(h >= MARGIN * lam, regime, f"h >= {MARGIN:g}*lam (h >> lam)", p)
    elif regime == "xx_para":
        _require(gamma == 0, regime, "gamma == 0", p)
        _require(h > lam, regime, "h > lam", p)
    elif regime == "xx_ferro":
        _require(gamma == 0, regime, "gamma == 0", p)
        _require(h < lam, regime, "h < lam", p)
    elif regime == "large_gamma":
        _require(gamma >= MARGIN, regime, f"gamma >= {MARGIN:g} (gamma >> 1)", p)
        _require(h < lam, regime, "h < lam", p)
    else:
        raise DomainError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def regime_prefactor(p: SystemParams, regime: str) -> float:
    """Dimensionless factor multiplying 4 g^4 t^2 / Delta^4 in each closed form."""
    n, nb = p.n_spins, p.n_bar
    if regime in ("tc_no_interaction", "strong_field", "xx_para"):
        return n * n * nb
    if regime == "ising_weak":
        return n * nb * nb
    if regime == "xx_ferro":
        r = p.xy.h / p.xy.lam
        return (2.0 * math.acos(r) - math.pi) ** 2 / math.pi**2 * n * n * nb
    if regime == "large_gamma":
        return 2.0 * n * nb * nb
    raise DomainError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def qfi_regime(p: SystemParams, t: float, regime: str) -> QfiResult:
    """Leading-order closed form of the QFI in one of the named regimes."""
    _check_regime(p, regime)
    delta = p.detuning
    if delta == 0:
        raise SingularDetuningError("QFI formula undefined at zero detuning")
    value = 4.0 * p.g**4 / delta**4 * t * t * regime_prefactor(p, regime)
    quarter = value / (4.0 * t * t) if t else 0.0
    heisenberg = regime in ("ising_weak", "large_gamma")
    return QfiResult(value, t, quarter if heisenberg else 0.0, 0.0 if heisenberg else quarter, regime)


# --- numerical fidelity-susceptibility QFI ------------------------------------


def _initial_state(p: SystemParams, initial: str) -> np.ndarray:
    spec = p.hilbert
    if initial == "ground":
        spins = xy_ground_state(p.xy).state
    elif initial == "coherent":
        spins = hilbert.spin_coherent_state(spec, p.theta, p.phi)
    else:
        raise DomainError(f"initial must be 'ground' or 'coherent', got {initial!r}")
    return hilbert.tensor(spins, hilbert.coherent_state(spec, p.alpha))


def _deficit(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |<a|b>| from the phase-aligned difference norm (no cancellation)."""
    ov = np.vdot(a, b)
    phase = ov / abs(ov) if ov != 0 else 1.0
    diff = b - phase * a
    return 0.5 * float(np.vdot(diff, diff).real)


class _Evolver:
    def __init__(self, p: SystemParams, t: float, which: str, initial: str):
        if which not in ("full", "eff", "eff_s"):
            raise DomainError(f"which must be 'full', 'eff' or 'eff_s'; got {which!r}")
        self.p, self.t, self.build = p, t, BUILDERS[which]
        self.psi0 = _initial_state(p, initial)
        self.ref = Propagator(self.build(p)).evolve(self.psi0, t)

    def deficit(self, dh: float) -> float:
        shifted = self.p.with_field(self.p.xy.h + dh)
        psi = Propagator(self.build(shifted)).evolve(self.psi0, self.t)
        return _deficit(self.ref, psi)


def _fidelity_qfi(ev: _Evolver, dh: float) -> tuple[float, float]:
    d = ev.deficit(dh)
    if d < DEFICIT_FLOOR:
        raise StepTooSmallError(f"overlap deficit {d:.2e} below numeric floor at dh={dh:g}")
    if d > DEFICIT_CEIL:
        raise StepTooLargeError(f"overlap deficit {d:.2e} too large at dh={dh:g}")
    return 8.0 * d / dh**2, d


def qfi_numeric(
    p: SystemParams,
    t: float,
    which: str = "eff",
    dh: float | None = None,
    initial: str = "ground",
) -> float:
    """Fidelity-based QFI, Richardson-refined over steps ``dh`` and ``dh/2``.

    Without ``dh`` the step is tuned until the overlap deficit of the larger
    step lies in ``DEFICIT_WINDOW``. A state whose deficit stays below the
    numeric floor even for large steps has zero QFI.
    """
    if p.hilbert.dim > MAX_DIM:
        raise BudgetError(f"numeric QFI limited to dim <= {MAX_DIM}, got {p.hilbert.dim}")
    if t == 0:
        return 0.0
    ev = _Evolver(p, t, which, initial)
    if dh is None:
        dh = _tune_step(ev, p, t)
        if dh is None:
            return 0.0
    f1, _ = _fidelity_qfi(ev, dh)
    f2, _ = _fidelity_qfi(ev, dh / 2.0)
    return max((4.0 * f2 - f1) / 3.0, 0.0)


def _tune_step(ev: _Evolver, p: SystemParams, t: float) -> float | None:
    n = max(p.n_spins, 1)
    # keep h + dh well away from zero detuning
    cap = abs(p.detuning) / 100.0 if p.detuning != 0 else math.inf
    dh = min(1e-3 / (abs(t) * n), cap)
    lo, hi = DEFICIT_WINDOW
    for _ in range(60):
        d = ev.deficit(dh)
        if lo <= d <= hi:
            return dh
        if d < DEFICIT_FLOOR:
            if dh >= cap or dh * abs(t) * n >= 1e3:
                return None
            dh = min(dh * 100.0, cap)
        elif d < lo and dh >= cap:
            return dh
        else:
            dh = min(dh * math.sqrt(DEFICIT_TARGET / d), cap)
    raise StepTooSmallError("could not bracket the finite-difference step")


def scaling_fit(points) -> ScalingFit:
    """Least-squares line through (log n, log F)."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise DomainError("scaling fit needs at least 4 (n_bar, F) points")
    nb, f = pts[:, 0], pts[:, 1]
    if np.any(nb <= 0) or np.any(f <= 0):
        raise DomainError("scaling fit needs strictly positive n_bar and F values")
    if math.log10(nb.max() / nb.min()) < 1.5:
        raise DomainError("n_bar must span at least 1.5 decades")
    x, y = np.log(nb), np.log(f)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ScalingFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0), (float(nb.min()), float(nb.max())))


def moments_for(p: SystemParams, sector: str = "paper") -> JzMoments:
    """J_z moments for a finite momentum sector, or N-scaled limits for ``"thermo"``."""
    if sector == "thermo" and p.xy.lam > 0:
        d = jz_moments_thermo(p.xy)
        n = p.n_spins
        return JzMoments(n * d.mean, n * d.variance + (n * d.mean) ** 2, n * d.variance)
    return jz_moments(p.xy, "paper" if sector == "thermo" else sector)
