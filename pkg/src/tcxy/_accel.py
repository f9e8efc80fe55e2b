"""Hot numeric kernels, compiled with numba when available.

Every kernel exists twice: a numba ``@njit`` loop version and a vectorised
numpy version with identical semantics. The numba path is used when numba
imports cleanly and the environment variable ``TCXY_DISABLE_NUMBA`` is unset
(or ``0``/``false``). Both implementations are always importable so tests and
``benchmarks/bench_accel.py`` can compare them directly.
"""

import os

import numpy as np

_FLAG = os.environ.get("TCXY_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by TCXY_DISABLE_NUMBA")
    import numba

    njit = numba.njit
    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(f):
            return f

        return wrapper


# ---------------------------------------------------------------------------
# XY chain matrix elements in the sigma^z basis
#
# Site 1 is the most significant of the N bits of a basis index; bit value 1
# means spin down. Bonds are periodic (site N couples to site 1).
# ---------------------------------------------------------------------------


def _xy_coo_numba_impl(n_spins, lam, gamma, h, states, lookup):
    dim = states.shape[0]
    max_nnz = dim * (n_spins + 1)
    rows = np.empty(max_nnz, dtype=np.int64)
    cols = np.empty(max_nnz, dtype=np.int64)
    vals = np.empty(max_nnz, dtype=np.float64)
    same = -0.5 * lam * gamma
    diff = -0.5 * lam
    nnz = 0
    for col in range(dim):
        s = states[col]
        ndown = 0
        for i in range(n_spins):
            ndown += (s >> (n_spins - 1 - i)) & 1
        diag = -0.5 * h * (n_spins - 2 * ndown)
        if n_spins == 1:
            # sigma_1 sigma_1 is the identity on a one-site ring
            diag -= 0.5 * lam
        rows[nnz] = col
        cols[nnz] = col
        vals[nnz] = diag
        nnz += 1
        if n_spins == 1:
            continue
        for i in range(n_spins):
            j = (i + 1) % n_spins
            bi = (s >> (n_spins - 1 - i)) & 1
            bj = (s >> (n_spins - 1 - j)) & 1
            mask = (1 << (n_spins - 1 - i)) | (1 << (n_spins - 1 - j))
            t = s ^ mask
            row = lookup[t]
            if row < 0:
                continue
            amp = same if bi == bj else diff
            if amp == 0.0:
                continue
            rows[nnz] = row
            cols[nnz] = col
            vals[nnz] = amp
            nnz += 1
    return rows[:nnz], cols[:nnz], vals[:nnz]


def xy_coo_numpy(n_spins, lam, gamma, h, states, lookup):
    """Vectorised twin of the numba COO builder (duplicates are summed later)."""
    states = np.asarray(states, dtype=np.int64)
    dim = states.shape[0]
    shifts = n_spins - 1 - np.arange(n_spins)
    bits = (states[:, None] >> shifts[None, :]) & 1
    ndown = bits.sum(axis=1)
    diag = -0.5 * h * (n_spins - 2 * ndown).astype(np.float64)
    if n_spins == 1:
        diag = diag - 0.5 * lam
    idx = np.arange(dim, dtype=np.int64)
    rows = [idx]
    cols = [idx]
    vals = [diag]
    if n_spins > 1:
        for i in range(n_spins):
            j = (i + 1) % n_spins
            mask = (1 << int(shifts[i])) | (1 << int(shifts[j]))
            target = lookup[states ^ mask]
            amp = np.where(bits[:, i] == bits[:, j], -0.5 * lam * gamma, -0.5 * lam)
            keep = (target >= 0) & (amp != 0.0)
            rows.append(target[keep])
            cols.append(idx[keep])
            vals.append(amp[keep])
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


xy_coo_jit = njit(cache=True)(_xy_coo_numba_impl)


# ---------------------------------------------------------------------------
# Bogoliubov angle sums over a momentum grid
# ---------------------------------------------------------------------------


def _angle_sums_numba_impl(momenta, lam, gamma, h, eps):
    sum_sin2 = 0.0
    sum_cos = 0.0
    n_gapless = 0
    for idx in range(momenta.shape[0]):
        k = momenta[idx]
        a = lam * np.cos(k) - h
        b = lam * gamma * np.sin(k)
        energy = np.sqrt(a * a + b * b)
        if energy > eps:
            s = b / energy
            sum_sin2 += s * s
            sum_cos += a / energy
        else:
            # gapless mode: sin = 0, cos = sgn(0) = -1
            n_gapless += 1
            sum_cos -= 1.0
    return sum_sin2, sum_cos, n_gapless


def angle_sums_numpy(momenta, lam, gamma, h, eps):
    """Return ``(sum sin^2 nu_k, sum cos nu_k, number of gapless modes)``."""
    k = np.asarray(momenta, dtype=np.float64)
    a = lam * np.cos(k) - h
    b = lam * gamma * np.sin(k)
    energy = np.sqrt(a * a + b * b)
    gapped = energy > eps
    safe = np.where(gapped, energy, 1.0)
    sin_nu = np.where(gapped, b / safe, 0.0)
    cos_nu = np.where(gapped, a / safe, -1.0)
    return float(np.sum(sin_nu * sin_nu)), float(np.sum(cos_nu)), int(np.count_nonzero(~gapped))


angle_sums_jit = njit(cache=True)(_angle_sums_numba_impl)


if NUMBA_ENABLED:
    xy_coo = xy_coo_jit
    angle_sums = angle_sums_jit
else:
    xy_coo = xy_coo_numpy
    angle_sums = angle_sums_numpy
