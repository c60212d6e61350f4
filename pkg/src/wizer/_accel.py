"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a ``*_numba`` version (plain loops under
``@njit``) and a ``*_numpy`` version (vectorised).  The public names
(``kde_sums``, ``sign_changes_rows``) point to the numba versions unless
numba is missing or ``WIZER_DISABLE_NUMBA`` is set to a truthy value before
import.  Both paths must agree bit-for-bit on sign counts and to ~1e-15 on
kernel sums; ``tests/test_accel.py`` checks this.
"""

import math
import os

import numpy as np

TWO_PI = 2.0 * math.pi
# exp(x) == 0.0 in float64 for x < -745.2; skipping those terms is exact.
_UNDERFLOW = -746.0


def _env_disabled():
    return os.environ.get("WIZER_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


njit = numba.njit if HAVE_NUMBA else _noop_jit


# ---------------------------------------------------------------------------
# wrapped Gaussian kernel sums


@njit(cache=True)
def _reach(h):
    """Distance beyond which a Gaussian term underflows; wraps past it are skipped."""
    return math.sqrt(-2.0 * _UNDERFLOW * h) + 1e-9


def _kde_sums_py(nodes, angles, weights, h, m, cutoff):
    G = nodes.shape[0]
    n = angles.shape[0]
    vals = np.zeros(G)
    dens = np.zeros(G)
    inv_h = 1.0 / h
    norm = 1.0 / math.sqrt(TWO_PI * h)
    # wraps beyond ceff underflow to exactly zero for every t in [-pi, pi)
    ceff = min(cutoff, int(math.floor((_reach(h) + math.pi) / TWO_PI)))
    t = np.empty(G)
    k0 = np.empty(G)
    km = np.empty(G)
    for j in range(n):
        a = angles[j]
        for g in range(G):
            d = nodes[g] - a
            t[g] = d - TWO_PI * math.floor((d + math.pi) / TWO_PI)
            k0[g] = 0.0
            km[g] = 0.0
        for c in range(-ceff, ceff + 1):
            shift = TWO_PI * c
            if m == 1:
                for g in range(G):
                    x = t[g] + shift
                    phi = norm * math.exp(-0.5 * x * x * inv_h)
                    k0[g] += phi
                    km[g] += -x * inv_h * phi
            elif m == 2:
                for g in range(G):
                    x = t[g] + shift
                    phi = norm * math.exp(-0.5 * x * x * inv_h)
                    k0[g] += phi
                    km[g] += (x * x * inv_h * inv_h - inv_h) * phi
            else:
                for g in range(G):
                    x = t[g] + shift
                    k0[g] += norm * math.exp(-0.5 * x * x * inv_h)
        w = weights[j]
        for g in range(G):
            dens[g] += w * k0[g]
            vals[g] += w * (k0[g] if m == 0 else km[g])
    return vals, dens


def _kernel_matrix_py(nodes, angles, h, m, cutoff):
    G = nodes.shape[0]
    n = angles.shape[0]
    out = np.zeros((n, G))
    inv_h = 1.0 / h
    norm = 1.0 / math.sqrt(TWO_PI * h)
    reach = _reach(h)
    for j in range(n):
        for g in range(G):
            t = nodes[g] - angles[j]
            t = t - TWO_PI * math.floor((t + math.pi) / TWO_PI)
            acc = 0.0
            for c in range(max(-cutoff, math.ceil((-reach - t) / TWO_PI)),
                           min(cutoff, math.floor((reach - t) / TWO_PI)) + 1):
                x = t + TWO_PI * c
                e = -0.5 * x * x * inv_h
                if e < _UNDERFLOW:
                    continue
                phi = norm * math.exp(e)
                if m == 0:
                    acc += phi
                elif m == 1:
                    acc += -x * inv_h * phi
                else:
                    acc += (x * x * inv_h * inv_h - inv_h) * phi
            out[j, g] = acc
    return out


def _reduce_branch(t):
    return t - TWO_PI * np.floor((t + np.pi) / TWO_PI)


def _wrapped_terms_numpy(t, h, m, cutoff):
    """Sum of the m-th derivative of the C-truncated wrapped normal at t."""
    out = np.zeros_like(t)
    inv_h = 1.0 / h
    norm = 1.0 / math.sqrt(TWO_PI * h)
    for c in range(-cutoff, cutoff + 1):
        x = t + TWO_PI * c
        e = -0.5 * x * x * inv_h
        phi = np.where(e < _UNDERFLOW, 0.0, norm * np.exp(np.maximum(e, _UNDERFLOW)))
        if m == 0:
            out += phi
        elif m == 1:
            out += -x * inv_h * phi
        else:
            out += (x * x * inv_h * inv_h - inv_h) * phi
    return out


def kde_sums_numpy(nodes, angles, weights, h, m, cutoff, chunk=256):
    nodes = np.asarray(nodes, dtype=float)
    vals = np.zeros(nodes.shape[0])
    dens = np.zeros(nodes.shape[0])
    for start in range(0, angles.shape[0], chunk):
        a = angles[start:start + chunk]
        w = weights[start:start + chunk]
        t = _reduce_branch(nodes[None, :] - a[:, None])
        k0 = _wrapped_terms_numpy(t, h, 0, cutoff)
        dens += w @ k0
        vals += w @ (k0 if m == 0 else _wrapped_terms_numpy(t, h, m, cutoff))
    return vals, dens


def kernel_matrix_numpy(nodes, angles, h, m, cutoff):
    t = _reduce_branch(np.asarray(nodes, dtype=float)[None, :] - np.asarray(angles, dtype=float)[:, None])
    return _wrapped_terms_numpy(t, h, m, cutoff)


# ---------------------------------------------------------------------------
# cyclic sign changes


def _sign_changes_rows_py(rows):
    R, n = rows.shape
    out = np.zeros(R, dtype=np.int64)
    for r in range(R):
        first = 0.0
        prev = 0.0
        count = 0
        for i in range(n):
            v = rows[r, i]
            if v == 0.0:
                continue
            if prev == 0.0:
                first = v
            elif (v > 0.0) != (prev > 0.0):
                count += 1
            prev = v
        if prev != 0.0 and (first > 0.0) != (prev > 0.0):
            count += 1
        out[r] = count
    return out


def sign_changes_rows_numpy(rows):
    rows = np.asarray(rows, dtype=float)
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for r in range(rows.shape[0]):
        s = np.sign(rows[r])
        s = s[s != 0]
        if s.size:
            out[r] = int(np.count_nonzero(s != np.roll(s, 1)))
    return out


kde_sums_numba = njit(cache=True)(_kde_sums_py) if HAVE_NUMBA else _kde_sums_py
kernel_matrix_numba = njit(cache=True)(_kernel_matrix_py) if HAVE_NUMBA else _kernel_matrix_py
sign_changes_rows_numba = njit(cache=True)(_sign_changes_rows_py) if HAVE_NUMBA else _sign_changes_rows_py


if USE_NUMBA:
    def kde_sums(nodes, angles, weights, h, m, cutoff):
        return kde_sums_numba(np.ascontiguousarray(nodes, dtype=np.float64),
                              np.ascontiguousarray(angles, dtype=np.float64),
                              np.ascontiguousarray(weights, dtype=np.float64),
                              float(h), int(m), int(cutoff))

    def kernel_matrix(nodes, angles, h, m, cutoff):
        return kernel_matrix_numba(np.ascontiguousarray(nodes, dtype=np.float64),
                                   np.ascontiguousarray(angles, dtype=np.float64),
                                   float(h), int(m), int(cutoff))

    def sign_changes_rows(rows):
        return sign_changes_rows_numba(np.ascontiguousarray(rows, dtype=np.float64))
else:
    kde_sums = kde_sums_numpy
    kernel_matrix = kernel_matrix_numpy
    sign_changes_rows = sign_changes_rows_numpy


def backend():
    """Name of the active kernel backend."""
    return "numba" if USE_NUMBA else "numpy"
