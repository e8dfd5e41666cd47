"""Hot loops with a numba path and a pure-numpy fallback.

Set ``BOUNDLAB_DISABLE_NUMBA=1`` to force the numpy implementations.  Both
backends run the same algorithm on the same inputs; results agree to
floating-point round-off.
"""

import os
from warnings import warn

import numpy as np

_disabled = os.environ.get("BOUNDLAB_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    if not _disabled:
        warn("numba not installed; using numpy kernels", UserWarning)

USE_NUMBA = HAVE_NUMBA and not _disabled
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- see-saw

def _seesaw_numpy(K4, b0, iters, tol, sign):
    n_restarts = b0.shape[0]
    vals = np.empty(n_restarts)
    conv = np.zeros(n_restarts, dtype=np.bool_)
    best_a = np.zeros(K4.shape[0], dtype=np.complex128)
    best_b = np.zeros(K4.shape[1], dtype=np.complex128)
    best = -np.inf
    for r in range(n_restarts):
        b = b0[r].copy()
        prev = -np.inf
        val = -np.inf
        for _ in range(iters):
            Ka = np.einsum("iajb,a,b->ij", K4, b.conj(), b)
            w, v = np.linalg.eigh(sign * 0.5 * (Ka + Ka.conj().T))
            a = v[:, -1]
            Kb = np.einsum("iajb,i,j->ab", K4, a.conj(), a)
            w, v = np.linalg.eigh(sign * 0.5 * (Kb + Kb.conj().T))
            b = v[:, -1]
            val = w[-1]
            if abs(val - prev) < tol:
                conv[r] = True
                break
            prev = val
        vals[r] = val
        if val > best:
            best = val
            best_a = a
            best_b = b
    return vals, conv, best_a, best_b


def _seesaw_loops(K4, b0, iters, tol, sign):
    dA = K4.shape[0]
    dB = K4.shape[1]
    n_restarts = b0.shape[0]
    vals = np.empty(n_restarts)
    conv = np.zeros(n_restarts, dtype=np.bool_)
    best_a = np.zeros(dA, dtype=np.complex128)
    best_b = np.zeros(dB, dtype=np.complex128)
    best = -np.inf
    Ka = np.empty((dA, dA), dtype=np.complex128)
    Kb = np.empty((dB, dB), dtype=np.complex128)
    for r in range(n_restarts):
        b = b0[r].copy()
        a = np.zeros(dA, dtype=np.complex128)
        prev = -np.inf
        val = -np.inf
        for _ in range(iters):
            for i in range(dA):
                for j in range(dA):
                    acc = 0j
                    for p in range(dB):
                        bp = np.conj(b[p])
                        for q in range(dB):
                            acc += K4[i, p, j, q] * bp * b[q]
                    Ka[i, j] = sign * acc
            for i in range(dA):
                for j in range(i, dA):
                    h = 0.5 * (Ka[i, j] + np.conj(Ka[j, i]))
                    Ka[i, j] = h
                    Ka[j, i] = np.conj(h)
            w, v = np.linalg.eigh(Ka)
            a = v[:, dA - 1].copy()
            for p in range(dB):
                for q in range(dB):
                    acc = 0j
                    for i in range(dA):
                        ai = np.conj(a[i])
                        for j in range(dA):
                            acc += K4[i, p, j, q] * ai * a[j]
                    Kb[p, q] = sign * acc
            for p in range(dB):
                for q in range(p, dB):
                    h = 0.5 * (Kb[p, q] + np.conj(Kb[q, p]))
                    Kb[p, q] = h
                    Kb[q, p] = np.conj(h)
            w, v = np.linalg.eigh(Kb)
            b = v[:, dB - 1].copy()
            val = w[dB - 1]
            if abs(val - prev) < tol:
                conv[r] = True
                break
            prev = val
        vals[r] = val
        if val > best:
            best = val
            best_a = a
            best_b = b
    return vals, conv, best_a, best_b


# ------------------------------------------------------- phase-I simplex

def _phase1(A, b, tol, max_iter):
    # Feasibility of {x >= 0 : A x = b} by the two-phase method, phase I only,
    # with Bland's rule (no cycling).  Returns (feasible, x).
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    for i in range(m):
        s = 1.0
        if b[i] < 0:
            s = -1.0
        for j in range(n):
            T[i, j] = s * A[i, j]
        T[i, n + i] = 1.0
        T[i, n + m] = s * b[i]
    # objective row: minimize sum of artificials -> reduced costs
    for j in range(n + m + 1):
        acc = 0.0
        for i in range(m):
            acc += T[i, j]
        T[m, j] = -acc
    for i in range(m):
        T[m, n + i] = 0.0
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i
    for _ in range(max_iter):
        col = -1
        for j in range(n + m):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            break
        row = -1
        best_ratio = np.inf
        for i in range(m):
            if T[i, col] > tol:
                ratio = T[i, n + m] / T[i, col]
                if ratio < best_ratio - 1e-15 or (abs(ratio - best_ratio) <= 1e-15 and row >= 0 and basis[i] < basis[row]):
                    best_ratio = ratio
                    row = i
        if row < 0:
            break
        piv = T[row, col]
        for j in range(n + m + 1):
            T[row, j] /= piv
        for i in range(m + 1):
            if i != row:
                f = T[i, col]
                if f != 0.0:
                    for j in range(n + m + 1):
                        T[i, j] -= f * T[row, j]
        basis[row] = col
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, n + m]
    feasible = -T[m, n + m] <= 1e-9
    return feasible, x


# ------------------------------------------------ quasi-pure closed form

def _qp_closed_numpy(C):
    # C: (N, d, d) simplex coefficients; returns (N,) scores
    N, d, _ = C.shape
    flat = C.reshape(N, d * d)
    arg = np.argmax(flat, axis=1)  # first maximum = smallest (k, l)
    n = arg // d
    m = arg % d
    k = np.arange(d)[None, :, None]
    l = np.arange(d)[None, None, :]
    nn = n[:, None, None]
    mm = m[:, None, None]
    partner = C[np.arange(N)[:, None, None], (2 * nn - k) % d, (2 * mm - l) % d]
    cmax = flat[np.arange(N), arg][:, None, None]
    diag = ((k == nn) & (l == mm)).astype(float)
    inner = (1 - 2 / d) * cmax * diag + partner / d ** 2
    S = np.sqrt(np.clip(d / (2 * (d - 1)) * C * inner, 0, None)).reshape(N, d * d)
    S = -np.sort(-S, axis=1)
    return np.maximum(0.0, S[:, 0] - S[:, 1:].sum(axis=1))


def _qp_closed_loops(C):
    N, d, _ = C.shape
    out = np.empty(N)
    S = np.empty(d * d)
    for t in range(N):
        n = 0
        m = 0
        cmax = C[t, 0, 0]
        for k in range(d):
            for l in range(d):
                if C[t, k, l] > cmax:
                    cmax = C[t, k, l]
                    n = k
                    m = l
        for k in range(d):
            for l in range(d):
                inner = C[t, (2 * n - k) % d, (2 * m - l) % d] / d ** 2
                if k == n and l == m:
                    inner += (1 - 2 / d) * cmax
                v = d / (2 * (d - 1)) * C[t, k, l] * inner
                S[k * d + l] = np.sqrt(v) if v > 0 else 0.0
        top = 0.0
        total = 0.0
        for i in range(d * d):
            total += S[i]
            if S[i] > top:
                top = S[i]
        out[t] = max(0.0, 2 * top - total)
    return out


if USE_NUMBA:
    _seesaw_impl = njit(cache=True)(_seesaw_loops)
    _phase1_impl = njit(cache=True)(_phase1)
    _qp_impl = njit(cache=True)(_qp_closed_loops)
else:
    _seesaw_impl = _seesaw_numpy
    _phase1_impl = _phase1
    _qp_impl = _qp_closed_numpy


def seesaw(K4, b0, iters, tol, sign):
    """Alternating eigenvector ascent of ``sign * <ab|K|ab>``.

    Parameters
    ----------
    K4 : complex array, shape (dA, dB, dA, dB)
        Operator reshaped to ``K[(i,a),(j,b)]``.
    b0 : complex array, shape (R, dB)
        Normalized starting vectors, one per restart.
    iters : int
        Maximal alternations per restart.
    tol : float
        Convergence threshold on successive values.
    sign : float
        +1 maximizes, -1 minimizes (the returned values are of ``sign*K``).

    Returns
    -------
    vals, converged, a, b
        Per-restart final values, convergence flags, and the best product
        pair.
    """
    K4 = np.ascontiguousarray(K4, dtype=np.complex128)
    b0 = np.ascontiguousarray(b0, dtype=np.complex128)
    return _seesaw_impl(K4, b0, int(iters), float(tol), float(sign))


def phase1_feasible(A, b, tol=1e-12, max_iter=10000):
    """Return ``(feasible, x)`` for the system ``A x = b, x >= 0``."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return _phase1_impl(A, b, float(tol), int(max_iter))


def quasi_pure_closed(C):
    """Batched closed-form quasi-pure concurrence for (N, d, d) coefficients."""
    C = np.ascontiguousarray(C, dtype=np.float64)
    return _qp_impl(C)
