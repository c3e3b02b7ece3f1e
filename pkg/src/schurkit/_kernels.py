"""Hot numeric kernels, JIT-compiled when numba is available.

Two inner loops dominate the multiplier-norm runtime: the Dykstra-corrected
alternating-projection feasibility solver and the alternating ascent that
sharpens evaluation lower bounds.  Both are written once, in a form numba
can compile, and dispatched through ``@njit`` unless the environment
variable ``SCHURKIT_NO_NUMBA`` is set to a non-empty value other than
``0``/``false``/``no``, in which case the same source runs as plain numpy.

The two paths compute the same thing; ``benchmarks/bench_kernels.py``
compares their speed and ``tests/test_kernels.py`` pins their agreement.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("SCHURKIT_NO_NUMBA", "")
    return flag.strip().lower() not in ("", "0", "false", "no")


NUMBA_ENABLED = not _numba_disabled()
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


FEASIBLE = 1
INFEASIBLE = -1
ITERATION_CAP = 0
CERTIFIED = 2


def _extraction_bound(y, psi, p, q):
    """Upper bound extractable from a PSD iterate whose block may miss psi.

    Row/column absolute sums of the block mismatch are diagonal boosts that
    restore the block exactly while keeping positive semidefiniteness, so
    sqrt(max_i(A_ii + r_i) * max_j(B_jj + c_j)) is always a valid bound.
    """
    t1 = -1e300
    for i in range(p):
        r = 0.0
        for j in range(q):
            r += np.abs(psi[i, j] - y[i, p + j])
        d = np.real(y[i, i]) + r
        if d > t1:
            t1 = d
    t2 = -1e300
    for j in range(q):
        c = 0.0
        for i in range(p):
            c += np.abs(psi[i, j] - y[i, p + j])
        d = np.real(y[p + j, p + j]) + c
        if d > t2:
            t2 = d
    if t1 < 0.0:
        t1 = 0.0
    if t2 < 0.0:
        t2 = 0.0
    return np.sqrt(t1 * t2)


def _dykstra_core(
    psi, t, x0, max_iter, eps_feas, eps_gap, stall_change, stall_window,
    cert_slack, check_every,
):
    """Decide whether some PSD matrix has off-diagonal block ``psi`` and diagonal <= t.

    Dykstra-corrected alternating projections between the PSD cone and the
    affine/box set {H Hermitian : H[:p, p:] == psi, Re diag(H) <= t},
    started at ``x0`` (pass the block matrix with diagonal t when no warmer
    point is available).

    Returns ``(status, y, iters, gap)`` where ``y`` is a PSD-track iterate.
    Status is 1 (feasible within ``eps_feas`` relative Frobenius distance),
    2 (the extractable certificate reached ``t + cert_slack``; checked every
    ``check_every`` iterations when ``cert_slack`` > 0), -1 (the inter-track
    gap stalled above ``eps_gap``: infeasible), or 0 (iteration cap).
    Distance tolerances are relative to ||psi||_F.
    """
    p, q = psi.shape
    s = p + q
    scale = np.sqrt(np.sum(np.abs(psi) ** 2))
    if scale < 1e-300:
        scale = 1e-300

    x = x0.copy()
    pc = np.zeros_like(x)
    qc = np.zeros_like(x)

    best_y = x.copy()
    best_d2 = 1e300
    gap = 1e300
    gap_prev = 1e300
    stall = 0

    for k in range(max_iter):
        # project the shifted iterate onto the PSD cone
        m1 = x + pc
        w, v = np.linalg.eigh(m1)
        wc = np.maximum(w, 0.0)
        y = (v * wc) @ v.conj().T
        y = 0.5 * (y + y.conj().T)
        pc = m1 - y

        # distance from the PSD-track point to the affine/box set
        dsq = 0.0
        for i in range(p):
            for j in range(q):
                dsq += 2.0 * np.abs(y[i, p + j] - psi[i, j]) ** 2
        for i in range(s):
            excess = np.real(y[i, i]) - t
            if excess > 0.0:
                dsq += excess * excess
        d2 = np.sqrt(dsq)
        if d2 < best_d2:
            best_d2 = d2
            best_y = y.copy()
        if d2 <= eps_feas * scale:
            return FEASIBLE, best_y, k + 1, gap
        if cert_slack > 0.0 and (k + 1) % check_every == 0:
            if _extraction_bound(y, psi, p, q) <= t + cert_slack:
                return CERTIFIED, y, k + 1, gap

        # project the shifted PSD point onto the affine/box set
        m2 = y + qc
        m2 = 0.5 * (m2 + m2.conj().T)
        x = m2.copy()
        x[:p, p:] = psi
        x[p:, :p] = psi.conj().T
        for i in range(s):
            d = np.real(m2[i, i])
            if d > t:
                d = t
            x[i, i] = d
        qc = m2 - x

        gap = np.sqrt(np.sum(np.abs(y - x) ** 2))
        if gap > eps_gap * scale and gap_prev - gap <= stall_change * scale:
            stall += 1
            if stall >= stall_window:
                return INFEASIBLE, best_y, k + 1, gap
        else:
            stall = 0
        gap_prev = gap

    return ITERATION_CAP, best_y, max_iter, gap


def _eval_ascent_core(psi, u0, v0, max_iter, rel_tol):
    """Alternately maximize ||psi * a|| over unit-spectral-norm a.

    Given row/column weight vectors (u, v), the best input is the conjugated
    polar factor of diag(conj(u)) psi diag(v); given an input a, the best
    weights are the top singular pair of psi * a.  Each step is the exact
    maximizer of the other block, so the ratio ascends monotonically.

    Returns ``(ratio, a, iters)`` with ``a`` of unit spectral norm.
    """
    u = u0 / np.sqrt(np.sum(np.abs(u0) ** 2))
    v = v0 / np.sqrt(np.sum(np.abs(v0) ** 2))
    best = -1.0
    best_a = np.zeros_like(psi)
    iters = 0
    for k in range(max_iter):
        iters = k + 1
        m = np.outer(u.conj(), v) * psi
        uu, _, vh = np.linalg.svd(m, full_matrices=False)
        a = (uu @ vh).conj()
        s2 = np.linalg.svd(psi * a, full_matrices=False)
        val = s2[1][0]
        if val <= best * (1.0 + rel_tol):
            break
        best = val
        best_a = a
        u = s2[0][:, 0].copy()
        v = s2[2][0, :].conj().copy()
    return best, best_a, iters


if NUMBA_ENABLED:
    _extraction_bound = njit(cache=True)(_extraction_bound)
    dykstra_core = njit(cache=True)(_dykstra_core)
    eval_ascent_core = njit(cache=True)(_eval_ascent_core)
else:
    dykstra_core = _dykstra_core
    eval_ascent_core = _eval_ascent_core
