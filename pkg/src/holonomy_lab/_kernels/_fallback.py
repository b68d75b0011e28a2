"""Pure Python / numpy implementations of the hot kernels.

Same call signatures and return conventions as the compiled ``_core``
module; selected automatically when the extension is not built.
"""
import math

import numpy as np


def _fix_phases(vecs):
    # Columns of vecs: rotate so the largest-magnitude amplitude is real positive.
    idx = np.argmax(np.abs(vecs), axis=-2)
    lead = np.take_along_axis(vecs, idx[..., None, :], axis=-2)
    mag = np.abs(lead)
    mag[mag == 0] = 1.0
    out = vecs * (np.conj(lead) / mag)
    np.put_along_axis(out, idx[..., None, :], np.abs(lead).astype(complex), axis=-2)
    return out


def eigh2_batch(H):
    """Closed-form eigensystems of a stack of 2x2 Hermitian matrices.

    Returns ascending eigenvalues ``(m, 2)`` and column eigenvectors
    ``(m, 2, 2)``.
    """
    H = np.asarray(H, dtype=complex)
    a = H[:, 0, 0].real
    d = H[:, 1, 1].real
    b = H[:, 0, 1]
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    s = np.hypot(half, np.abs(b))
    w = np.column_stack([mean - s, mean + s])

    pos = half >= 0
    up0 = np.where(pos, half + s, b)
    up1 = np.where(pos, np.conj(b), s - half)
    norm = np.sqrt(np.abs(up0) ** 2 + np.abs(up1) ** 2)
    degenerate = norm == 0
    norm[degenerate] = 1.0
    up0 = np.where(degenerate, 0.0, up0 / norm)
    up1 = np.where(degenerate, 1.0, up1 / norm)
    lo0 = -np.conj(up1)
    lo1 = np.conj(up0)
    lo0 = np.where(degenerate, 1.0, lo0)
    lo1 = np.where(degenerate, 0.0, lo1)

    V = np.empty((H.shape[0], 2, 2), dtype=complex)
    V[:, 0, 0] = lo0
    V[:, 1, 0] = lo1
    V[:, 0, 1] = up0
    V[:, 1, 1] = up1
    return w, _fix_phases(V)


def jacobi_eigh(H, tol=1e-14, max_sweeps=60):
    """Cyclic complex Jacobi rotations.

    Returns ``(w, V, converged)``; eigenvalues ascending, eigenvectors as
    columns with the largest amplitude made real positive.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    Q = np.eye(n, dtype=complex)
    scale = np.sqrt(np.sum(np.abs(A) ** 2))
    offdiag = ~np.eye(n, dtype=bool)
    converged = False
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A[offdiag]) ** 2))
        if off <= tol * scale or scale == 0.0:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app = A[p, p].real
                aqq = A[q, q].real
                two_theta = math.atan2(2.0 * mag, aqq - app)
                if two_theta > 0.5 * math.pi:
                    two_theta -= math.pi
                c = math.cos(0.5 * two_theta)
                s = math.sin(0.5 * two_theta)
                ph_conj = phase.conjugate()
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * ph_conj * colq
                A[:, q] = s * colp + c * ph_conj * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * phase * rowq
                A[q, :] = s * rowp + c * phase * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                qp = Q[:, p].copy()
                qq = Q[:, q].copy()
                Q[:, p] = c * qp - s * ph_conj * qq
                Q[:, q] = s * qp + c * ph_conj * qq
    else:
        converged = np.sqrt(np.sum(np.abs(A[offdiag]) ** 2)) <= tol * scale
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], _fix_phases(Q[:, order]), converged


def jacobi_eigh_batch(H, tol=1e-14, max_sweeps=60):
    H = np.asarray(H, dtype=complex)
    m, n = H.shape[0], H.shape[1]
    w = np.empty((m, n))
    V = np.empty((m, n, n), dtype=complex)
    ok = np.empty(m, dtype=bool)
    for k in range(m):
        w[k], V[k], ok[k] = jacobi_eigh(H[k], tol, max_sweeps)
    return w, V, ok


def link_overlaps(states, closed):
    """``<psi_k|psi_{k+1}>`` for consecutive rows (plus wraparound if closed)."""
    states = np.asarray(states, dtype=complex)
    nxt = np.roll(states, -1, axis=0) if closed else states[1:]
    cur = states if closed else states[:-1]
    return np.einsum("ij,ij->i", np.conj(cur), nxt)


def unit_product_angle(links):
    """Argument of the product of ``links``, each reduced to unit modulus first."""
    prod = 1.0 + 0.0j
    for z in np.asarray(links, dtype=complex).tolist():
        az = abs(z)
        if az == 0.0:
            continue
        prod *= z / az
        prod /= abs(prod)
    return math.atan2(prod.imag, prod.real)


def transport(states):
    """Rephase each row so consecutive overlaps are real and positive."""
    states = np.asarray(states, dtype=complex)
    out = states.copy()
    for k in range(1, states.shape[0]):
        ov = np.vdot(out[k - 1], states[k])
        mag = abs(ov)
        if mag > 0.0:
            out[k] = states[k] * (ov.conjugate() / mag)
    return out


def segment_angle_sum(xy, cx, cy, closed):
    """Sum of signed angles swept around ``(cx, cy)`` by a polyline.

    Returns ``(total_angle, min_distance, argmin_segment)``.
    """
    xy = np.asarray(xy, dtype=float)
    u = xy - (cx, cy)
    v = np.roll(u, -1, axis=0) if closed else u[1:]
    u = u if closed else u[:-1]
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
    angles = np.arctan2(cross, dot)
    total = 0.0
    for a in angles.tolist():
        total += a
    # distance from the center to each segment
    seg = v - u
    seg_len2 = np.sum(seg * seg, axis=1)
    safe = np.where(seg_len2 > 0, seg_len2, 1.0)
    t = np.clip(-np.sum(u * seg, axis=1) / safe, 0.0, 1.0)
    t = np.where(seg_len2 > 0, t, 0.0)
    nearest = u + t[:, None] * seg
    dist = np.hypot(nearest[:, 0], nearest[:, 1])
    k = int(np.argmin(dist))
    return total, float(dist[k]), k
