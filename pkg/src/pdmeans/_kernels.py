"""Jitted numerical kernels.

Everything here works on raw float64 ndarrays and is compiled with numba;
the public modules wrap these in validated types. The eigensolver is a
cyclic Jacobi sweep: orthogonality of the eigenvector matrix holds by
construction (it is a product of plane rotations), convergence is declared
when the off-diagonal Frobenius mass drops below ``1e-13 * ||A||_F``, and
the output is bit-deterministic for identical input.

Iteration counts returned by the mean solvers are the number of outer
updates actually applied. A ``converged`` flag of False means the cap was
hit; wrappers turn that into :class:`~pdmeans.errors.NoConvergence`.
"""

import numpy as np
from numba import njit

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_OFF = 1e-13


@njit(cache=True)
def jacobi_eigh(A):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(lam, V, converged)`` with eigenvalues ascending and
    eigenvectors in the columns of ``V``.
    """
    d = A.shape[0]
    W = A.copy()
    V = np.eye(d)
    if d == 1:
        lam = np.empty(1)
        lam[0] = W[0, 0]
        return lam, V, True
    fro = 0.0
    for i in range(d):
        for j in range(d):
            fro += W[i, j] * W[i, j]
    thresh = JACOBI_REL_OFF * np.sqrt(fro)
    converged = False
    for _ in range(JACOBI_MAX_SWEEPS):
        off = 0.0
        for i in range(d):
            for j in range(d):
                if i != j:
                    off += W[i, j] * W[i, j]
        if np.sqrt(off) <= thresh:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = W[p, q]
                if apq == 0.0:
                    continue
                app = W[p, p]
                aqq = W[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(d):
                    if i != p and i != q:
                        aip = W[i, p]
                        aiq = W[i, q]
                        W[i, p] = aip * c - aiq * s
                        W[p, i] = W[i, p]
                        W[i, q] = aiq * c + aip * s
                        W[q, i] = W[i, q]
                W[p, p] = app - t * apq
                W[q, q] = aqq + t * apq
                W[p, q] = 0.0
                W[q, p] = 0.0
                for i in range(d):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = vip * c - viq * s
                    V[i, q] = viq * c + vip * s
    lam = np.empty(d)
    for i in range(d):
        lam[i] = W[i, i]
    order = np.argsort(lam, kind="mergesort")
    return lam[order], np.ascontiguousarray(V[:, order]), converged


@njit(cache=True)
def rebuild(lam, V):
    """Assemble V diag(lam) V^T."""
    d = lam.shape[0]
    out = np.zeros((d, d))
    for k in range(d):
        lk = lam[k]
        for i in range(d):
            vik = V[i, k] * lk
            for j in range(d):
                out[i, j] += vik * V[j, k]
    return out


@njit(cache=True)
def sym_pow(A, s):
    """A^s for symmetric positive definite A via the spectral calculus."""
    lam, V, _ = jacobi_eigh(A)
    return rebuild(lam ** s, V)


@njit(cache=True)
def sym_log(A):
    lam, V, _ = jacobi_eigh(A)
    return rebuild(np.log(lam), V)


@njit(cache=True)
def sym_exp(A):
    lam, V, _ = jacobi_eigh(A)
    return rebuild(np.exp(lam), V)


@njit(cache=True)
def symmetrize(A):
    return 0.5 * (A + A.T)


@njit(cache=True)
def geo2(A, B, t):
    """Weighted geodesic A^(1/2) (A^(-1/2) B A^(-1/2))^t A^(1/2)."""
    lam, V, _ = jacobi_eigh(A)
    Ah = rebuild(lam ** 0.5, V)
    Aih = rebuild(lam ** -0.5, V)
    C = symmetrize(Aih @ B @ Aih)
    lc, Vc, _ = jacobi_eigh(C)
    R = Ah @ rebuild(lc ** t, Vc) @ Ah
    return symmetrize(R)


@njit(cache=True)
def thompson(A, B):
    """Thompson metric: max |log eigenvalue| of A^(-1/2) B A^(-1/2)."""
    lam, V, _ = jacobi_eigh(A)
    Aih = rebuild(lam ** -0.5, V)
    C = symmetrize(Aih @ B @ Aih)
    lc, _, _ = jacobi_eigh(C)
    m = 0.0
    for k in range(lc.shape[0]):
        v = abs(np.log(lc[k]))
        if v > m:
            m = v
    return m


@njit(cache=True)
def power_mean_iter(As, w, t, X0, tol, cap):
    """Fixed point of X -> sum_i w_i (X #_t A_i), t in (0, 1].

    Returns ``(X, iterations, last_step, converged)`` where ``last_step``
    is the Thompson distance between the final two iterates.
    """
    n = As.shape[0]
    d = As.shape[1]
    X = X0.copy()
    step = np.inf
    iters = 0
    converged = False
    for k in range(cap):
        iters = k + 1
        lam, V, _ = jacobi_eigh(X)
        Xh = rebuild(lam ** 0.5, V)
        Xih = rebuild(lam ** -0.5, V)
        acc = np.zeros((d, d))
        for i in range(n):
            C = symmetrize(Xih @ As[i] @ Xih)
            lc, Vc, _ = jacobi_eigh(C)
            acc += w[i] * (Xh @ rebuild(lc ** t, Vc) @ Xh)
        acc = symmetrize(acc)
        step = thompson(X, acc)
        X = acc
        if step <= tol:
            converged = True
            break
    return X, iters, step, converged


@njit(cache=True)
def karcher_gradient(X, As, w):
    """Tangent-space mean sum_i w_i log(X^(-1/2) A_i X^(-1/2)) and its Frobenius norm."""
    n = As.shape[0]
    d = As.shape[1]
    lam, V, _ = jacobi_eigh(X)
    Xih = rebuild(lam ** -0.5, V)
    S = np.zeros((d, d))
    for i in range(n):
        C = symmetrize(Xih @ As[i] @ Xih)
        lc, Vc, _ = jacobi_eigh(C)
        S += w[i] * rebuild(np.log(lc), Vc)
    S = symmetrize(S)
    fro = 0.0
    for a in range(d):
        for b in range(d):
            fro += S[a, b] * S[a, b]
    return S, np.sqrt(fro)


@njit(cache=True)
def karcher_iter(As, w, X0, tol, cap):
    """Damped fixed-point iteration for the Karcher equation.

    Proposes X' = X^(1/2) exp(theta * S) X^(1/2) with the step theta halved
    whenever the residual norm would increase. Stops when the residual is
    at most ``tol``.
    """
    X = X0.copy()
    S, res = karcher_gradient(X, As, w)
    theta = 1.0
    iters = 0
    converged = res <= tol
    for _ in range(cap):
        if res <= tol:
            converged = True
            break
        iters += 1
        lam, V, _ = jacobi_eigh(X)
        Xh = rebuild(lam ** 0.5, V)
        Xn = symmetrize(Xh @ sym_exp(theta * S) @ Xh)
        Sn, resn = karcher_gradient(Xn, As, w)
        if resn > res:
            theta *= 0.5
            continue
        X = Xn
        S = Sn
        res = resn
    return X, iters, res, converged


@njit(cache=True)
def _consensus_step(cur, nxt):
    """Max Thompson distance between consecutive operand tuples."""
    step = 0.0
    for i in range(cur.shape[0]):
        s = thompson(cur[i], nxt[i])
        if s > step:
            step = s
    return step


@njit(cache=True)
def _consensus_diameter(cur):
    diam = 0.0
    n = cur.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            s = thompson(cur[i], cur[j])
            if s > diam:
                diam = s
    return diam


# The inductive geometric-mean recursion replaces each operand with the
# (n-1)-variable mean of the others until all operands agree in the
# Thompson metric. One compiled loop per arity keeps numba happy; the
# arities chain upward so the recursion depth is explicit.

@njit(cache=True)
def lawson_geo_3(As, t, tol, cap):
    n = As.shape[0]
    d = As.shape[1]
    cur = As.copy()
    nxt = np.empty_like(cur)
    rounds = 0
    step = np.inf
    converged = False
    for r in range(cap):
        rounds = r + 1
        for i in range(n):
            if i == 0:
                nxt[i] = geo2(cur[1], cur[2], t)
            elif i == 1:
                nxt[i] = geo2(cur[0], cur[2], t)
            else:
                nxt[i] = geo2(cur[0], cur[1], t)
        step = _consensus_step(cur, nxt)
        tmp = cur
        cur = nxt
        nxt = tmp
        if step <= tol and _consensus_diameter(cur) <= tol:
            converged = True
            break
    return cur[0].copy(), rounds, step, converged


@njit(cache=True)
def lawson_geo_4(As, t, tol, cap):
    n = As.shape[0]
    d = As.shape[1]
    cur = As.copy()
    nxt = np.empty_like(cur)
    sub = np.empty((n - 1, d, d))
    rounds = 0
    step = np.inf
    converged = False
    for r in range(cap):
        rounds = r + 1
        for i in range(n):
            k = 0
            for j in range(n):
                if j != i:
                    sub[k] = cur[j]
                    k += 1
            g, _, _, ok = lawson_geo_3(sub, t, tol, cap)
            if not ok:
                return cur[0].copy(), rounds, step, False
            nxt[i] = g
        step = _consensus_step(cur, nxt)
        tmp = cur
        cur = nxt
        nxt = tmp
        if step <= tol and _consensus_diameter(cur) <= tol:
            converged = True
            break
    return cur[0].copy(), rounds, step, converged


@njit(cache=True)
def lawson_geo_5(As, t, tol, cap):
    n = As.shape[0]
    d = As.shape[1]
    cur = As.copy()
    nxt = np.empty_like(cur)
    sub = np.empty((n - 1, d, d))
    rounds = 0
    step = np.inf
    converged = False
    for r in range(cap):
        rounds = r + 1
        for i in range(n):
            k = 0
            for j in range(n):
                if j != i:
                    sub[k] = cur[j]
                    k += 1
            g, _, _, ok = lawson_geo_4(sub, t, tol, cap)
            if not ok:
                return cur[0].copy(), rounds, step, False
            nxt[i] = g
        step = _consensus_step(cur, nxt)
        tmp = cur
        cur = nxt
        nxt = tmp
        if step <= tol and _consensus_diameter(cur) <= tol:
            converged = True
            break
    return cur[0].copy(), rounds, step, converged


@njit(cache=True)
def lawson_geo_6(As, t, tol, cap):
    n = As.shape[0]
    d = As.shape[1]
    cur = As.copy()
    nxt = np.empty_like(cur)
    sub = np.empty((n - 1, d, d))
    rounds = 0
    step = np.inf
    converged = False
    for r in range(cap):
        rounds = r + 1
        for i in range(n):
            k = 0
            for j in range(n):
                if j != i:
                    sub[k] = cur[j]
                    k += 1
            g, _, _, ok = lawson_geo_5(sub, t, tol, cap)
            if not ok:
                return cur[0].copy(), rounds, step, False
            nxt[i] = g
        step = _consensus_step(cur, nxt)
        tmp = cur
        cur = nxt
        nxt = tmp
        if step <= tol and _consensus_diameter(cur) <= tol:
            converged = True
            break
    return cur[0].copy(), rounds, step, converged


def warm_up():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    a = np.array([[2.0, 0.5], [0.5, 1.0]])
    b = np.array([[1.0, -0.25], [-0.25, 3.0]])
    jacobi_eigh(a)
    sym_pow(a, 0.5)
    sym_log(a)
    sym_exp(np.zeros((2, 2)))
    geo2(a, b, 0.3)
    thompson(a, b)
    two = np.stack((a, b))
    w = np.array([0.5, 0.5])
    power_mean_iter(two, w, 0.5, a, 1e-8, 50)
    karcher_iter(two, w, a, 1e-8, 50)
    three = np.stack((a, b, np.eye(2)))
    lawson_geo_3(three, 0.5, 1e-6, 50)
    four = np.stack((a, b, np.eye(2), 2.0 * np.eye(2)))
    lawson_geo_4(four, 0.5, 1e-6, 50)
    five = np.concatenate((four, three[:1]))
    lawson_geo_5(five, 0.5, 1e-4, 20)
    six = np.concatenate((five, three[1:2]))
    lawson_geo_6(six, 0.5, 1e-2, 5)
