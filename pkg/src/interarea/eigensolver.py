"""Dense eigensolver for small real nonsymmetric matrices.

Eigenvalues come from balancing, Householder reduction to upper Hessenberg
form and the Francis double-shift QR iteration.  Eigenvectors come from
inverse iteration, except inside clusters of (numerically) repeated
eigenvalues, where the null space of ``A - mu I`` is taken from an SVD.  A
cluster whose null space is smaller than its multiplicity is defective; it
is reported as such instead of raising.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import NoConvergence

_EPS = np.finfo(float).eps
_RADIX = 2.0


def balance(A):
    """Parlett-Reinsch balancing by powers of two.

    Returns ``(B, d)`` with ``B = diag(d)^-1 A diag(d)``; the spectrum is
    unchanged and the scaling is exact in floating point.
    """
    B = np.array(A, dtype=float, copy=True)
    n = B.shape[0]
    d = np.ones(n)
    sqrdx = _RADIX * _RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(B[:, i]).sum() - abs(B[i, i])
            r = np.abs(B[i, :]).sum() - abs(B[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / _RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= _RADIX
                c *= sqrdx
            g = r * _RADIX
            while c > g:
                f /= _RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                d[i] *= f
                B[i, :] /= f
                B[:, i] *= f
    return B, d


def hessenberg(A):
    """Orthogonally similar upper Hessenberg matrix via Householder reflections."""
    H = np.array(A, dtype=float, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += np.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v)
        H[k + 2:, k] = 0.0
    return H


def hqr(H, max_iter=30):
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    ``max_iter`` bounds the QR sweeps spent on any one eigenvalue (exceptional
    shifts at 10 and 20).  Raises :class:`NoConvergence` past the cap.
    """
    n = H.shape[0]
    # 1-based working copy keeps the index arithmetic of the textbook form
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = H
    wr = np.zeros(n + 1)
    wi = np.zeros(n + 1)
    anorm = np.abs(np.triu(H, -1)).sum()
    nn = n
    t = 0.0
    while nn >= 1:
        its = 0
        while True:
            for l in range(nn, 1, -1):
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= _EPS * s:
                    a[l, l - 1] = 0.0
                    break
            else:
                l = 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = np.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + np.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn] = z
                    wi[nn - 1] = -z
                nn -= 2
                break

            if its == max_iter:
                raise NoConvergence(f"QR iteration did not converge within {max_iter} sweeps")
            if its in (10, 20):
                t += x
                idx = np.arange(1, nn + 1)
                a[idx, idx] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1

            for m in range(nn - 2, l - 1, -1):
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= _EPS * v:
                    break
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0

            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = np.copysign(np.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # row transformation
                rows = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1]
                if k != nn - 1:
                    rows += r * a[k + 2, k:nn + 1]
                    a[k + 2, k:nn + 1] -= rows * z
                a[k + 1, k:nn + 1] -= rows * y
                a[k, k:nn + 1] -= rows * x
                # column transformation
                mmin = min(nn, k + 3)
                cols = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1]
                if k != nn - 1:
                    cols += z * a[l:mmin + 1, k + 2]
                    a[l:mmin + 1, k + 2] -= cols * r
                a[l:mmin + 1, k + 1] -= cols * q
                a[l:mmin + 1, k] -= cols

    return wr[1:] + 1j * wi[1:]


def eigvals(A, max_iter=30):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise NoConvergence("matrix has non-finite entries")
    B, _ = balance(A)
    return hqr(hessenberg(B), max_iter=max_iter)


@dataclass
class Eigensystem:
    """Raw output of :func:`eig`.

    ``left`` rows are left eigenvectors; on the non-defective modes they are
    scaled so that ``left @ right`` is the identity.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    defective: np.ndarray


def _clusters(lam, tol):
    """Group eigenvalue indices whose values chain together within ``tol``."""
    n = len(lam)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _null_space(M, tol):
    _, s, vh = np.linalg.svd(M)
    rank = int((s > tol).sum())
    return vh[rank:].conj().T


def _inverse_iteration(A, lam, scale, start=0, steps=3):
    n = A.shape[0]
    complex_ = bool(np.iscomplexobj(lam) and lam.imag != 0)
    if not complex_:
        lam = float(np.real(lam))
    shift = lam + 10 * _EPS * scale * (1 + 1j if complex_ else 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A - shift * np.eye(n), check_finite=False)
    # an exactly singular pivot is replaced by a tiny one, as in classical inverse iteration
    d = np.diagonal(lu).copy()
    d[d == 0] = _EPS * scale
    lu[np.diag_indices(n)] = d
    # deterministic start; distinct members of a repeated eigenvalue get distinct starts
    x = np.random.default_rng(start).standard_normal(n).astype(lu.dtype)
    for _ in range(steps):
        x = lu_solve((lu, piv), x, check_finite=False)
        x /= np.linalg.norm(x)
    return x


def eig(A, cluster_tol=1e-6, null_tol=1e-9, max_iter=30) -> Eigensystem:
    """Eigenvalues with right and left eigenvectors.

    Parameters
    ----------
    cluster_tol : float
        Eigenvalues chained together within ``cluster_tol * ||A||_inf`` are
        examined as a possible repeated eigenvalue.
    null_tol : float
        Singular values of ``A - mu I`` below ``null_tol * ||A||_inf`` count
        toward the geometric multiplicity of such a cluster.

    A cluster whose null space has full dimension is a semisimple repeated
    eigenvalue.  Otherwise it is split at successively tighter tolerances;
    if no split yields independent eigenvectors, the cluster is a defective
    eigenvalue.  Members of a repeated eigenvalue are replaced by their mean,
    which is far more accurate than the individual computed values.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    lam = eigvals(A, max_iter=max_iter)
    if n == 0 or np.abs(A).max() == 0.0:
        I = np.eye(n, dtype=complex)
        return Eigensystem(np.zeros(n, dtype=complex), I, I.copy(), np.zeros(n, dtype=bool))

    scale = np.abs(A).sum(axis=1).max()
    solver = _ClusterSolver(A, scale, null_tol * scale)
    right = np.zeros((n, n), dtype=complex)
    left = np.zeros((n, n), dtype=complex)
    defective = np.zeros(n, dtype=bool)
    values = lam.copy()
    for group in _clusters(lam, cluster_tol * scale):
        vals, R, L, flag = solver.resolve(lam[group], cluster_tol * scale)
        values[group] = vals
        right[:, group] = R
        left[group, :] = L
        defective[group] = flag
    real = np.abs(values.imag) <= cluster_tol * scale * _EPS ** 0.5
    values[real] = values[real].real
    return Eigensystem(values, right, left, defective)


class _ClusterSolver:
    def __init__(self, A, scale, null_tol):
        self.A = A
        self.scale = scale
        self.null_tol = null_tol
        self.n = A.shape[0]

    def resolve(self, vals, tol):
        """Eigen-triples for one cluster: ``(values, R, L, defective_mask)``."""
        k = len(vals)
        if k == 1:
            R, L = self._vectors(vals)
            return vals, R, L, np.zeros(1, dtype=bool)

        mu = vals.mean()
        if abs(mu.imag) <= tol:
            mu = complex(mu.real, 0.0)
        shifted = self.A - (mu if mu.imag else mu.real) * np.eye(self.n)
        R = _null_space(shifted, self.null_tol)
        L = _null_space(shifted.T, self.null_tol).T
        g = R.shape[1] if R.shape[1] == L.shape[0] <= k else 0
        if g == k:
            R, L = _normalize(R, L)
            return np.full(k, mu), R, np.linalg.solve(L @ R, L), np.zeros(k, dtype=bool)

        split = self._split(vals, tol)
        if split is not None:
            return split
        if g:
            R, L = _normalize(R, L)
            cols = [j % g for j in range(k)]
            return np.full(k, mu), R[:, cols], L[cols], np.ones(k, dtype=bool)
        R, L = self._vectors(vals)
        if _ill_conditioned(R, L):
            return vals, R, L, np.ones(k, dtype=bool)
        return vals, R, np.linalg.solve(L @ R, L), np.zeros(k, dtype=bool)

    def _split(self, vals, tol):
        finer = tol / 10
        # rounding alone splits a 2x2 Jordan block by about sqrt(eps) * ||A||,
        # so closer values cannot be told apart from one defective eigenvalue
        floor = _EPS ** 0.5 * self.scale
        while finer > floor:
            subs = _clusters(vals, finer)
            if len(subs) > 1:
                break
            finer /= 10
        else:
            return None
        out_vals = vals.copy()
        R = np.zeros((self.n, len(vals)), dtype=complex)
        L = np.zeros((len(vals), self.n), dtype=complex)
        for sub in subs:
            v, r, l, flag = self.resolve(vals[sub], finer)
            if flag.any():
                return None
            out_vals[sub] = v
            R[:, sub] = r
            L[sub, :] = l
        if _ill_conditioned(R, L):
            return None
        return out_vals, R, np.linalg.solve(L @ R, L), np.zeros(len(vals), dtype=bool)

    def _vectors(self, vals):
        R = np.column_stack([_inverse_iteration(self.A, v, self.scale, start=m) for m, v in enumerate(vals)])
        L = np.vstack([_inverse_iteration(self.A.T, v, self.scale, start=m) for m, v in enumerate(vals)])
        R, L = _normalize(R.astype(complex), L.astype(complex))
        if len(vals) == 1:
            L = L / (L @ R)
        return R, L


def _ill_conditioned(R, L, limit=1e7):
    # nearly parallel eigenvectors: a split Jordan block, not distinct modes
    R, L = _normalize(R, L)
    return np.linalg.cond(R) > limit or np.linalg.cond(L) > limit


def _normalize(R, L):
    return R / np.linalg.norm(R, axis=0), L / np.linalg.norm(L, axis=1)[:, None]
