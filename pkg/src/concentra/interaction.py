"""k-point interaction matrix M_lambda(zeta), determinant psi, eigenstructure,
circulant specialization, and the reduced energy F with its Lambda-gradient."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bubbles import EnergyConstants
from .domain import DomainSpec, lambda1
from .errors import (AsymmetricRow, DomainError, DuplicatePoints,
                     NoConvergence, StencilLeavesDomain, StepOutOfRange)
from .greens import green, robin

MAX_K = 64
_DUP_CUTOFF = 1e-8


@dataclass(frozen=True)
class InteractionMatrix:
    k: int
    entries: np.ndarray  # (k, k) symmetric
    lam: float
    points: tuple  # k points, each a 3-tuple


@dataclass(frozen=True)
class EigenDecomp:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns


def build_matrix(d: DomainSpec, lam: float, zeta, tol: float = 1e-10
                 ) -> InteractionMatrix:
    """M_ii = g_lambda(zeta_i), M_ij = -G_lambda(zeta_i, zeta_j)."""
    pts = [np.asarray(z, dtype=float) for z in zeta]
    k = len(pts)
    if not 1 <= k <= MAX_K:
        raise DomainError(f"k must be in [1, {MAX_K}], got {k}")
    for i in range(k):
        for j in range(i + 1, k):
            if np.linalg.norm(pts[i] - pts[j]) < _DUP_CUTOFF:
                raise DuplicatePoints(
                    f"points {i} and {j} closer than {_DUP_CUTOFF}")
    M = np.empty((k, k))
    for i in range(k):
        M[i, i] = robin(d, lam, pts[i], tol)
        for j in range(i + 1, k):
            M[i, j] = M[j, i] = -green(d, lam, pts[i], pts[j], tol).value
    return InteractionMatrix(k, M, lam,
                             tuple(tuple(p.tolist()) for p in pts))


def psi(M: InteractionMatrix) -> float:
    """det M via LU with partial pivoting, sign tracked explicitly."""
    A = np.array(M.entries, dtype=float)
    n = A.shape[0]
    sign = 1.0
    logdet = 0.0
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if A[p, col] == 0.0:
            return 0.0
        if p != col:
            A[[col, p]] = A[[p, col]]
            sign = -sign
        piv = A[col, col]
        if piv < 0.0:
            sign = -sign
        logdet += math.log(abs(piv))
        for row in range(col + 1, n):
            A[row, col + 1:] -= A[row, col] / piv * A[col, col + 1:]
    return sign * math.exp(logdet)


def eigen(M: InteractionMatrix | np.ndarray, max_sweeps: int = 60
          ) -> EigenDecomp:
    """Cyclic Jacobi with threshold sweeps; ascending eigenvalues."""
    A = np.array(M.entries if isinstance(M, InteractionMatrix) else M,
                 dtype=float)
    n = A.shape[0]
    if n > MAX_K:
        raise DomainError(f"eigen supports k <= {MAX_K}")
    V = np.eye(n)
    for sweep in range(max_sweeps):
        off = math.sqrt(sum(A[i, j] ** 2
                            for i in range(n) for j in range(i + 1, n)))
        if off < 1e-15 * max(1.0, np.max(np.abs(np.diag(A)))):
            break
        thresh = off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= thresh:
                    continue
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # rotate rows/cols p, q
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    V = V[:, order]
    # deterministic sign: largest-magnitude component of each vector positive
    for j in range(n):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0.0:
            V[:, j] = -V[:, j]
    return EigenDecomp(vals, V)


def circulant_eigenvalues(first_row) -> np.ndarray:
    """nu_l = sum_j a_j exp(2 pi i j l / k), returned as ascending-index
    (l = 0..k-1) real values.  Requires the reflection symmetry a_j=a_{k-j}."""
    row = np.asarray(first_row, dtype=float)
    k = row.size
    for j in range(1, k):
        if abs(row[j] - row[k - j]) > 1e-12:
            raise AsymmetricRow(
                f"a_{j} != a_{k - j} ({row[j]!r} vs {row[k - j]!r})")
    out = np.empty(k)
    for l in range(k):
        acc = complex(0.0, 0.0)
        for j in range(k):
            acc += row[j] * cmath.exp(2j * math.pi * j * l / k)
        if abs(acc.imag) > 1e-12 * max(1.0, abs(acc.real)):
            raise AsymmetricRow(f"nu_{l} has imaginary residue {acc.imag:e}")
        out[l] = acc.real
    return out


def reduced_energy_F(M: InteractionMatrix, Lambda, lam: float,
                     consts: EnergyConstants):
    """F = k a0 + a1 L^T M L + a2 lam sum L^4 - a3 sum L_i^2 (M L)_i^2,
    with its exact Lambda-gradient."""
    L = np.asarray(Lambda, dtype=float)
    A = M.entries
    if L.size != M.k:
        raise DomainError("Lambda dimension mismatch")
    a0, a1 = consts.a0.closed, consts.a1.closed
    a2, a3 = consts.a2.closed, consts.a3.closed
    ML = A @ L
    value = (M.k * a0 + a1 * L @ ML + a2 * lam * np.sum(L ** 4)
             - a3 * np.sum(L ** 2 * ML ** 2))
    grad = (2.0 * a1 * ML + 4.0 * a2 * lam * L ** 3
            - a3 * (2.0 * L * ML ** 2 + 2.0 * A.T @ (L ** 2 * ML)))
    return float(value), grad


def psi_derivatives(d: DomainSpec, lam: float, zeta, tol: float = 1e-10,
                    step: float | None = None, lam_step: float | None = None):
    """First/second zeta-derivatives and lambda-derivative of psi_lambda(zeta)
    by central differences, gradient and lambda-derivative Richardson
    extrapolated.  Returns a dict with value, grad, hessian, d_lambda and
    step/error metadata."""
    pts = [np.asarray(z, dtype=float) for z in zeta]
    k = len(pts)
    n = 3 * k
    if step is None:
        step = 1e-3 * d.thickness
    lam1 = lambda1(d)
    if lam_step is None:
        lam_step = 1e-4 * lam1
    if not (0.0 < lam - lam_step and lam + lam_step < lam1):
        raise StepOutOfRange("lambda stencil leaves (0, lambda1)")

    def flat(v):
        out = [p.copy() for p in pts]
        for i in range(k):
            out[i] = out[i] + v[3 * i:3 * i + 3]
        return out

    def value_at(v, lam_=None):
        moved = flat(v)
        for p in moved:
            if not d.contains(p, margin=1e-6):
                raise StencilLeavesDomain(
                    f"stencil point {p.tolist()} leaves the domain")
        M = build_matrix(d, lam if lam_ is None else lam_, moved, tol)
        return psi(M)

    zero = np.zeros(n)
    base = value_at(zero)

    def central(i, h):
        e = np.zeros(n)
        e[i] = h
        return (value_at(e) - value_at(-e)) / (2.0 * h)

    grad = np.empty(n)
    grad_err = np.empty(n)
    for i in range(n):
        d1 = central(i, step)
        d2 = central(i, 0.5 * step)
        grad[i] = (4.0 * d2 - d1) / 3.0
        grad_err[i] = abs(d2 - d1) / 3.0

    hess = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        hess[i, i] = (value_at(ei) - 2.0 * base + value_at(-ei)) / step ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            hess[i, j] = hess[j, i] = (
                value_at(ei + ej) - value_at(ei - ej)
                - value_at(-ei + ej) + value_at(-ei - ej)
            ) / (4.0 * step ** 2)

    dl1 = (value_at(zero, lam + lam_step)
           - value_at(zero, lam - lam_step)) / (2.0 * lam_step)
    dl2 = (value_at(zero, lam + 0.5 * lam_step)
           - value_at(zero, lam - 0.5 * lam_step)) / lam_step
    d_lam = (4.0 * dl2 - dl1) / 3.0

    return {
        "value": base,
        "grad_zeta": grad,
        "grad_error": grad_err,
        "hessian_zeta": hess,
        "d_lambda": d_lam,
        "d_lambda_error": abs(dl2 - dl1) / 3.0,
        "step": step,
        "lam_step": lam_step,
    }
