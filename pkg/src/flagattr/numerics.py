"""Dense complex linear algebra kernel.

Everything here works on small matrices (n up to about 32) and is written
around Jacobi rotations: a cyclic two-sided sweep for Hermitian
eigenproblems and a one-sided (Hestenes) sweep for singular values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, RankDeficient, SizeMismatch

TAU_ORTH = 1e-10
TAU_RECON = 1e-9
TAU_EIG_REL = 1e-8
DEFAULT_RANK_TOL = 1e-9
SWEEP_BUDGET = 100

_EPS = np.finfo(float).eps


def as_complex_matrix(m) -> np.ndarray:
    """Coerce *m* to a 2-d complex array with finite entries."""
    a = np.array(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise SizeMismatch(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def canonical_phase(v: np.ndarray, cutoff: float = 1e-10) -> np.ndarray:
    """Rotate *v* so its first coordinate with modulus above *cutoff* is real positive."""
    idx = np.flatnonzero(np.abs(v) > cutoff)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition ``m = U diag(eigenvalues) U*`` with eigenvalues descending.

    ``blocks`` groups column indices of ``eigenvectors`` whose eigenvalues agree
    to within ``tau_eig``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    blocks: tuple[tuple[int, ...], ...]
    tau_eig: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def distinct(self) -> list[float]:
        """One representative eigenvalue per block (block mean), descending."""
        return [float(np.mean(self.eigenvalues[list(b)])) for b in self.blocks]

    def matrix(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def block_basis(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, list(self.blocks[k])]


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_hermitian(a: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = _EPS * scale
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # unitary acting on columns (p, q): phase fix then real rotation
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    if _offdiag_norm(a) <= target:
        return np.real(np.diag(a)).copy(), v
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _group_blocks(vals: np.ndarray, tau: float) -> tuple[tuple[int, ...], ...]:
    blocks: list[list[int]] = []
    for i, lam in enumerate(vals):
        if blocks and abs(vals[blocks[-1][-1]] - lam) < tau:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return tuple(tuple(b) for b in blocks)


def hermitian_eigendecompose(m, tol: float = 1e-10, max_sweeps: int = SWEEP_BUDGET) -> HermitianSpectrum:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Raises NotHermitian if ``max|m - m*| >= tol`` and NoConvergence if the
    sweep budget runs out.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise SizeMismatch(f"expected a square matrix, got {a.shape}")
    if np.max(np.abs(a - a.conj().T), initial=0.0) >= tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    vals, vecs = _jacobi_hermitian(a, max_sweeps)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        vecs[:, k] = canonical_phase(vecs[:, k])
    tau_eig = TAU_EIG_REL * max(float(np.max(np.abs(vals), initial=0.0)), 1e-300)
    return HermitianSpectrum(_freeze(vals), _freeze(vecs), _group_blocks(vals, tau_eig), tau_eig)


def singular_values(m, max_sweeps: int = SWEEP_BUDGET) -> np.ndarray:
    """Singular values in descending order, by one-sided Jacobi orthogonalization."""
    a = as_complex_matrix(m)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    a = a.copy()
    k = a.shape[1]
    if a.size == 0:
        return np.zeros(0)
    # columns below this squared norm are numerically zero
    floor = (_EPS * np.linalg.norm(a)) ** 2
    if k > 1:
        for _ in range(max_sweeps):
            rotated = False
            for i in range(k - 1):
                for j in range(i + 1, k):
                    ai, aj = a[:, i].copy(), a[:, j].copy()
                    alpha = float(np.vdot(ai, ai).real)
                    beta = float(np.vdot(aj, aj).real)
                    gamma = np.vdot(ai, aj)
                    g = abs(gamma)
                    if g <= _EPS * np.sqrt(alpha * beta) or min(alpha, beta) <= floor:
                        continue
                    rotated = True
                    aj = aj * (np.conj(gamma) / g)
                    zeta = (beta - alpha) / (2.0 * g)
                    if abs(zeta) > 1e150:
                        t = 0.5 / zeta
                    else:
                        t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = c * t
                    a[:, i] = c * ai - s * aj
                    a[:, j] = s * ai + c * aj
            if not rotated:
                break
        else:
            raise NoConvergence(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
    return np.sort(np.linalg.norm(a, axis=0))[::-1]


def rank_profile(m, tol_rel: float = DEFAULT_RANK_TOL, scale: float | None = None) -> tuple[int, np.ndarray, float]:
    """Return ``(rank, relative singular values, reference scale)``.

    The reference is the largest singular value unless *scale* is given.
    """
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    s = singular_values(m)
    ref = float(s[0]) if scale is None and s.size else float(scale or 0.0)
    if ref == 0.0:
        return 0, np.zeros_like(s), ref
    rel = s / ref
    return int(np.count_nonzero(rel > tol_rel)), rel, ref


def numerical_rank(m, tol_rel: float = DEFAULT_RANK_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``tol_rel`` times the largest one (or *scale*)."""
    return rank_profile(m, tol_rel, scale)[0]


def orthonormalize(m, tol_rel: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Gram-Schmidt with reorthogonalization; keeps every column-prefix span.

    Diagonal of the implied triangular factor is real positive, so the output
    is unique for a given input.
    """
    a = as_complex_matrix(m)
    n, k = a.shape
    if k > n:
        raise RankDeficient(f"{k} columns cannot be independent in dimension {n}")
    q = np.zeros((n, k), dtype=complex)
    for j in range(k):
        col = a[:, j].copy()
        norm0 = np.linalg.norm(col)
        if norm0 == 0.0:
            raise RankDeficient(f"column {j} is zero")
        for _ in range(2):
            col -= q[:, :j] @ (q[:, :j].conj().T @ col)
        norm = np.linalg.norm(col)
        if norm <= tol_rel * norm0:
            raise RankDeficient(f"column prefix 0..{j} is numerically dependent")
        q[:, j] = col / norm
    return q
