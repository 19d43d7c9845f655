"""Linear flows ``t -> exp(t phi)`` on the projective space of C^n, phi Hermitian.

Points are unit vectors with a canonical phase.  Limits, stable sets and
fixed components are all computed in the eigenbasis of phi; time stepping is
only used by the tests as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAFixedPoint, Overflow
from .numerics import HermitianSpectrum, TAU_RECON, canonical_phase
from .poset import FinitePoset, chain

TAU_COMP = 1e-8


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """The line through ``homogeneous`` (unit norm, canonical phase)."""

    homogeneous: np.ndarray

    @classmethod
    def from_vector(cls, v) -> "ProjectivePoint":
        v = np.asarray(v, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("a projective point needs a nonzero finite vector")
        v = canonical_phase(v / norm)
        v.setflags(write=False)
        return cls(v)

    @property
    def n(self) -> int:
        return self.homogeneous.shape[0]

    def distance(self, other: "ProjectivePoint") -> float:
        """Sine of the angle between the two lines."""
        u, v = self.homogeneous, other.homogeneous
        # residual norm keeps full relative accuracy for nearby lines
        return float(min(np.linalg.norm(v - np.vdot(u, v) * u), 1.0))

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjectivePoint) and self.n == other.n and self.distance(other) < 1e-9

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FixedComponent:
    """P(V_nu): the eigenspace of one eigenvalue, a connected set of fixed points."""

    eigenvalue: float
    basis: np.ndarray

    @property
    def height(self) -> float:
        return -0.5 * self.eigenvalue

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def fixed_components(phi: HermitianSpectrum) -> list[FixedComponent]:
    """One component per distinct eigenvalue, largest eigenvalue first."""
    return [FixedComponent(nu, phi.block_basis(k)) for k, nu in enumerate(phi.distinct)]


def _coords(phi: HermitianSpectrum, x: ProjectivePoint) -> np.ndarray:
    return phi.eigenvectors.conj().T @ x.homogeneous


def height(phi: HermitianSpectrum, x: ProjectivePoint) -> float:
    """``-1/2 (phi v | v) / (v | v)``."""
    c = _coords(phi, x)
    w = np.abs(c) ** 2
    return float(-0.5 * np.dot(phi.eigenvalues, w) / np.sum(w))


def gradient_field(phi: HermitianSpectrum, x: ProjectivePoint) -> np.ndarray:
    """Gradient of the height at x, as a vector orthogonal to the unit representative."""
    v = x.homogeneous
    pv = phi.matrix() @ v
    return -(pv - np.vdot(v, pv).real * v)


def flow(phi: HermitianSpectrum, t: float, x: ProjectivePoint) -> ProjectivePoint:
    """``[exp(t phi) v]``, exponent shifted by its maximum over the support of v."""
    if not np.isfinite(t):
        raise Overflow(f"flow time {t} is not finite")
    c = _coords(phi, x)
    expo = t * phi.eigenvalues
    support = np.abs(c) > 0
    expo = expo - np.max(expo[support])
    scaled = c * np.exp(expo)
    if not np.any(scaled):
        raise Overflow("every coordinate underflowed")
    return ProjectivePoint.from_vector(phi.eigenvectors @ scaled)


def _block_parts(phi: HermitianSpectrum, x: ProjectivePoint) -> list[np.ndarray]:
    c = _coords(phi, x)
    return [phi.eigenvectors[:, list(b)] @ c[list(b)] for b in phi.blocks]


def limit_map(phi: HermitianSpectrum, x: ProjectivePoint) -> tuple[ProjectivePoint, ProjectivePoint]:
    """``(lim_{t->-inf}, lim_{t->+inf})`` of the orbit through x.

    The forward limit is the projection onto the largest eigenvalue present
    with norm above TAU_COMP, the backward limit onto the smallest.
    """
    parts = _block_parts(phi, x)
    present = [k for k, p in enumerate(parts) if np.linalg.norm(p) > TAU_COMP]
    # blocks are ordered by descending eigenvalue
    forward = ProjectivePoint.from_vector(parts[present[0]])
    backward = ProjectivePoint.from_vector(parts[present[-1]])
    return backward, forward


def fixed_block(phi: HermitianSpectrum, x: ProjectivePoint) -> int:
    """Index of the eigenvalue block containing x; NotAFixedPoint otherwise."""
    parts = _block_parts(phi, x)
    norms = [np.linalg.norm(p) for p in parts]
    k = int(np.argmax(norms))
    if np.linalg.norm(x.homogeneous - parts[k]) > TAU_RECON:
        raise NotAFixedPoint("point is not an eigenvector line")
    return k


def stable_membership(phi: HermitianSpectrum, fixed: ProjectivePoint, y: ProjectivePoint, sign: str) -> bool:
    """Whether y lies in W^+(fixed) (``sign='+'``, flows forward to it) or W^-(fixed).

    W^+ of a point on P(V_nu) is the set of lines with a nonzero component along
    it, with the rest in eigenvalues below nu; W^- uses eigenvalues above nu.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    k = fixed_block(phi, fixed)
    parts = _block_parts(phi, y)
    f = fixed.homogeneous
    along = np.vdot(f, parts[k])
    if abs(along) <= TAU_COMP or np.linalg.norm(parts[k] - along * f) > TAU_COMP:
        return False
    # block index grows as the eigenvalue shrinks
    forbidden = range(0, k) if sign == "+" else range(k + 1, len(parts))
    return all(np.linalg.norm(parts[j]) <= TAU_COMP for j in forbidden)


def component_smale_order(phi: HermitianSpectrum) -> FinitePoset:
    """Smale order on the fixed components, labelled by eigenvalue.

    ``nu <= mu`` when some orbit runs from P(V_mu) down to P(V_nu), which makes
    the order the reverse of the order of the eigenvalues.
    """
    return chain(phi.distinct)


def flow_order(phi: HermitianSpectrum) -> FinitePoset:
    """Components ordered from source to sink (ascending eigenvalue)."""
    return chain(phi.distinct[::-1])


def _span(phi: HermitianSpectrum, blocks) -> np.ndarray:
    cols = [i for k in blocks for i in phi.blocks[k]]
    return phi.eigenvectors[:, cols] if cols else np.zeros((phi.n, 0), dtype=complex)


def attractor_subspace(phi: HermitianSpectrum, eigenvalues) -> np.ndarray:
    """Orthonormal basis of the sum of the eigenspaces for the given eigenvalues."""
    wanted = [k for k, nu in enumerate(phi.distinct) if any(abs(nu - e) < phi.tau_eig for e in eigenvalues)]
    return _span(phi, wanted)


def projective_attractor_pairs(phi: HermitianSpectrum) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """``(nu, basis of V_+^(nu), basis of V_-^(nu))`` for each eigenvalue, largest first.

    ``V_+^(nu)`` sums the eigenspaces for eigenvalues at least nu, ``V_-^(nu)``
    those strictly below.
    """
    k = len(phi.blocks)
    return [(nu, _span(phi, range(0, i + 1)), _span(phi, range(i + 1, k))) for i, nu in enumerate(phi.distinct)]
