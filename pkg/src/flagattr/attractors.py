"""Attractors, dual repellors and connecting orbits for gradient-like flows.

Fixed data (isolated fixed flags, or eigenspace components in projective
space) carry a partial order in which every orbit goes up, from its alpha
limit to its omega limit.  Attractors then correspond to the upper sets U of
that order: the attractor of U is the union of the unstable manifolds of its
members, the dual repellor is the union of the stable manifolds of the
complement, and every other point lies on an orbit connecting the two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .coxeter import DimensionSignature, coset_poset
from .errors import IllConditioned, Inconsistent, SizeMismatch
from .flag import (
    N_SIDE,
    THETA_N_SIDE,
    FlagPoint,
    SpecialFlowGenerator,
    cell_of,
    fixed_flags,
    random_flag,
)
from .numerics import DEFAULT_RANK_TOL, HermitianSpectrum
from .poset import AttractorLattice, FinitePoset, enumerate_upper_sets, format_label
from .projective import (
    TAU_COMP,
    ProjectivePoint,
    attractor_subspace,
    fixed_block,
    flow_order,
    limit_map,
)


class PointClass(str, enum.Enum):
    ATTRACTOR = "Attractor"
    CONNECTING = "Connecting"
    REPELLOR = "Repellor"


@dataclass(frozen=True)
class FlagContext:
    """Fixed flags of a special flow, ordered by the Bruhat order on coset representatives."""

    generator: SpecialFlowGenerator
    tol: float = DEFAULT_RANK_TOL

    @property
    def signature(self) -> DimensionSignature:
        return self.generator.signature

    @property
    def poset(self) -> FinitePoset:
        return coset_poset(self.signature)

    def limit_labels(self, z: FlagPoint) -> tuple:
        """``(alpha, omega)``: the theta(N)-cell and the N-cell of z."""
        if z.signature != self.signature:
            raise SizeMismatch("flag signature does not match the context")
        return cell_of(z, THETA_N_SIDE, self.tol), cell_of(z, N_SIDE, self.tol)

    def fixed_points(self) -> list:
        return [(f.rep, f.point) for f in fixed_flags(self.signature)]


@dataclass(frozen=True)
class ProjectiveContext:
    """Eigenspace components of a Hermitian phi, ordered from source (smallest eigenvalue) to sink."""

    spectrum: HermitianSpectrum

    @property
    def poset(self) -> FinitePoset:
        return flow_order(self.spectrum)

    def _label(self, x: ProjectivePoint) -> float:
        return self.spectrum.distinct[fixed_block(self.spectrum, x)]

    def limit_labels(self, x: ProjectivePoint) -> tuple:
        backward, forward = limit_map(self.spectrum, x)
        return self._label(backward), self._label(forward)

    def fixed_points(self) -> list:
        phi = self.spectrum
        return [(nu, ProjectivePoint.from_vector(phi.block_basis(k)[:, 0])) for k, nu in enumerate(phi.distinct)]


Context = FlagContext | ProjectiveContext


@dataclass(frozen=True, eq=False)
class AttractorRealization:
    upper: frozenset
    attractor_fix: frozenset
    repellor_fix: frozenset
    attractor_description: str
    repellor_description: str
    # projective context only: orthonormal bases of the linear spans
    attractor_basis: np.ndarray | None = field(default=None, repr=False)
    repellor_basis: np.ndarray | None = field(default=None, repr=False)


def _union_text(kind: str, members, order) -> str:
    names = [format_label(x) for x in order if x in members]
    return f"union of {kind} over {{{', '.join(names)}}}" if names else "empty"


def _contained(basis: np.ndarray, span: np.ndarray) -> bool:
    if span.shape[1] == 0:
        return False
    residual = basis - span @ (span.conj().T @ basis)
    return bool(np.linalg.norm(residual) <= TAU_COMP)


def attractor_from_upper(upper, context: Context) -> AttractorRealization:
    """Attractor and dual repellor of an upper set of the context's fixed-point order.

    The fixed sets are recomputed from the geometry: a fixed flag belongs to
    the attractor when its theta(N)-cell lies in *upper* and to the repellor
    when its N-cell lies outside; in projective space a component belongs to
    the attractor when its eigenspace lies in the attractor's span.
    """
    p = context.poset
    upper = frozenset(upper)
    if not upper <= set(p.elements) or not p.is_upper_set(upper):
        raise ValueError("not an upper set of the context's fixed-point order")
    rest = frozenset(p.elements) - upper
    if isinstance(context, FlagContext):
        a_fix, r_fix = set(), set()
        for rep, point in context.fixed_points():
            alpha, omega = context.limit_labels(point)
            if alpha in upper:
                a_fix.add(rep)
            if omega in rest:
                r_fix.add(rep)
        return AttractorRealization(
            upper, frozenset(a_fix), frozenset(r_fix),
            _union_text("thetaN-cells", upper, p.elements),
            _union_text("N-cells", rest, p.elements),
        )
    phi = context.spectrum
    a_span = attractor_subspace(phi, upper)
    r_span = attractor_subspace(phi, rest)
    a_fix = {nu for k, nu in enumerate(phi.distinct) if _contained(phi.block_basis(k), a_span)}
    r_fix = {nu for k, nu in enumerate(phi.distinct) if _contained(phi.block_basis(k), r_span)}
    return AttractorRealization(
        upper, frozenset(a_fix), frozenset(r_fix),
        f"P(span of eigenspaces {{{', '.join(format_label(x) for x in p.elements if x in upper)}}})",
        f"P(span of eigenspaces {{{', '.join(format_label(x) for x in p.elements if x in rest)}}})",
        a_span, r_span,
    )


def classify_point(z, realization: AttractorRealization, context: Context,
                   labels: tuple | None = None) -> PointClass:
    """Place z in the attractor, the dual repellor, or on a connecting orbit.

    *labels* may pass precomputed ``(alpha, omega)`` limit labels.  Raises
    Inconsistent unless exactly one of the three cases applies.
    """
    alpha, omega = labels if labels is not None else context.limit_labels(z)
    upper = realization.upper
    rest = frozenset(context.poset.elements) - upper
    hits = []
    if alpha in upper:
        hits.append(PointClass.ATTRACTOR)
    if omega in rest:
        hits.append(PointClass.REPELLOR)
    if omega in upper and alpha in rest:
        hits.append(PointClass.CONNECTING)
    if len(hits) != 1:
        raise Inconsistent(f"limits ({format_label(alpha)}, {format_label(omega)}) "
                           f"fall in {len(hits)} classes")
    return hits[0]


@dataclass
class LatticeIsomorphismReport:
    n_elements: int
    upper_sets: int
    pairs_checked: int
    union_failures: list
    intersection_failures: list
    injective: bool
    distributive: bool
    complements_lower: bool
    fixed_partition: bool  # attractor and repellor fixed sets split the fixed points

    @property
    def passed(self) -> bool:
        return (not self.union_failures and not self.intersection_failures and self.injective
                and self.distributive and self.complements_lower and self.fixed_partition)

    def summary_lines(self) -> list[str]:
        mark = lambda ok: "PASS" if ok else "FAIL"
        return [
            f"attractor lattice: {mark(self.passed)} ({self.upper_sets} upper sets, "
            f"{self.pairs_checked} pairs)",
            f"  union/intersection preserved: "
            f"{mark(not self.union_failures and not self.intersection_failures)}",
            f"  injective on fixed sets: {mark(self.injective)}",
            f"  distributive: {mark(self.distributive)}",
            f"  complements are lower sets: {mark(self.complements_lower)}",
            f"  attractor/repellor split fixed points: {mark(self.fixed_partition)}",
        ]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_elements": self.n_elements,
            "upper_sets": self.upper_sets,
            "pairs_checked": self.pairs_checked,
            "union_failures": len(self.union_failures),
            "intersection_failures": len(self.intersection_failures),
            "injective": self.injective,
            "distributive": self.distributive,
            "complements_lower": self.complements_lower,
            "fixed_partition": self.fixed_partition,
        }


def lattice_isomorphism_check(p: FinitePoset, context: Context) -> LatticeIsomorphismReport:
    """Check exhaustively that U -> A_U preserves unions and intersections and is injective."""
    if set(p.elements) != set(context.poset.elements):
        raise SizeMismatch("poset elements do not match the context's fixed points")
    lattice = AttractorLattice.of(p)
    uppers = lattice.nodes
    real = {u: attractor_from_upper(u, context) for u in uppers}
    fix = {u: r.attractor_fix for u, r in real.items()}
    everything = frozenset(p.elements)
    union_fail, inter_fail = [], []
    for u in uppers:
        for v in uppers:
            if fix[u | v] != fix[u] | fix[v]:
                union_fail.append((u, v))
            if fix[u & v] != fix[u] & fix[v]:
                inter_fail.append((u, v))
    return LatticeIsomorphismReport(
        n_elements=len(p),
        upper_sets=len(uppers),
        pairs_checked=len(uppers) ** 2,
        union_failures=union_fail,
        intersection_failures=inter_fail,
        injective=len(set(fix.values())) == len(uppers),
        distributive=lattice.is_distributive(),
        complements_lower=all(p.is_lower_set(everything - u) for u in uppers),
        fixed_partition=all(
            not (r.attractor_fix & r.repellor_fix) and (r.attractor_fix | r.repellor_fix) == everything
            for r in real.values()
        ),
    )


def attractor_lattice(context: Context) -> AttractorLattice:
    """Upper sets of the context's fixed-point order under union and intersection."""
    return AttractorLattice(context.poset, tuple(enumerate_upper_sets(context.poset)))


@dataclass
class PartitionReport:
    samples: int
    upper_sets: int
    classified: int
    resampled: int
    inconsistent: int
    counts: dict  # PointClass value -> number of (sample, upper set) pairs

    @property
    def passed(self) -> bool:
        return self.inconsistent == 0 and self.classified == self.samples * self.upper_sets

    def summary_lines(self) -> list[str]:
        mark = "PASS" if self.passed else "FAIL"
        spread = ", ".join(f"{k} {self.counts.get(k.value, 0)}" for k in PointClass)
        return [
            f"three-way partition: {mark} ({self.samples} flags x {self.upper_sets} upper sets, "
            f"{self.inconsistent} inconsistent; {spread})",
        ]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "upper_sets": self.upper_sets,
            "classified": self.classified,
            "resampled": self.resampled,
            "inconsistent": self.inconsistent,
            "counts": {k.value: self.counts.get(k.value, 0) for k in PointClass},
        }


def partition_check(context: FlagContext, samples: int = 1000, seed: int = 42) -> PartitionReport:
    """Classify random flags against every upper set; each must land in exactly one class."""
    rng = np.random.default_rng(seed)
    uppers = enumerate_upper_sets(context.poset)
    reals = [attractor_from_upper(u, context) for u in uppers]
    counts: dict = {}
    classified = inconsistent = resampled = drawn = 0
    while drawn < samples and resampled <= samples:
        z = random_flag(context.signature, rng)
        try:
            labels = context.limit_labels(z)
        except IllConditioned:
            resampled += 1
            continue
        drawn += 1
        for r in reals:
            try:
                c = classify_point(z, r, context, labels)
            except Inconsistent:
                inconsistent += 1
                continue
            classified += 1
            counts[c.value] = counts.get(c.value, 0) + 1
    return PartitionReport(samples, len(uppers), classified, resampled, inconsistent, counts)
