"""Special flows on flag manifolds of GL(n, C).

Conventions: positive roots are ``e_i - e_j`` for ``i < j``, so N is the
upper unitriangular group and theta(N) the lower one.  A special generator is
a real diagonal ``X = diag(x_1 < ... < x_n)``; ``exp(tX)`` then contracts
N-orbits as t grows.  Consequently the forward (omega) limit of a point is the
fixed flag whose N-orbit contains it and the backward (alpha) limit is the
fixed flag whose theta(N)-orbit contains it.

A flag of signature ``d_1 < ... < d_k`` is an ``n x d_k`` orthonormal frame;
level i is the span of its first ``d_i`` columns.  The fixed flag of a coset
representative w has level i spanned by ``e_{w(1)}, ..., e_{w(d_i)}``.

Along every orbit the alpha limit is below the omega limit in the Bruhat
order, so here a Smale pair is written ``(source, sink)`` and the closure of
the direct pairs is compared with the Bruhat order itself.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import mpmath
import numpy as np

from .coxeter import (
    CosetRep,
    DimensionSignature,
    bruhat_leq,
    coset_poset,
    length,
    minimal_coset_reps,
    rep_from_levels,
)
from .errors import IllConditioned, NotSpecialRoots, NotSpecialWeights, RankDeficient, SizeMismatch
from .numerics import DEFAULT_RANK_TOL, TAU_ORTH, orthonormalize, rank_profile, singular_values
from .poset import FinitePoset, make_poset

TAU_FLAG = 1e-7
TAU_W = 1e-9
DEFAULT_BUDGET = 200
DEFAULT_SEED = 42
LIMIT_TIME = 40.0
MAGNITUDE_RANGE = (1e-3, 1e3)

N_SIDE = "N"
THETA_N_SIDE = "thetaN"


@dataclass(frozen=True)
class SpecialFlowGenerator:
    diag: tuple[float, ...]
    signature: DimensionSignature

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.diag, dtype=float)


def validate_special(diag, signature: DimensionSignature, tau_w: float = TAU_W) -> SpecialFlowGenerator:
    """Check that ``diag(diag)`` generates a special flow on flags of *signature*.

    Roots: the diagonal must increase strictly.  Weights: for every subspace
    dimension d in the signature, the sums over d-element subsets of the
    diagonal must be pairwise distinct (these are the weights on the d-th
    exterior power, where the Plucker line of level d lives).
    """
    x = tuple(float(v) for v in diag)
    if len(x) != signature.n:
        raise SizeMismatch(f"diagonal has {len(x)} entries, signature needs {signature.n}")
    if any(b <= a for a, b in zip(x, x[1:])):
        raise NotSpecialRoots(f"diagonal {x} is not strictly increasing")
    scale = max(1.0, max(abs(v) for v in x))
    for d in signature.dims:
        sums = sorted(sum(c) for c in combinations(x, d))
        if any(b - a < tau_w * scale for a, b in zip(sums, sums[1:])):
            raise NotSpecialWeights(f"two {d}-subsets of {x} have the same sum")
    return SpecialFlowGenerator(x, signature)


def default_diag(n: int) -> tuple[float, ...]:
    """Powers of two: every subset sum is distinct, so the generator is special for any signature."""
    return tuple(float(2 ** i) for i in range(n))


def _sine_distance(a: np.ndarray, b: np.ndarray) -> float:
    # a, b orthonormal with equal width; sine of the largest principal angle
    if a.shape[1] == 0:
        return 0.0
    r = a - b @ (b.conj().T @ a)
    return float(singular_values(r)[0])


@dataclass(frozen=True, eq=False)
class FlagPoint:
    frame: np.ndarray
    signature: DimensionSignature

    @classmethod
    def from_matrix(cls, m, signature: DimensionSignature) -> "FlagPoint":
        """Flag spanned by the column prefixes of *m* (only the first ``d_k`` columns are used)."""
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != signature.n or m.shape[1] < signature.top:
            raise SizeMismatch(f"need an {signature.n} x {signature.top} frame, got {m.shape}")
        q = orthonormalize(m[:, : signature.top])
        q.setflags(write=False)
        return cls(q, signature)

    def level(self, i: int) -> np.ndarray:
        return self.frame[:, : self.signature.dims[i]]

    def is_orthonormal(self, tol: float = TAU_ORTH) -> bool:
        g = self.frame.conj().T @ self.frame
        return bool(np.max(np.abs(g - np.eye(g.shape[0])), initial=0.0) < tol)

    def distance(self, other: "FlagPoint") -> float:
        """Largest principal-angle sine over all levels."""
        if self.signature != other.signature:
            raise SizeMismatch("flags of different signatures")
        return max((_sine_distance(self.level(i), other.level(i)) for i in range(len(self.signature.dims))),
                   default=0.0)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlagPoint) and self.signature == other.signature and self.distance(other) < TAU_FLAG

    __hash__ = None


def coordinate_frame(rep: CosetRep, signature: DimensionSignature) -> np.ndarray:
    q = np.zeros((signature.n, signature.top), dtype=complex)
    for k in range(signature.top):
        q[rep[k] - 1, k] = 1.0
    return q


@dataclass(frozen=True)
class FixedFlag:
    rep: CosetRep
    signature: DimensionSignature

    @property
    def point(self) -> FlagPoint:
        q = coordinate_frame(self.rep, self.signature)
        q.setflags(write=False)
        return FlagPoint(q, self.signature)


def fixed_flags(signature: DimensionSignature) -> list[FixedFlag]:
    return [FixedFlag(w, signature) for w in minimal_coset_reps(signature)]


def _decisive_rank(m: np.ndarray, tol: float) -> int:
    # frames are orthonormal, so singular values are measured against 1
    r, rel, _ = rank_profile(m, tol, scale=1.0)
    if np.any((rel >= 0.1 * tol) & (rel <= 10.0 * tol)):
        raise IllConditioned(f"singular value within the ambiguity band of {tol:g}")
    return r


def _jump_sets(z: FlagPoint, side: str, tol: float) -> list[frozenset]:
    sig = z.signature
    n = sig.n
    levels: list[frozenset] = []
    for i, d in enumerate(sig.dims):
        q = z.level(i)
        if side == N_SIDE:
            # dim(F_i ∩ span(e_1..e_j)) = d - rank(rows j+1..n), for j = 0..n
            dims = [d - _decisive_rank(q[j:, :], tol) if j < n else d for j in range(n + 1)]
            steps = [dims[j] - dims[j - 1] for j in range(1, n + 1)]
        elif side == THETA_N_SIDE:
            # dim(F_i ∩ span(e_j..e_n)) = d - rank(rows 1..j-1), for j = 1..n+1
            dims = [d - _decisive_rank(q[: j - 1, :], tol) if j > 1 else d for j in range(1, n + 2)]
            steps = [dims[j - 1] - dims[j] for j in range(1, n + 1)]
        else:
            raise ValueError(f"side must be {N_SIDE!r} or {THETA_N_SIDE!r}")
        if any(s not in (0, 1) for s in steps) or sum(steps) != d:
            raise IllConditioned(f"inconsistent rank profile at level {i}")
        jumps = frozenset(j + 1 for j, s in enumerate(steps) if s == 1)
        if levels and not levels[-1] < jumps:
            raise IllConditioned("rank profiles of consecutive levels are not nested")
        levels.append(jumps)
    return levels


def cell_of(z: FlagPoint, side: str = N_SIDE, tol: float = DEFAULT_RANK_TOL) -> CosetRep:
    """Coset representative of the N-orbit (or theta(N)-orbit) containing z.

    N preserves every ``span(e_1..e_j)``, so the dimensions of
    ``F_i ∩ span(e_1..e_j)`` are N-invariant and their jumps give the relative
    position of z; theta(N) uses ``span(e_j..e_n)`` instead.
    """
    return rep_from_levels(_jump_sets(z, side, tol), z.signature)


def flag_height(X: SpecialFlowGenerator, z: FlagPoint) -> float:
    """Sum over levels of ``-1/2 tr(P_i X)``: the Rayleigh height of the Plucker image."""
    w = np.abs(z.frame) ** 2
    total = 0.0
    for d in z.signature.dims:
        total += float(X.array @ w[:, :d].sum(axis=1))
    return -0.5 * total


def flow_flag(X: SpecialFlowGenerator, t: float, z: FlagPoint) -> FlagPoint:
    """``exp(tX)`` applied to z, in substeps so each step stays well conditioned."""
    if X.signature != z.signature:
        raise SizeMismatch("generator and flag have different signatures")
    if not np.isfinite(t):
        raise ValueError("flow time must be finite")
    x = X.array
    spread = float(x.max() - x.min())
    steps = max(1, math.ceil(abs(t) * spread / 8.0))
    dt = t / steps
    scale = np.exp(dt * x - np.max(dt * x))
    q = np.array(z.frame)
    for _ in range(steps):
        q = orthonormalize(scale[:, None] * q)
    q.setflags(write=False)
    return FlagPoint(q, z.signature)


def limits(X: SpecialFlowGenerator, z: FlagPoint) -> tuple[FixedFlag, FixedFlag]:
    """``(alpha limit, omega limit)`` of the orbit through z, read off the two cells."""
    sig = z.signature
    return FixedFlag(cell_of(z, THETA_N_SIDE), sig), FixedFlag(cell_of(z, N_SIDE), sig)


def snap_to_fixed(z: FlagPoint) -> tuple[FixedFlag, float]:
    """Nearest fixed flag and its distance."""
    sig = z.signature
    weights = np.abs(z.frame) ** 2
    levels = []
    for d in sig.dims:
        row_mass = weights[:, :d].sum(axis=1)
        levels.append(frozenset(int(r) + 1 for r in np.argsort(-row_mass, kind="stable")[:d]))
    if all(a < b for a, b in zip(levels, levels[1:])):
        guess = FixedFlag(rep_from_levels(levels, sig), sig)
        dist = z.distance(guess.point)
        if dist < 0.5:
            return guess, dist
    best = min(fixed_flags(sig), key=lambda f: z.distance(f.point))
    return best, z.distance(best.point)


def limits_by_flow(X: SpecialFlowGenerator, z: FlagPoint, t: float = LIMIT_TIME) -> tuple[FixedFlag, FixedFlag]:
    """Numerical oracle for ``limits``: flow to -t and +t, snap to the nearest fixed flag.

    Runs in double precision, which is reliable for points in general
    position only: rounding errors of size 1e-16 grow like ``exp(t * spread)``
    and push a non-generic point into a bigger cell.  Use
    ``limits_by_exact_flow`` for points known exactly.
    """
    alpha, _ = snap_to_fixed(flow_flag(X, -t, z))
    omega, _ = snap_to_fixed(flow_flag(X, t, z))
    return alpha, omega


def _mp_flow_snap(X: SpecialFlowGenerator, m, t: float, sig: DimensionSignature) -> FixedFlag:
    # single-shot exp(tX) m and Gram-Schmidt at the current mpmath precision
    x = [mpmath.mpf(v) for v in X.diag]
    shift = max(t * v for v in x)
    rows = [[mpmath.exp(t * x[i] - shift) * m[i][k] for k in range(sig.top)] for i in range(sig.n)]
    cols: list[list] = []
    for k in range(sig.top):
        c = [rows[i][k] for i in range(sig.n)]
        for _ in range(2):
            for q in cols:
                proj = mpmath.fsum(mpmath.conj(q[i]) * c[i] for i in range(sig.n))
                c = [c[i] - proj * q[i] for i in range(sig.n)]
        norm = mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in c))
        cols.append([v / norm for v in c])
    frame = np.array([[complex(cols[k][i]) for k in range(sig.top)] for i in range(sig.n)])
    return snap_to_fixed(FlagPoint(frame, sig))[0]


def limits_by_exact_flow(X: SpecialFlowGenerator, m, t: float = LIMIT_TIME,
                         dps: int | None = None) -> tuple[FixedFlag, FixedFlag]:
    """Flow oracle in extended precision for an exactly given frame *m* (not orthonormalized).

    The working precision exceeds the dynamic range ``exp(t * spread)`` of the
    flow, so the snapped limits are those of the exact point.
    """
    sig = X.signature
    spread = max(X.diag) - min(X.diag)
    if dps is None:
        dps = int(math.ceil(t * spread / math.log(10.0))) + 40
    with mpmath.workdps(dps):
        mm = [[mpmath.mpc(complex(m[i][k]).real, complex(m[i][k]).imag) for k in range(sig.top)]
              for i in range(sig.n)]
        return _mp_flow_snap(X, mm, -t, sig), _mp_flow_snap(X, mm, t, sig)


def random_flag(signature: DimensionSignature, rng: np.random.Generator) -> FlagPoint:
    """Orthonormalized complex Gaussian frame."""
    shape = (signature.n, signature.top)
    return FlagPoint.from_matrix(rng.normal(size=shape) + 1j * rng.normal(size=shape), signature)


# --- Smale relation -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SmaleWitness:
    """A point flowing backward to ``alpha_cell`` and forward to ``omega_cell``."""

    point: FlagPoint
    alpha_cell: CosetRep
    omega_cell: CosetRep
    construction: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha_cell": list(self.alpha_cell),
            "omega_cell": list(self.omega_cell),
            "frame": [[[float(z.real), float(z.imag)] for z in row] for row in self.point.frame],
            "construction": self.construction,
        }


def negative_roots(n: int) -> list[tuple[int, int]]:
    """Strictly lower-triangular positions ``(row, col)``, 0-based."""
    return [(a, b) for b in range(n) for a in range(b + 1, n)]


def _random_coefficient(rng: np.random.Generator) -> complex:
    lo, hi = np.log10(MAGNITUDE_RANGE[0]), np.log10(MAGNITUDE_RANGE[1])
    return complex(10.0 ** rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform()))


def perturbation_schedule(n: int, budget: int, rng: np.random.Generator):
    """Yield ``(phase, entries)`` with entries ``[(row, col, coefficient), ...]``.

    Two passes of single negative-root entries, then sparse supports of size
    2..n(n-1)/2 up to 80% of the budget, then dense lower-triangular matrices.
    """
    roots = negative_roots(n)
    emitted = 0
    for _ in range(2):
        for a, b in roots:
            if emitted >= budget:
                return
            emitted += 1
            yield "single", [(a, b, _random_coefficient(rng))]
    sparse_end = max(emitted, int(0.8 * budget))
    while emitted < budget:
        emitted += 1
        if emitted <= sparse_end and len(roots) >= 2:
            size = int(rng.integers(2, len(roots) + 1))
            picked = sorted(rng.choice(len(roots), size=size, replace=False))
            yield "sparse", [(*roots[k], _random_coefficient(rng)) for k in picked]
        else:
            yield "dense", [(a, b, _random_coefficient(rng)) for a, b in roots]


def lower_unipotent(n: int, entries) -> np.ndarray:
    """``exp(Y)`` for strictly lower-triangular Y (finite series, Y is nilpotent)."""
    y = np.zeros((n, n), dtype=complex)
    for a, b, c in entries:
        if a <= b:
            raise ValueError("entries must be strictly below the diagonal")
        y[a, b] = c
    g = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n):
        term = term @ y / k
        g = g + term
    return g


def witness_point(source: CosetRep, entries, signature: DimensionSignature) -> FlagPoint:
    """``exp(Y)`` applied to the fixed flag of *source*: a point of its theta(N)-orbit."""
    g = lower_unipotent(signature.n, entries)
    return FlagPoint.from_matrix(g @ coordinate_frame(source, signature), signature)


def _replay(w: SmaleWitness) -> list[list]:
    # exp(Y) x_source at the current mpmath precision, columns not orthonormalized
    sig = w.point.signature
    n = sig.n
    source = tuple(w.construction["source"])
    y = mpmath.zeros(n, n)
    for a, b, re, im in w.construction["entries"]:
        y[a, b] = mpmath.mpc(re, im)
    g = mpmath.eye(n)
    term = mpmath.eye(n)
    for k in range(1, n):
        term = term * y / k
        g = g + term
    return [[g[i, source[k] - 1] for k in range(sig.top)] for i in range(n)]


def witness_limits_by_flow(X: SpecialFlowGenerator, w: SmaleWitness, t: float = LIMIT_TIME) -> tuple[FixedFlag, FixedFlag]:
    """Replay the witness from its construction record and flow it in extended precision."""
    sig = w.point.signature
    spread = max(X.diag) - min(X.diag)
    with mpmath.workdps(int(math.ceil(t * spread / math.log(10.0))) + 40):
        m = _replay(w)
        return _mp_flow_snap(X, m, -t, sig), _mp_flow_snap(X, m, t, sig)


def verify_witness(X: SpecialFlowGenerator, w: SmaleWitness, cross_check: bool = True,
                   tol: float = DEFAULT_RANK_TOL) -> bool:
    """Recompute both cells from scratch; optionally replay and flow the construction."""
    try:
        if cell_of(w.point, THETA_N_SIDE, tol) != w.alpha_cell or cell_of(w.point, N_SIDE, tol) != w.omega_cell:
            return False
    except IllConditioned:
        return False
    if cross_check:
        alpha, omega = witness_limits_by_flow(X, w)
        return alpha.rep == w.alpha_cell and omega.rep == w.omega_cell
    return True


def _search(X, source, sink, budget, rng, seed_tag, tol=DEFAULT_RANK_TOL) -> tuple[SmaleWitness | None, dict]:
    sig = X.signature
    stats = {"candidates": 0, "ill_conditioned": 0, "rejected": 0}
    for k, (phase, entries) in enumerate(perturbation_schedule(sig.n, budget, rng)):
        stats["candidates"] += 1
        try:
            z = witness_point(source, entries, sig)
            if cell_of(z, N_SIDE, tol) != sink:
                continue
        except (IllConditioned, RankDeficient):
            stats["ill_conditioned"] += 1
            continue
        w = SmaleWitness(z, source, sink, {
            "seed": seed_tag,
            "source": list(source),
            "candidate": k,
            "phase": phase,
            "entries": [[a, b, c.real, c.imag] for a, b, c in entries],
        })
        if verify_witness(X, w, tol=tol):
            return w, stats
        stats["rejected"] += 1
    return None, stats


def _pair_rng(seed: int, source: CosetRep, sink: CosetRep, sig: DimensionSignature) -> np.random.Generator:
    reps = minimal_coset_reps(sig)
    return np.random.default_rng(np.random.SeedSequence([seed, reps.index(source), reps.index(sink)]))


def smale_witness_search(X: SpecialFlowGenerator, source: CosetRep, sink: CosetRep,
                         budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
                         tol: float = DEFAULT_RANK_TOL) -> SmaleWitness | None:
    """Look for a point flowing from the fixed flag *source* to the fixed flag *sink*.

    Candidates are ``exp(Y)`` applied to the source flag with Y strictly lower
    triangular, so they lie in its theta(N)-orbit (its unstable manifold); a
    candidate is a witness when its N-cell is *sink*.  ``None`` after the
    budget is spent says nothing about whether such a point exists.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    if budget <= 0:
        raise ValueError("budget must be positive")
    w, _ = _search(X, source, sink, budget, _pair_rng(seed, source, sink, X.signature), seed, tol)
    return w


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FLAGATTR_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class SmaleRelation:
    fixed: tuple[CosetRep, ...]
    direct: frozenset  # (source, sink) pairs with a verified witness
    witnesses: dict
    closure: FinitePoset
    stats: dict


def smale_relation(X: SpecialFlowGenerator, budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
                   threads: int | None = None, tol: float = DEFAULT_RANK_TOL) -> SmaleRelation:
    """Witness search over every ordered pair of distinct fixed flags."""
    sig = X.signature
    reps = minimal_coset_reps(sig)
    pairs = [(u, v) for u in reps for v in reps if u != v]

    def run(pair):
        u, v = pair
        return _search(X, u, v, budget, _pair_rng(seed, u, v, sig), seed, tol)

    workers = threads or _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(p) for p in pairs]

    witnesses = {}
    totals = {"candidates": 0, "ill_conditioned": 0, "rejected": 0}
    for pair, (w, st) in zip(pairs, results):
        for key in totals:
            totals[key] += st[key]
        if w is not None:
            witnesses[pair] = w
    direct = frozenset(witnesses)
    return SmaleRelation(reps, direct, witnesses, make_poset(reps, direct), totals)


@dataclass
class SmaleBruhatReport:
    signature: DimensionSignature
    n_fixed: int
    bruhat_pairs: int
    closure_pairs: int
    direct_pairs: int
    unsound: list  # direct pairs that are not Bruhat comparable
    covers: int
    missing_covers: list
    closure_equal: bool
    closure_only: list  # in the Smale closure but not in the Bruhat order
    bruhat_only: list
    distant_pairs: int
    distant_hits: int
    stats: dict

    @property
    def soundness(self) -> bool:
        return not self.unsound

    @property
    def cover_completeness(self) -> bool:
        return not self.missing_covers

    @property
    def passed(self) -> bool:
        return self.soundness and self.cover_completeness and self.closure_equal

    def summary_lines(self) -> list[str]:
        mark = lambda ok: "PASS" if ok else "FAIL"
        return [
            f"smale=bruhat: {mark(self.passed)} ({self.bruhat_pairs} pairs)",
            f"  witness soundness: {mark(self.soundness)} "
            f"({self.direct_pairs - len(self.unsound)}/{self.direct_pairs} direct pairs Bruhat-comparable)",
            f"  cover completeness: {mark(self.cover_completeness)} "
            f"({self.covers - len(self.missing_covers)}/{self.covers} covers witnessed)",
            f"  closure equality: {mark(self.closure_equal)} "
            f"({self.closure_pairs} closure pairs vs {self.bruhat_pairs} Bruhat pairs)",
            f"  distant pairs witnessed directly: {self.distant_hits}/{self.distant_pairs}",
        ]

    def to_dict(self) -> dict:
        lab = lambda ps: [[list(a), list(b)] for a, b in ps]
        return {
            "signature": {"n": self.signature.n, "dims": list(self.signature.dims)},
            "passed": self.passed,
            "n_fixed": self.n_fixed,
            "bruhat_pairs": self.bruhat_pairs,
            "closure_pairs": self.closure_pairs,
            "direct_pairs": self.direct_pairs,
            "soundness": self.soundness,
            "unsound": lab(self.unsound),
            "covers": self.covers,
            "cover_completeness": self.cover_completeness,
            "missing_covers": lab(self.missing_covers),
            "closure_equal": self.closure_equal,
            "closure_only": lab(self.closure_only),
            "bruhat_only": lab(self.bruhat_only),
            "distant_pairs": self.distant_pairs,
            "distant_hits": self.distant_hits,
            "stats": self.stats,
        }


def compare_closure(closure: FinitePoset, reference: FinitePoset) -> tuple[bool, list, list]:
    """``(equal, only in closure, only in reference)`` over ordered pairs."""
    a, b = closure.pairs(), reference.pairs()
    key = lambda p: (p[0], p[1])
    return a == b, sorted(a - b, key=key), sorted(b - a, key=key)


def bruhat_report(sig: DimensionSignature, relation: SmaleRelation) -> SmaleBruhatReport:
    bruhat = coset_poset(sig)
    covers = bruhat.covers()
    cover_set = set(covers)
    equal, closure_only, bruhat_only = compare_closure(relation.closure, bruhat)
    distant = [(u, v) for u, v in bruhat.pairs() if u != v and (u, v) not in cover_set]
    return SmaleBruhatReport(
        signature=sig,
        n_fixed=len(relation.fixed),
        bruhat_pairs=len(bruhat.pairs()),
        closure_pairs=len(relation.closure.pairs()),
        direct_pairs=len(relation.direct),
        unsound=sorted(p for p in relation.direct if not bruhat_leq(*p)),
        covers=len(covers),
        missing_covers=sorted(p for p in covers if p not in relation.direct),
        closure_equal=equal,
        closure_only=closure_only,
        bruhat_only=bruhat_only,
        distant_pairs=len(distant),
        distant_hits=sum(1 for p in distant if p in relation.direct),
        stats=dict(relation.stats),
    )


def verify_smale_equals_bruhat(X: SpecialFlowGenerator, budget: int = DEFAULT_BUDGET,
                               seed: int = DEFAULT_SEED, threads: int | None = None,
                               tol: float = DEFAULT_RANK_TOL) -> SmaleBruhatReport:
    """Soundness, cover completeness and closure equality of the witnessed Smale relation."""
    return bruhat_report(X.signature, smale_relation(X, budget, seed, threads, tol))


@dataclass
class CellPartitionReport:
    samples: int
    classified: int
    resampled: int
    violations: list  # (alpha, omega) with alpha not Bruhat-below omega
    counts: dict  # (alpha, omega) -> number of samples
    max_resample_rate: float = 0.001

    @property
    def passed(self) -> bool:
        return (self.classified == self.samples and not self.violations
                and self.resampled <= self.max_resample_rate * self.samples)

    def summary_lines(self) -> list[str]:
        mark = "PASS" if self.passed else "FAIL"
        return [
            f"cell partition: {mark} ({self.classified}/{self.samples} classified, "
            f"{self.resampled} resampled, {len(self.violations)} order violations)",
        ]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "classified": self.classified,
            "resampled": self.resampled,
            "violations": [[list(a), list(b)] for a, b in self.violations],
            "counts": [[list(a), list(b), c] for (a, b), c in sorted(self.counts.items())],
        }


def cell_partition_check(X: SpecialFlowGenerator, samples: int = 1000, seed: int = DEFAULT_SEED,
                         tol: float = DEFAULT_RANK_TOL) -> CellPartitionReport:
    """Classify random flags into (theta(N)-cell, N-cell) and check alpha <= omega in Bruhat order."""
    sig = X.signature
    rng = np.random.default_rng(seed)
    counts: dict = {}
    violations = []
    resampled = 0
    classified = 0
    max_tries = samples + max(10, samples // 100)
    tries = 0
    while classified < samples and tries < max_tries:
        tries += 1
        z = random_flag(sig, rng)
        try:
            alpha = cell_of(z, THETA_N_SIDE, tol)
            omega = cell_of(z, N_SIDE, tol)
        except IllConditioned:
            resampled += 1
            continue
        classified += 1
        counts[(alpha, omega)] = counts.get((alpha, omega), 0) + 1
        if not bruhat_leq(alpha, omega):
            violations.append((alpha, omega))
    return CellPartitionReport(samples, classified, resampled, violations, counts)


@dataclass
class TransversalityReport:
    manifold_dim: int
    rank_n: int
    rank_theta_n: int
    joint_rank: int
    expected_rank_n: int
    expected_rank_theta_n: int

    @property
    def transversal(self) -> bool:
        return self.joint_rank == self.manifold_dim

    @property
    def intersection_dim(self) -> int:
        return self.rank_n + self.rank_theta_n - self.joint_rank

    @property
    def passed(self) -> bool:
        return (self.transversal and self.rank_n == self.expected_rank_n
                and self.rank_theta_n == self.expected_rank_theta_n)


def _tangent(z: FlagPoint, y: np.ndarray) -> np.ndarray:
    # derivative of t -> exp(tY) z, one normal component per level
    parts = []
    for i in range(len(z.signature.dims)):
        q = z.level(i)
        yq = y @ q
        parts.append((yq - q @ (q.conj().T @ yq)).ravel())
    return np.concatenate(parts)


def _mp_orthonormal(m: list[list]) -> mpmath.matrix:
    n, k = len(m), len(m[0])
    cols: list[list] = []
    for j in range(k):
        c = [m[i][j] for i in range(n)]
        for _ in range(2):
            for q in cols:
                proj = mpmath.fsum(mpmath.conj(q[i]) * c[i] for i in range(n))
                c = [c[i] - proj * q[i] for i in range(n)]
        norm = mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in c))
        cols.append([v / norm for v in c])
    q = mpmath.matrix(n, k)
    for j in range(k):
        for i in range(n):
            q[i, j] = cols[j][i]
    return q


def _mp_tangent(q: mpmath.matrix, sig: DimensionSignature, a: int, b: int) -> list:
    # normal part of E_ab Q at every level; E_ab Q has row a equal to row b of Q
    out = []
    for d in sig.dims:
        yq = mpmath.matrix(sig.n, d)
        for k in range(d):
            yq[a, k] = q[b, k]
        coef = [mpmath.conj(q[a, j]) for j in range(d)]  # Q_i^H E_ab Q_i = conj(Q[a, :])^T Q[b, :]
        for i in range(sig.n):
            for k in range(d):
                out.append(yq[i, k] - mpmath.fsum(q[i, j] * coef[j] * q[b, k] for j in range(d)))
    return out


def _mp_rank(columns: list[list], tol: float) -> int:
    m = mpmath.matrix(len(columns[0]), len(columns))
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            m[i, j] = v
    s = mpmath.svd_c(m, compute_uv=False)
    vals = sorted((abs(v) for v in s), reverse=True)
    if not vals or vals[0] == 0:
        return 0
    rel = [v / vals[0] for v in vals]
    if any(0.1 * tol <= r <= 10 * tol for r in rel):
        raise IllConditioned("tangent rank decision is ambiguous")
    return sum(1 for r in rel if r > tol)


TANGENT_DPS = 50
TANGENT_TOL_EXACT = 1e-25


def transversality_probe(X: SpecialFlowGenerator, witness: SmaleWitness, tol: float = 1e-8) -> TransversalityReport:
    """Complex ranks of the tangent spaces of the N- and theta(N)-orbits through the witness.

    Transversality means the two spans together fill the tangent space of the
    flag manifold.  The N-orbit of the omega cell has dimension length(omega);
    the theta(N)-orbit of the alpha cell has codimension length(alpha).

    A witness with a construction record is replayed at 50 digits, since the
    tangent frames of strongly scaled witnesses have genuine singular values
    far below what double precision separates from zero.  Otherwise the
    stored frame is used with relative tolerance *tol*.
    """
    z = witness.point
    sig = z.signature
    if not z.is_orthonormal():
        raise IllConditioned("witness frame is not orthonormal")
    n = sig.n
    report = lambda r_n, r_t, r_j: TransversalityReport(
        manifold_dim=sig.manifold_dim,
        rank_n=r_n,
        rank_theta_n=r_t,
        joint_rank=r_j,
        expected_rank_n=length(witness.omega_cell),
        expected_rank_theta_n=sig.manifold_dim - length(witness.alpha_cell),
    )

    if "entries" in witness.construction:
        with mpmath.workdps(TANGENT_DPS):
            q = _mp_orthonormal(_replay(witness))
            upper = [_mp_tangent(q, sig, b, a) for a, b in negative_roots(n)]
            lower = [_mp_tangent(q, sig, a, b) for a, b in negative_roots(n)]
            r = lambda cols: _mp_rank(cols, TANGENT_TOL_EXACT)
            return report(r(upper), r(lower), r(upper + lower))

    def unit(a, b):
        e = np.zeros((n, n), dtype=complex)
        e[a, b] = 1.0
        return e

    upper = np.column_stack([_tangent(z, unit(b, a)) for a, b in negative_roots(n)])
    lower = np.column_stack([_tangent(z, unit(a, b)) for a, b in negative_roots(n)])

    def rank(m):
        r, rel, _ = rank_profile(m, tol)
        if np.any((rel >= 0.1 * tol) & (rel <= 10.0 * tol)):
            raise IllConditioned("tangent rank decision is ambiguous")
        return r

    return report(rank(upper), rank(lower), rank(np.hstack([upper, lower])))
