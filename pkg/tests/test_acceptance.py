"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

import time

import numpy as np
import pytest

from flagattr.attractors import (
    FlagContext,
    ProjectiveContext,
    attractor_from_upper,
    attractor_lattice,
    lattice_isomorphism_check,
    partition_check,
)
from flagattr.coxeter import DimensionSignature, bruhat_leq, coset_poset
from flagattr.flag import (
    N_SIDE,
    THETA_N_SIDE,
    FlagPoint,
    cell_of,
    default_diag,
    smale_relation,
    validate_special,
    verify_smale_equals_bruhat,
)
from flagattr.numerics import hermitian_eigendecompose, numerical_rank
from flagattr.poset import chain, enumerate_upper_sets, make_poset
from flagattr.projective import (
    ProjectivePoint,
    component_smale_order,
    fixed_components,
    flow,
    gradient_field,
    height,
    limit_map,
    projective_attractor_pairs,
)
from oracles import all_perms, grassmannian_reps, random_hermitian, subword_pairs, upper_sets_by_filter

criterion = pytest.mark.criterion


def _smale_bruhat(sig, diag, oracle_pairs, limit_s):
    X = validate_special(diag, sig)
    start = time.perf_counter()
    report = verify_smale_equals_bruhat(X, threads=1)
    elapsed = time.perf_counter() - start
    print(*report.summary_lines(), f"  runtime {elapsed:.1f} s", sep="\n")
    assert report.soundness and not report.unsound
    assert report.cover_completeness
    assert report.closure_equal
    assert report.bruhat_pairs == report.closure_pairs == len(oracle_pairs)
    assert report.n_fixed == len(coset_poset(sig))
    assert elapsed < limit_s
    return report


@criterion(1, "Smale = Bruhat on S3 (19 pairs, 8 covers, < 10 s)")
def test_criterion_01_s3():
    oracle = subword_pairs(all_perms(3))
    report = _smale_bruhat(DimensionSignature((1, 2), 3), (1, 2, 3), oracle, 10.0)
    assert report.covers == 8 and report.bruhat_pairs == 19


@criterion(2, "Smale = Bruhat on S4 full flag (< 3 min)")
def test_criterion_02_s4():
    oracle = subword_pairs(all_perms(4))
    report = _smale_bruhat(DimensionSignature.full(4), default_diag(4), oracle, 180.0)
    assert report.n_fixed == 24


@criterion(3, "Smale = Bruhat on Gr(2,4), 8 attractors (< 10 s)")
def test_criterion_03_grassmannian():
    sig = DimensionSignature((2,), 4)
    start = time.perf_counter()
    oracle = subword_pairs(grassmannian_reps(4, 2))
    _smale_bruhat(sig, default_diag(4), oracle, 10.0)
    p = coset_poset(sig)
    assert len(p) == 6
    uppers = attractor_lattice(FlagContext(validate_special(default_diag(4), sig))).nodes
    assert len(uppers) == 8
    assert set(uppers) == upper_sets_by_filter(p.elements, bruhat_leq)
    assert time.perf_counter() - start < 10.0


@criterion(4, "projective chain: order anti-isomorphic to spectrum, k+1 attractors")
def test_criterion_04_projective_chain():
    start = time.perf_counter()
    spectra = {1: (2.0, 2.0, 2.0), 2: (1.0, 3.0, 3.0), 3: (1.0, 2.0, 5.0), 5: (-1.0, 0.5, 0.5, 2.0, 4.0, 7.0)}
    for k, d in spectra.items():
        phi = hermitian_eigendecompose(np.diag(d))
        order = component_smale_order(phi)
        values = sorted(set(d))
        assert len(order) == k
        # nu <= mu in the order exactly when nu >= mu as numbers
        for a in values:
            for b in values:
                assert order.le(a, b) == (a >= b)
        assert len(order.covers()) == k - 1
        lattice = attractor_lattice(ProjectiveContext(phi))
        assert len(lattice) == k + 1 and frozenset() in lattice.nodes
        for nu, v_plus, v_minus in projective_attractor_pairs(phi):
            assert v_plus.shape[1] == sum(1 for x in d if x >= nu)
            real = attractor_from_upper({x for x in values if x >= nu}, ProjectiveContext(phi))
            assert real.attractor_basis.shape[1] == v_plus.shape[1]
    elapsed = time.perf_counter() - start
    print(f"projective chains k=1,2,3,5: PASS in {elapsed:.3f} s")
    assert elapsed < 1.0


def _random_point(rng, n):
    return ProjectivePoint.from_vector(rng.normal(size=n) + 1j * rng.normal(size=n))


@criterion(5, "gradient matches finite differences (1e-6), vanishes on fixed points (1e-10)")
def test_criterion_05_gradient():
    rng = np.random.default_rng(5)
    worst = 0.0
    h = 1e-5
    for _ in range(100):
        n = int(rng.integers(2, 9))
        phi = hermitian_eigendecompose(random_hermitian(rng, n))
        x = _random_point(rng, n)
        v = x.homogeneous
        g = gradient_field(phi, x)
        assert abs(np.vdot(v, g)) < 1e-12
        xi = rng.normal(size=n) + 1j * rng.normal(size=n)
        xi -= np.vdot(v, xi) * v
        for d in (xi / np.linalg.norm(xi), g / np.linalg.norm(g)):
            # curve through x with velocity d; df(d) = Re <g, d>
            plus = height(phi, ProjectivePoint.from_vector(v + h * d))
            minus = height(phi, ProjectivePoint.from_vector(v - h * d))
            fd = (plus - minus) / (2 * h)
            err = abs(fd - np.vdot(g, d).real) / np.linalg.norm(g)
            worst = max(worst, err)
        for comp in fixed_components(phi):
            assert np.linalg.norm(gradient_field(phi, ProjectivePoint.from_vector(comp.basis[:, 0]))) < 1e-10
    print(f"gradient: worst relative finite-difference error {worst:.2e}")
    assert worst < 1e-6


@criterion(6, "height strictly decreases along orbits, f(alpha) > f(omega)")
def test_criterion_06_descent():
    rng = np.random.default_rng(6)
    grid = np.round(np.arange(1, 101) * 0.1, 10)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        m = random_hermitian(rng, n)
        vals = np.linalg.eigvalsh(m)
        # unit spectral spread keeps every step above rounding noise up to t = 10
        m = (m - vals[0] * np.eye(n)) / (vals[-1] - vals[0])
        phi = hermitian_eigendecompose(m)
        x = _random_point(rng, n)
        hs = [height(phi, x)] + [height(phi, flow(phi, t, x)) for t in grid]
        assert all(b < a for a, b in zip(hs, hs[1:]))
        alpha, omega = limit_map(phi, x)
        assert height(phi, alpha) > height(phi, omega)


@criterion(7, "three-way partition: 1000 flags x 9 upper sets, no inconsistency")
def test_criterion_07_partition():
    ctx = FlagContext(validate_special((1, 2, 3), DimensionSignature.full(3)))
    report = partition_check(ctx, samples=1000, seed=7)
    print(*report.summary_lines())
    assert report.upper_sets == 9
    assert report.inconsistent == 0
    assert report.classified == 9000
    assert report.passed


@criterion(8, "lattice isomorphism on S3 and Gr(2,4), distributive")
def test_criterion_08_lattice_isomorphism():
    for sig, count in [(DimensionSignature.full(3), 9), (DimensionSignature((2,), 4), 8)]:
        ctx = FlagContext(validate_special(default_diag(sig.n), sig))
        report = lattice_isomorphism_check(ctx.poset, ctx)
        print(*report.summary_lines())
        assert report.upper_sets == count and report.pairs_checked == count * count
        assert not report.union_failures and not report.intersection_failures
        assert report.injective and report.distributive
        assert report.passed


@criterion(9, "upper-set enumeration equals the 2^|p| filter for |p| <= 10")
def test_criterion_09_enumeration_oracle():
    rng = np.random.default_rng(9)
    posets = [coset_poset(DimensionSignature.full(3)), coset_poset(DimensionSignature((2,), 4)),
              coset_poset(DimensionSignature((1,), 4)), coset_poset(DimensionSignature.full(2))]
    posets += [chain(range(k)) for k in range(1, 11)]
    for _ in range(200):
        n = int(rng.integers(1, 11))
        density = rng.uniform(0.05, 0.6)
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < density]
        posets.append(make_poset(range(n), pairs))
    for p in posets:
        assert len(p) <= 10
        ours = enumerate_upper_sets(p)
        assert len(ours) == len(set(ours))
        assert set(ours) == upper_sets_by_filter(p.elements, p.le)
    print(f"enumeration oracle: {len(posets)} posets agree")


@criterion(10, "numerics floor: reconstruction < 1e-9, ranks stable under 1e-12 perturbations")
def test_criterion_10_numerics_floor():
    rng = np.random.default_rng(10)
    corpus = [random_hermitian(rng, n) for n in list(range(1, 13)) + [16, 24, 32]]
    corpus += [np.diag(d) for d in [(2, 1), (3, 3, 1), (1, 2, 5), (1, 1, 1), (-1, 0.5, 0.5, 2, 4, 7)]]
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    corpus.append(q @ np.diag([1, 1, 1, 2, 2, 1e-9]) @ q.conj().T)
    worst = 0.0
    for m in corpus:
        s = hermitian_eigendecompose(m)
        worst = max(worst, np.linalg.norm(s.matrix() - m) / max(np.linalg.norm(m), 1e-300))
    print(f"worst reconstruction residual {worst:.1e}")
    assert worst < 1e-9

    for _ in range(200):
        n, k, r = (int(v) for v in rng.integers(1, 9, size=3))
        m = (rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))) @ (rng.normal(size=(r, k)))
        noise = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        e = 1e-12 * np.linalg.norm(m) * noise / np.linalg.norm(noise)
        assert numerical_rank(m + e) == numerical_rank(m) == min(n, k, r)

    # cell decisions on every witness of the S3 and Gr(2,4) runs
    for sig in (DimensionSignature.full(3), DimensionSignature((2,), 4)):
        X = validate_special(default_diag(sig.n), sig)
        for w in smale_relation(X).witnesses.values():
            f = w.point.frame
            noise = rng.normal(size=f.shape) + 1j * rng.normal(size=f.shape)
            z = FlagPoint.from_matrix(f + 1e-12 * noise / np.linalg.norm(noise), sig)
            assert cell_of(z, N_SIDE) == w.omega_cell and cell_of(z, THETA_N_SIDE) == w.alpha_cell
