import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F_W, H13_BITS
from oracles import grid_max_weighted_entropy, grid_min_convex
from spectrumkit import (
    InvalidArgumentError,
    JointDistribution,
    SupportSet,
    ThetaWeights,
    make_unit,
    marginals_of,
    max_min_weighted_entropy,
    max_weighted_entropy,
    min_convex_over_support,
    support,
)
from spectrumkit.optim import (
    L1FromUniform,
    MaxInfNorm,
    NegWeightedEntropy,
    shannon_entropy,
)


def rand_support(rng, dims=None, max_points=6) -> SupportSet:
    dims = dims or tuple(int(rng.integers(2, 4)) for _ in range(3))
    m = int(rng.integers(2, max_points + 1))
    pts = set()
    while len(pts) < m:
        pts.add(tuple(int(rng.integers(0, n)) for n in dims))
    return SupportSet(dims, np.array(sorted(pts)))


def test_theta_weights_roles():
    th = ThetaWeights.theta([0.5, 0.25, 0.25])
    assert abs(th.values.sum() - 1) <= 1e-12
    with pytest.raises(InvalidArgumentError):
        ThetaWeights.theta([0.5, 0.6])
    with pytest.raises(InvalidArgumentError):
        ThetaWeights.xi([0.5, 0.5])
    with pytest.raises(InvalidArgumentError):
        ThetaWeights.alpha([1.0, 0.0])


def test_marginals_of_examples(w):
    s = support(w, 0.0)
    p = marginals_of(JointDistribution.uniform(s))
    for q in p.probs:
        assert np.allclose(q, [2 / 3, 1 / 3])
    # point mass
    weights = np.zeros(3)
    # support points are sorted: (0,0,1), (0,1,0), (1,0,0); put mass on (1,0,0)
    weights[2] = 1.0
    p = marginals_of(JointDistribution(s, weights))
    assert np.allclose(p.probs[0], [0, 1])
    assert np.allclose(p.probs[1], [1, 0])
    s2 = support(make_unit(2, 3), 0.0)
    p = marginals_of(JointDistribution.uniform(s2))
    for q in p.probs:
        assert np.allclose(q, [0.5, 0.5])


def test_max_weighted_entropy_unit_tensors():
    for r in (1, 2, 3, 4):
        s = support(make_unit(r, 3), 0.0)
        bits, dist = max_weighted_entropy(s, ThetaWeights.uniform(3))
        assert abs(2.0**bits - r) <= 1e-8 * r
        assert abs(dist.weights.sum() - 1) <= 1e-12


def test_max_weighted_entropy_w_equals_grid_oracle(w):
    s = support(w, 0.0)
    bits, _ = max_weighted_entropy(s, ThetaWeights.uniform(3))
    assert abs(bits - H13_BITS) <= 1e-9
    assert abs(2.0**bits - F_W) <= 1e-8
    oracle = grid_max_weighted_entropy(s.points, s.dims, [1 / 3] * 3, steps=1000)
    assert bits >= oracle - 1e-12
    assert bits - oracle <= 5e-6  # grid resolution


def test_max_weighted_entropy_matmul_uniform(matmul222):
    s = support(matmul222, 0.0)
    for theta in ([1 / 3] * 3, [0.5, 0.3, 0.2], [0.1, 0.1, 0.8]):
        bits, _ = max_weighted_entropy(s, ThetaWeights.theta(theta))
        assert abs(bits - 2.0) <= 1e-8


def test_max_weighted_entropy_empty_support_rejected():
    with pytest.raises(InvalidArgumentError):
        SupportSet((2, 2), np.zeros((0, 2), dtype=int))


def test_max_min_weighted_entropy_examples(w):
    s = support(w, 0.0)
    v = max_min_weighted_entropy(s, ThetaWeights.xi([1, 1, 1]))
    assert abs(v - H13_BITS) <= 1e-7
    for r in (1, 2, 3):
        su = support(make_unit(r, 3), 0.0)
        assert abs(max_min_weighted_entropy(su, ThetaWeights.xi([1, 1, 1])) - np.log2(r)) <= 1e-7
    # single support point: all marginals deterministic
    sp = SupportSet((2, 2, 2), np.array([[1, 0, 1]]))
    assert abs(max_min_weighted_entropy(sp, ThetaWeights.xi([1, 0.5, 1]))) <= 1e-12


def test_max_min_zero_xi_drops_leg(w):
    s = support(w, 0.0)
    v = max_min_weighted_entropy(s, ThetaWeights.xi([1, 0, 0]))
    assert abs(v - 1.0) <= 1e-7  # p_1 = (1/2, 1/2) achievable once legs 2, 3 are ignored


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_max_min_matches_theta_formula(seed):
    # second description: min over theta of (max weighted entropy) / <theta, xi>
    rng = np.random.default_rng(seed)
    s = rand_support(rng)
    xi = ThetaWeights.xi([1.0, 1.0, 1.0])
    v = max_min_weighted_entropy(s, xi)
    best = np.inf
    for th in np.ndindex(7, 7, 7):  # includes boundary weights, where minima often sit
        th = np.array(th, dtype=float)
        if th.sum() == 0:
            continue
        th /= th.sum()
        bits, _ = max_weighted_entropy(s, ThetaWeights.theta(th), tol=1e-9)
        best = min(best, bits / float(th @ xi.values))
    assert v <= best + 1e-6
    assert v >= best - 2e-3  # grid resolution on the theta simplex


def test_min_convex_is_negated_entropy_program(w):
    s = support(w, 0.0)
    theta = ThetaWeights.uniform(3)
    opt = min_convex_over_support(s, NegWeightedEntropy(theta))
    bits, _ = max_weighted_entropy(s, theta)
    assert abs(opt.value + bits) <= 1e-9


def test_min_convex_inf_norm_on_w(w):
    s = support(w, 0.0)
    opt = min_convex_over_support(s, MaxInfNorm(ThetaWeights.alpha([1, 1, 1])))
    assert abs(opt.value - 2 / 3) <= 1e-7
    oracle = grid_min_convex(
        s.points, s.dims, lambda p: max(q.max() for q in p), steps=400
    )
    assert opt.value <= oracle + 1e-9


def test_min_convex_l1_perfect_matching():
    s = support(make_unit(2, 2), 0.0)  # bipartite perfect matching support
    opt = min_convex_over_support(s, L1FromUniform())
    assert abs(opt.value) <= 1e-7


def test_certified_gap_is_sound(w):
    s = support(w, 0.0)
    for objective in (
        NegWeightedEntropy(ThetaWeights.uniform(3)),
        MaxInfNorm(ThetaWeights.alpha([2, 1, 1])),
        L1FromUniform(),
    ):
        opt = min_convex_over_support(s, objective)
        oracle = grid_min_convex(s.points, s.dims, objective.value, steps=300)
        # value minus certified gap is a lower bound on the true optimum
        assert opt.value - opt.certified_gap <= oracle + 1e-6


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 0.95))
def test_entropy_objective_concavity(seed, lam):
    rng = np.random.default_rng(seed)
    s = rand_support(rng)
    theta = rng.dirichlet([1.0] * 3)

    def value(wts):
        p = marginals_of(JointDistribution(s, wts))
        return sum(th * shannon_entropy(q) for th, q in zip(theta, p.probs))

    w1 = rng.dirichlet(np.ones(s.size))
    w2 = rng.dirichlet(np.ones(s.size))
    mid = lam * w1 + (1 - lam) * w2
    assert value(mid) >= lam * value(w1) + (1 - lam) * value(w2) - 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_value_convex_in_theta(seed):
    rng = np.random.default_rng(seed)
    s = rand_support(rng)
    t1 = rng.dirichlet([1.0] * 3)
    t2 = rng.dirichlet([1.0] * 3)
    lam = float(rng.uniform(0.1, 0.9))
    v1, _ = max_weighted_entropy(s, ThetaWeights.theta(t1))
    v2, _ = max_weighted_entropy(s, ThetaWeights.theta(t2))
    vm, _ = max_weighted_entropy(s, ThetaWeights.theta(lam * t1 + (1 - lam) * t2))
    assert vm <= lam * v1 + (1 - lam) * v2 + 1e-8


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_entropy_bound(seed):
    rng = np.random.default_rng(seed)
    s = rand_support(rng)
    theta = rng.dirichlet([1.0] * 3)
    bits, _ = max_weighted_entropy(s, ThetaWeights.theta(theta))
    assert -1e-12 <= bits <= sum(t * np.log2(n) for t, n in zip(theta, s.dims)) + 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.0, 1.0))
def test_marginals_of_is_affine(seed, lam):
    rng = np.random.default_rng(seed)
    s = rand_support(rng)
    w1 = rng.dirichlet(np.ones(s.size))
    w2 = rng.dirichlet(np.ones(s.size))
    pm = marginals_of(JointDistribution(s, lam * w1 + (1 - lam) * w2))
    p1 = marginals_of(JointDistribution(s, w1))
    p2 = marginals_of(JointDistribution(s, w2))
    for a, b, c in zip(pm.probs, p1.probs, p2.probs):
        assert np.allclose(a, lam * b + (1 - lam) * c, atol=1e-14)
