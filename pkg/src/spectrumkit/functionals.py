"""Moment maps, scaling iterations, and the spectral functionals of tensors.

The quantum side computes maxima of entropy-type objectives over spectra of
quantum marginals along a group orbit; the iteration multiplies each leg by
a fractional inverse power of its marginal and renormalizes.  The support
side minimizes, over sampled unitary basis changes, entropy programs on the
rotated support; the two sides bound each other and agree in the limit, so
each call reports the gap it actually achieved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .optim import (
    JointDistribution,
    MarginalTuple,
    NegWeightedEntropy,
    SHARPNESS_SCHEDULE,
    ThetaWeights,
    min_convex_over_support,
    max_weighted_entropy,
    shannon_entropy,
)
from .tensors import (
    DEFAULT_ETA,
    GroupElement,
    InvalidArgumentError,
    Tensor,
    apply_group,
    flattening,
    marginal,
    random_unitary,
    support,
)

#: eigenvalues below this fraction of the largest are treated as exactly
#: zero when taking inverse powers of marginals
PINV_CUTOFF = 1e-13


@dataclass(frozen=True)
class SearchConfig:
    """Budgets and seeds for every search over basis changes."""

    restarts: int = 20
    nm_budget: int = 2000
    seed: int = 0
    eta: float = DEFAULT_ETA
    scaling_tol: float = 1e-10
    scaling_max_iter: int = 200_000
    inner_tol: float = 1e-8
    jobs: int = 1


@dataclass(frozen=True)
class ScalingTrace:
    """Per-iteration record of a scaling run."""

    iterations: int
    objective_bits: np.ndarray
    group_factors: tuple[np.ndarray, ...]  # accumulated, rescaled to unit spectral norm
    residual: float
    converged: bool
    final_entries: np.ndarray | None = None  # the scaled tensor, unit norm


@dataclass(frozen=True)
class FunctionalCertificate:
    """A functional value together with the point and basis that witness it."""

    value: float
    bits: float
    witness: MarginalTuple
    theta: np.ndarray | None = None
    group_factors: tuple[np.ndarray, ...] | None = None
    converged: bool = True
    gap: float | None = None


# ---------------------------------------------------------------------------
# moment maps


def moment_map(t: Tensor) -> tuple[np.ndarray, ...]:
    """The tuple of trace-one quantum marginals, one per leg."""
    t.require_nonzero()
    return tuple(marginal(t, j) for j in range(t.order))


def torus_moment_map(t: Tensor) -> MarginalTuple:
    """Diagonals of the quantum marginals; a point of the support polytope."""
    rhos = moment_map(t)
    return MarginalTuple(tuple(np.clip(np.real(np.diag(r)), 0.0, None) for r in rhos))


def kempf_ness_value(t: Tensor, x: GroupElement) -> float:
    """log <t, (x_1 x ... x x_d) t> for positive-definite Hermitian factors."""
    t.require_nonzero()
    for k, f in enumerate(x.factors):
        if np.linalg.norm(f - f.conj().T) > 1e-10 * max(1.0, np.linalg.norm(f)):
            raise InvalidArgumentError(f"factor {k} is not Hermitian")
        if np.linalg.eigvalsh(f).min() <= 0:
            raise InvalidArgumentError(f"factor {k} is not positive definite")
    xt = apply_group(x, t)
    ip = np.vdot(t.entries, xt.entries)
    if abs(ip.imag) > 1e-9 * max(1.0, abs(ip.real)) or ip.real <= 0:
        raise InvalidArgumentError("inner product is not a positive real")
    return float(np.log(ip.real))


def _sorted_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition with eigenvalues sorted non-increasing."""
    lam, vec = np.linalg.eigh(h)
    return lam[::-1], vec[:, ::-1]


# raw-array kernels for the scaling inner loops (the dataclass wrapper is
# too heavy to rebuild hundreds of thousands of times)


def _arr_unit(arr: np.ndarray) -> np.ndarray:
    return arr / np.linalg.norm(arr.ravel())


def _arr_apply(arr: np.ndarray, j: int, g: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.tensordot(g, arr, axes=(1, j)), 0, j)


def _arr_marginal(arr: np.ndarray, j: int) -> np.ndarray:
    m = np.moveaxis(arr, j, 0).reshape(arr.shape[j], -1)
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    return rho


def _marginals_eigh(arr: np.ndarray, legs: Sequence[int]):
    lams, vecs = [], []
    for j in legs:
        lam, vec = _sorted_eigh(_arr_marginal(arr, j))
        lams.append(np.clip(lam, 0.0, None))
        vecs.append(vec)
    return lams, vecs


def _rescale_factor(f: np.ndarray) -> np.ndarray:
    return f / np.linalg.norm(f, 2)


# ---------------------------------------------------------------------------
# entropic scaling and the quantum functional


def entropic_scaling(
    t: Tensor,
    theta: ThetaWeights,
    *,
    tol: float = 1e-10,
    max_iter: int = 200_000,
    window: int = 50,
    spectrum_tol: float = 1e-8,
    start: np.ndarray | None = None,
) -> tuple[FunctionalCertificate, ScalingTrace]:
    """Iterate t <- (rho_1^(-theta_1/2) x ... x rho_d^(-theta_d/2)) t.

    Each step renormalizes to unit norm; inverse powers are taken on the
    support of each marginal (eigenvalues below PINV_CUTOFF times the top
    eigenvalue are left at zero).  The objective sum_j theta_j H(spec rho_j)
    is non-decreasing along the iteration; the run stops when it moves less
    than ``tol`` over ``window`` iterations and the spectra move less than
    ``spectrum_tol``, or at ``max_iter`` with ``converged=False``.

    ``start`` may be any tensor in the same group orbit as ``t`` (for
    example the endpoint of a previous run); the computed value does not
    depend on the representative.
    """
    t.require_nonzero()
    if theta.role != "theta":
        raise InvalidArgumentError("entropic scaling expects weights with role 'theta'")
    if theta.d != t.order:
        raise InvalidArgumentError("one theta weight per leg required")
    th = theta.values
    d = t.order
    s = _arr_unit(start if start is not None else t.entries)
    acc = [np.eye(n, dtype=complex) for n in t.dims]
    bits_seq: list[float] = []
    prev_lams: list[np.ndarray] | None = None
    converged = False
    residual = np.inf

    for it in range(max_iter + 1):
        lams, vecs = _marginals_eigh(s, range(d))
        bits = float(sum(th[j] * shannon_entropy(lams[j]) for j in range(d)))
        bits_seq.append(bits)
        spec_move = (
            max(float(np.abs(lams[j] - prev_lams[j]).max()) for j in range(d))
            if prev_lams is not None
            else np.inf
        )
        if len(bits_seq) > window:
            residual = bits_seq[-1] - bits_seq[-1 - window]
            if abs(residual) < tol and spec_move < spectrum_tol:
                converged = True
                break
        if it == max_iter:
            break
        prev_lams = lams
        for j in range(d):
            if th[j] == 0.0:
                continue
            lam, vec = lams[j], vecs[j]
            cut = PINV_CUTOFF * lam[0]
            powed = np.where(lam > cut, np.power(np.maximum(lam, cut), -th[j] / 2.0), 0.0)
            gj = (vec * powed) @ vec.conj().T
            s = _arr_apply(s, j, gj)
            acc[j] = _rescale_factor(gj @ acc[j])
        s = _arr_unit(s)

    lams, _ = _marginals_eigh(s, range(d))
    witness = MarginalTuple(tuple(lam / lam.sum() for lam in lams))
    bits = float(sum(th[j] * shannon_entropy(lams[j]) for j in range(d)))
    cert = FunctionalCertificate(
        value=float(2.0**bits),
        bits=bits,
        witness=witness,
        theta=th.copy(),
        group_factors=tuple(acc),
        converged=converged,
        gap=None,
    )
    trace = ScalingTrace(
        iterations=len(bits_seq) - 1,
        objective_bits=np.array(bits_seq),
        group_factors=tuple(acc),
        residual=float(residual if np.isfinite(residual) else np.inf),
        converged=converged,
        final_entries=s,
    )
    return cert, trace


def quantum_functional(
    t: Tensor,
    theta: ThetaWeights,
    *,
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> FunctionalCertificate:
    """max of 2^(sum_j theta_j H(p_j)) over the marginal-spectra polytope of t."""
    cert, _ = entropic_scaling(t, theta, tol=tol, max_iter=max_iter)
    return cert


# ---------------------------------------------------------------------------
# unitary basis search for the support side


def _eigenbasis_unitary(t: Tensor) -> GroupElement:
    """Per-leg marginal eigenbases; diagonalizes every quantum marginal."""
    factors = []
    for j in range(t.order):
        _, vec = _sorted_eigh(marginal(t, j))
        factors.append(vec.conj().T)
    return GroupElement(tuple(factors), unitary=True)


def unitary_candidates(t: Tensor, cfg: SearchConfig) -> list[GroupElement]:
    """Identity, the marginal eigenbasis, and Haar-random restarts (seeded)."""
    cands = [GroupElement.identity(t.dims), _eigenbasis_unitary(t)]
    for k in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, k)))
        cands.append(
            GroupElement(tuple(random_unitary(n, rng) for n in t.dims), unitary=True)
        )
    return cands


def _pmap(fn, items: list, jobs: int) -> list:
    """Map preserving order; threads when jobs > 1 (results independent of jobs)."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _herm_from_params(x: np.ndarray, n: int) -> np.ndarray:
    re = x[: n * n].reshape(n, n)
    im = x[n * n :].reshape(n, n)
    z = re + 1j * im
    return 0.5 * (z + z.conj().T)


def _unitary_exp(h: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(h)
    return (vec * np.exp(1j * lam)) @ vec.conj().T


def _nm_refine_unitary(
    t: Tensor,
    u0: GroupElement,
    score: Callable[[GroupElement], float],
    budget: int,
) -> tuple[GroupElement, float]:
    """Nelder-Mead over the chart u0 * exp(i H) with 2 n_j^2 reals per leg."""
    from scipy.optimize import minimize

    dims = t.dims
    sizes = [2 * n * n for n in dims]
    splits = np.cumsum(sizes)[:-1]

    def to_unitary(x: np.ndarray) -> GroupElement:
        chunks = np.split(x, splits)
        factors = []
        for u, n, c in zip(u0.factors, dims, chunks):
            factors.append(u @ _unitary_exp(_herm_from_params(c, n)))
        return GroupElement(tuple(factors), unitary=False)  # skip strict re-check

    def objective(x: np.ndarray) -> float:
        return score(to_unitary(x))

    x0 = np.zeros(sum(sizes))
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={"maxfev": budget, "xatol": 1e-4, "fatol": 1e-10},
    )
    best_x = res.x if res.fun <= objective(x0) else x0
    return to_unitary(best_x), float(min(res.fun, objective(x0)))


def support_functional(
    t: Tensor,
    theta: ThetaWeights,
    cfg: SearchConfig | None = None,
    *,
    compute_gap: bool = True,
) -> FunctionalCertificate:
    """min over sampled unitaries u of the entropy maximum on supp(u.t).

    Always an upper bound on the infimum over all bases.  The gap field
    reports (this value) - (quantum functional value); by the equality of
    the two functionals it should be nonnegative and small whenever the
    search found an optimal basis.  ``compute_gap=False`` skips the scaling
    run when the caller compares against its own quantum value.
    """
    cfg = cfg or SearchConfig()
    t.require_nonzero()
    if theta.d != t.order:
        raise InvalidArgumentError("one theta weight per leg required")

    def score(u: GroupElement) -> float:
        s = support(apply_group(u, t), cfg.eta)
        bits, _ = max_weighted_entropy(s, theta, tol=cfg.inner_tol)
        return bits

    cands = unitary_candidates(t, cfg)
    best_bits, best_u = np.inf, None
    for u, b in zip(cands, _pmap(score, cands, cfg.jobs)):
        if b < best_bits - 1e-15:
            best_bits, best_u = b, u
    if cfg.nm_budget > 0:
        u_ref, b_ref = _nm_refine_unitary(t, best_u, score, cfg.nm_budget)
        if b_ref < best_bits - 1e-15:
            best_bits, best_u = b_ref, u_ref

    s = support(apply_group(best_u, t), cfg.eta)
    bits, dist = max_weighted_entropy(s, theta, tol=cfg.inner_tol)
    value = float(2.0**bits)
    converged, gap = True, None
    if compute_gap:
        q = quantum_functional(t, theta, tol=cfg.scaling_tol, max_iter=cfg.scaling_max_iter)
        converged, gap = q.converged, value - q.value
    return FunctionalCertificate(
        value=value,
        bits=float(bits),
        witness=_dist_marginals(dist),
        theta=theta.values.copy(),
        group_factors=tuple(best_u.factors),
        converged=converged,
        gap=gap,
    )


def _dist_marginals(dist: JointDistribution) -> MarginalTuple:
    from .optim import marginals_of

    return marginals_of(dist)


# ---------------------------------------------------------------------------
# generic descent over the moment polytope (convex symmetric objectives)


@dataclass(frozen=True)
class MomentDescentResult:
    value: float
    witness: MarginalTuple
    group_factors: tuple[np.ndarray, ...]
    iterations: int
    converged: bool


def minimize_over_moment_polytope(
    t: Tensor,
    objective,
    *,
    active_legs: Sequence[int] | None = None,
    max_iter: int = 4000,
    tol: float = 1e-9,
    window: int = 60,
) -> MomentDescentResult:
    """Minimize a convex symmetric spectral function over marginal spectra
    reachable along the (active-leg) group orbit of t.

    Subgradient scaling: at each step the objective supplies a gradient per
    sorted spectrum; the step multiplies each active leg by
    exp(-eta/2 * U diag(grad) U^dag) with a backtracking line search on the
    smoothed objective.  Every iterate yields a feasible point, so the best
    exact value seen is reported.
    """
    t.require_nonzero()
    legs = list(range(t.order)) if active_legs is None else list(active_legs)
    s = _arr_unit(t.entries)
    acc = [np.eye(t.dims[j], dtype=complex) for j in legs]

    lams, _ = _marginals_eigh(s, legs)
    best_val = objective.value(lams)
    best_wit = [l.copy() for l in lams]
    best_acc = [a.copy() for a in acc]
    step = 1.0
    total = 0
    history = [best_val]
    schedule = list(getattr(objective, "sharpness_schedule", SHARPNESS_SCHEDULE))
    iters_per = max_iter // len(schedule) + 1

    def leg_exp(h: np.ndarray, eta: float) -> np.ndarray:
        lam_h, vec_h = np.linalg.eigh(h)
        return (vec_h * np.exp(-0.5 * eta * lam_h)) @ vec_h.conj().T

    for sharp in schedule:
        stall = 0
        for _ in range(iters_per):
            total += 1
            lams, vecs = _marginals_eigh(s, legs)
            exact = objective.value(lams)
            if exact < best_val - 1e-15:
                best_val = exact
                best_wit = [l.copy() for l in lams]
                best_acc = [a.copy() for a in acc]
            history.append(exact)
            _, grads = objective.minorant(lams, sharp)
            dirs = [(vec * g) @ vec.conj().T for vec, g in zip(vecs, grads)]
            sval = objective.smooth_value(lams, sharp)

            def candidate(eta: float):
                x = s
                for j, h in zip(legs, dirs):
                    x = _arr_apply(x, j, leg_exp(h, eta))
                x = _arr_unit(x)
                return x, objective.smooth_value(_marginals_eigh(x, legs)[0], sharp)

            eta = step
            x, v = candidate(eta)
            improved = v < sval - 1e-15
            while not improved and eta > 1e-16:
                eta /= 2.0
                x, v = candidate(eta)
                improved = v < sval - 1e-15
            if not improved:
                stall += 1
                if stall >= 2:
                    break
                continue
            while eta < 1e8:
                x2, v2 = candidate(2.0 * eta)
                if v2 < v - 1e-15:
                    eta, x, v = 2.0 * eta, x2, v2
                else:
                    break
            step = eta
            s = x
            for i, (j, h) in enumerate(zip(legs, dirs)):
                acc[i] = _rescale_factor(leg_exp(h, eta) @ acc[i])
            stall = 0

    tail = history[-window:]
    converged = len(history) >= window and (max(tail) - min(tail) < max(tol, 1e-12) * 10)
    return MomentDescentResult(
        value=float(best_val),
        witness=MarginalTuple(tuple(w / w.sum() for w in best_wit)),
        group_factors=tuple(best_acc),
        iterations=total,
        converged=bool(converged or total >= max_iter),
    )


# ---------------------------------------------------------------------------
# the symmetric functional (one group element acting on every leg)


def symmetric_quantum_functional(
    t: Tensor,
    cfg: SearchConfig | None = None,
    *,
    tol: float = 1e-10,
    max_iter: int = 200_000,
    window: int = 50,
) -> FunctionalCertificate:
    """max of 2^(H(p/d)) over spectra p of the summed marginal along the
    single-factor orbit g^(x d) . t; all leg dimensions must agree.

    The scaling update applies (mu/d)^(-1/(2d)) with mu the sum of the
    quantum marginals; unit tensors are fixed points with value equal to
    their diagonal size.
    """
    cfg = cfg or SearchConfig()
    t.require_nonzero()
    d = t.order
    n = t.dims[0]
    if any(m != n for m in t.dims):
        raise InvalidArgumentError(f"symmetric functional needs equal dims, got {t.dims}")
    s = _arr_unit(t.entries)
    acc = np.eye(n, dtype=complex)
    bits_seq: list[float] = []
    prev_lam = None
    converged = False

    def mu_sym(x: np.ndarray) -> np.ndarray:
        total = np.zeros((n, n), dtype=complex)
        for j in range(d):
            m = np.moveaxis(x, j, 0).reshape(n, -1)
            total += m @ m.conj().T
        total /= np.linalg.norm(x.ravel()) ** 2
        return 0.5 * (total + total.conj().T)

    for it in range(max_iter + 1):
        mu = mu_sym(s)
        lam, vec = _sorted_eigh(mu)
        lam = np.clip(lam, 0.0, None)
        p = lam / d
        bits = shannon_entropy(p / p.sum() if abs(p.sum() - 1) > 1e-13 else p)
        bits_seq.append(bits)
        move = np.abs(lam - prev_lam).max() if prev_lam is not None else np.inf
        if len(bits_seq) > window:
            if abs(bits_seq[-1] - bits_seq[-1 - window]) < tol and move < 1e-8:
                converged = True
                break
        if it == max_iter:
            break
        prev_lam = lam
        rho = lam / d
        cut = PINV_CUTOFF * rho[0]
        powed = np.where(rho > cut, np.power(np.maximum(rho, cut), -1.0 / (2.0 * d)), 0.0)
        g = (vec * powed) @ vec.conj().T
        for j in range(d):
            s = _arr_apply(s, j, g)
        s = _arr_unit(s)
        acc = _rescale_factor(g @ acc)

    mu = mu_sym(s)
    lam = np.clip(_sorted_eigh(mu)[0], 0.0, None)
    p = lam / lam.sum()
    bits = shannon_entropy(p)
    return FunctionalCertificate(
        value=float(2.0**bits),
        bits=float(bits),
        witness=MarginalTuple((p,)),
        theta=None,
        group_factors=(acc,),
        converged=converged,
        gap=None,
    )


def symmetric_support_functional(
    t: Tensor,
    cfg: SearchConfig | None = None,
) -> FunctionalCertificate:
    """min over sampled single unitaries u (acting on every leg) of the max
    of 2^(H(q/d)) over the support of u^(x d) . t, where q sums the per-leg
    marginals.  The support-side counterpart of the symmetric functional."""
    from .optim import NegSummedEntropy, min_convex_over_support

    cfg = cfg or SearchConfig()
    t.require_nonzero()
    d = t.order
    n = t.dims[0]
    if any(m != n for m in t.dims):
        raise InvalidArgumentError(f"symmetric functional needs equal dims, got {t.dims}")
    objective = NegSummedEntropy(d)

    def mu_sym_basis() -> np.ndarray:
        total = np.zeros((n, n), dtype=complex)
        for j in range(d):
            m = flattening(t, j)
            total += m @ m.conj().T
        _, vec = _sorted_eigh(0.5 * (total + total.conj().T))
        return vec.conj().T

    singles = [np.eye(n, dtype=complex), mu_sym_basis()]
    for k in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 5000 + k)))
        singles.append(random_unitary(n, rng))

    best = None
    for u in singles:
        g = GroupElement((u,) * d, unitary=False)
        s = support(apply_group(g, t), cfg.eta)
        opt = min_convex_over_support(s, objective, tol=cfg.inner_tol)
        if best is None or opt.value > best[0] + 1e-15:
            best = (opt.value, u, opt)
    val, u, opt = best
    bits = -val
    return FunctionalCertificate(
        value=float(2.0**bits),
        bits=float(bits),
        witness=opt.marginals,
        theta=None,
        group_factors=(u,),
        converged=opt.certified_gap <= max(cfg.inner_tol * 10, 1e-6),
        gap=None,
    )


# ---------------------------------------------------------------------------
# the generic minimax check


@dataclass(frozen=True)
class MinimaxReport:
    lhs: float
    rhs: float
    gap: float
    lhs_certificate: FunctionalCertificate
    rhs_certificate: FunctionalCertificate
    converged: bool


def minimax_gap(
    t: Tensor,
    objective,
    cfg: SearchConfig | None = None,
    *,
    lhs_max_iter: int = 4000,
) -> MinimaxReport:
    """Compare min of a convex symmetric F over marginal spectra along the
    orbit (lhs) with the max over sampled bases of the min of F over the
    rotated support polytope (rhs).

    The two agree in exact arithmetic; ``gap = lhs - rhs`` is reported
    signed.  The lhs is computed by entropic scaling when F is a negated
    weighted entropy and by subgradient scaling descent otherwise.
    """
    cfg = cfg or SearchConfig()
    t.require_nonzero()

    if isinstance(objective, NegWeightedEntropy):
        q, _ = entropic_scaling(
            t,
            ThetaWeights.theta(objective.theta),
            tol=cfg.scaling_tol,
            max_iter=cfg.scaling_max_iter,
        )
        lhs = -q.bits
        lhs_cert = FunctionalCertificate(
            value=lhs,
            bits=-q.bits,
            witness=q.witness,
            theta=np.asarray(objective.theta),
            group_factors=q.group_factors,
            converged=q.converged,
            gap=None,
        )
        lhs_converged = q.converged
    else:
        res = minimize_over_moment_polytope(t, objective, max_iter=lhs_max_iter)
        lhs = res.value
        lhs_cert = FunctionalCertificate(
            value=lhs,
            bits=float("nan"),
            witness=res.witness,
            theta=None,
            group_factors=res.group_factors,
            converged=res.converged,
            gap=None,
        )
        lhs_converged = res.converged

    cands = unitary_candidates(t, cfg)

    def inner_min(u: GroupElement):
        s = support(apply_group(u, t), cfg.eta)
        return min_convex_over_support(s, objective, tol=cfg.inner_tol)

    best = None
    for u, opt in zip(cands, _pmap(inner_min, cands, cfg.jobs)):
        if best is None or opt.value > best[0] + 1e-15:
            best = (opt.value, u, opt)
    rhs, best_u, rhs_opt = best
    rhs_cert = FunctionalCertificate(
        value=float(rhs),
        bits=float("nan"),
        witness=rhs_opt.marginals,
        theta=None,
        group_factors=tuple(best_u.factors),
        converged=rhs_opt.certified_gap <= max(cfg.inner_tol * 10, 1e-6),
        gap=None,
    )
    return MinimaxReport(
        lhs=float(lhs),
        rhs=float(rhs),
        gap=float(lhs - rhs),
        lhs_certificate=lhs_cert,
        rhs_certificate=rhs_cert,
        converged=bool(lhs_converged),
    )
