"""Extrapolation machinery: the Jordan multiplier x -> (f^a x + x f^a)/2 and
its Schur-division inverse, the factorization quantity C_q(x), coefficient
Schur multipliers, density regularization, and the three-step diagnostic.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import (ConstantReport, Density, Element, MatrixTuple, chi,
                   hermitian_eig, power, quasi_norm, random_element, trace)
from .errors import NotInRange
from .systems import (ENUMERATION_LIMIT, OrthonormalSystem,
                      mixed_norm_exact_rademacher, mixed_norm_mc)


@dataclass(frozen=True)
class JordanMap:
    """x -> (f^alpha x + x f^alpha)/2 with cached eigendata of f."""

    f: Density
    alpha: float

    def __post_init__(self):
        ev, vec = hermitian_eig(self.f.element)
        ev = np.clip(ev, 0.0, None)
        pw = np.zeros_like(ev)
        nz = ev > 0
        pw[nz] = ev[nz] ** self.alpha
        object.__setattr__(self, "_eigs", ev)
        object.__setattr__(self, "_basis", vec)
        object.__setattr__(self, "_pow_eigs", pw)
        object.__setattr__(self, "_f_alpha", (vec * pw) @ vec.conj().T)

    @property
    def f_alpha(self) -> Element:
        return Element(self.f.space, self._f_alpha)


@dataclass(frozen=True)
class CqResult:
    value: float
    f_witness: Density
    y_witness: MatrixTuple
    certified: str = "upper_bound"


def jordan_apply(j: JordanMap, x: Element) -> Element:
    fa = j._f_alpha
    return Element(x.space, 0.5 * (fa @ x.entries + x.entries @ fa))


def jordan_invert(j: JordanMap, t: Element, tol=1e-9) -> Element:
    """Solve (f^a y + y f^a)/2 = t by Schur division in the eigenbasis of f.

    Entries over dead corners (f_i^a + f_j^a = 0) must vanish; 0/0 = 0.
    """
    u = j._basis
    pw = j._pow_eigs
    tt = u.conj().T @ t.entries @ u
    denom = 0.5 * (pw[:, None] + pw[None, :])
    dead = denom == 0.0
    scale = max(1.0, float(np.max(np.abs(t.entries))))
    if np.any(np.abs(tt[dead]) > tol * scale):
        raise NotInRange("entry %g in the kernel corner of the Jordan map"
                         % float(np.max(np.abs(tt[dead]))))
    y = np.zeros_like(tt)
    live = ~dead
    y[live] = tt[live] / denom[live]
    return Element(t.space, u @ y @ u.conj().T)


def jordan_operator_matrix(j: JordanMap):
    """Dense n^2 x n^2 matrix of the Jordan map on L_2(tau).

    Built in a tau-orthonormal matrix-unit basis; when tau is tracial
    (uniform weights) the result is Hermitian PSD whenever f is PSD.
    """
    space = j.f.space
    d = space.dim
    w = space.w
    fa = j._f_alpha
    # tau-orthonormal units e_ij / sqrt(w_j): <u_kl, out> = sqrt(w_l) out[k,l]
    mat = np.zeros((d * d, d * d), dtype=complex)
    scales = np.sqrt(w)
    for col, (i, jj) in enumerate((i, jj) for i in range(d) for jj in range(d)):
        e = np.zeros((d, d), dtype=complex)
        e[i, jj] = 1.0 / scales[jj]
        out = 0.5 * (fa @ e + e @ fa)
        mat[:, col] = (out * scales[None, :]).ravel()
    return mat


def _mixed_norm(system, y, q, samples, seed):
    if system.kind == "rademacher" and len(y) <= ENUMERATION_LIMIT:
        return mixed_norm_exact_rademacher(y, q)
    return mixed_norm_mc(system, y, q, samples, seed)


def regularize_density(f: Density, f0: Density, alpha) -> Element:
    """g = (f^(2a) + f0^(2a))^(1/(2a)); faithful with tau(g) <= 2."""
    if not f0.full_support:
        raise ValueError("f0 must have full support")
    s = power(f.element, 2.0 * alpha) + power(f0.element, 2.0 * alpha)
    return power(s, 1.0 / (2.0 * alpha))


def _density_from_param(space, h):
    g = h @ h.conj().T
    tr = float(np.sum(space.w * np.diag(g).real))
    return Density(Element(space, g / tr), full_support=bool(np.linalg.matrix_rank(h) == space.dim))


def cq_upper(x: MatrixTuple, p, q, system: OrthonormalSystem, f_init=None,
             restarts=2, seed=0, samples=400, maxiter=60,
             regularize=True) -> CqResult:
    """Upper bound on C_q(x) = inf ||sum xi_k (x) y_k||_q over factorizations
    x_k = (f^a y_k + y_k f^a)/2 with f a density and a = 1/p - 1/q.

    The density is parameterized as hh*/tau(hh*) and optimized by Powell
    multistart with a fixed Monte-Carlo seed (common random numbers).
    """
    if not (0 < p <= q <= 2):
        raise ValueError("need 0 < p <= q <= 2")
    alpha = 1.0 / p - 1.0 / q
    space = x.space
    d = space.dim

    def evaluate(h):
        f = _density_from_param(space, h)
        jm = JordanMap(f, alpha)
        try:
            ys = tuple(jordan_invert(jm, xk) for xk in x)
        except NotInRange:
            if not regularize:
                raise
            f0 = Density(Element(space, np.eye(d) / float(np.sum(space.w))),
                         full_support=True)
            g = regularize_density(f, f0, alpha)
            gd = Density((1.0 / trace(g).real) * g, full_support=True)
            jm = JordanMap(gd, alpha)
            f = gd
            ys = tuple(jordan_invert(jm, xk) for xk in x)
        yt = MatrixTuple(ys)
        est = _mixed_norm(system, yt, q, samples, seed)
        return est.value, f, yt

    def objective(vec):
        h = vec[: d * d].reshape(d, d) + 1j * vec[d * d:].reshape(d, d)
        if np.max(np.abs(h)) < 1e-12:
            return np.inf
        return evaluate(h)[0]

    rng = np.random.default_rng(seed)
    h_starts = [np.eye(d, dtype=complex)]
    if f_init is not None:
        ev, vec = hermitian_eig(f_init.element)
        h_starts.append((vec * np.sqrt(np.clip(ev, 0, None))) @ vec.conj().T)
    for _ in range(max(restarts, 0)):
        h_starts.append(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))

    best = (np.inf, None, None)
    for h0 in h_starts:
        vec0 = np.concatenate([h0.real.ravel(), h0.imag.ravel()])
        if maxiter > 0 and alpha > 0:
            res = minimize(objective, vec0, method="Powell",
                           options={"maxiter": maxiter, "xtol": 1e-6, "ftol": 1e-8})
            vec0 = res.x
        h = vec0[: d * d].reshape(d, d) + 1j * vec0[d * d:].reshape(d, d)
        if np.max(np.abs(h)) < 1e-12:
            continue
        val, f, yt = evaluate(h)
        if val < best[0]:
            best = (val, f, yt)
    value, f, yt = best
    return CqResult(value=float(value), f_witness=f, y_witness=yt)


def schur_coefficients(lambdas, theta):
    """Coefficients (l_i^t + l_j^t)/(l_i + l_j)^t with the continuous value
    2^(1-t) on zero pairs."""
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambdas must be nonnegative")
    if theta == 0.0:
        return np.full((len(lam), len(lam)), 2.0)
    if theta == 1.0:
        return np.ones((len(lam), len(lam)))
    s = lam[:, None] + lam[None, :]
    num = lam[:, None] ** theta + lam[None, :] ** theta
    c = np.empty_like(s)
    zero = s == 0.0
    c[~zero] = num[~zero] / s[~zero] ** theta
    c[zero] = 2.0 ** (1.0 - theta)
    return c


def schur_multiplier_apply(lambdas, theta, x: Element) -> Element:
    """Entrywise spectral multiplier in the coordinate basis."""
    c = schur_coefficients(lambdas, theta)
    if c.shape[0] != x.space.dim:
        raise ValueError("lambdas length must match the space dimension")
    return Element(x.space, c * x.entries)


def schur_multiplier_norm_estimate(lambdas, theta, q, trials=200, seed=0) -> ConstantReport:
    """Empirical two-sided norm bound: max over probes of the ratio and its
    inverse.  Matrix-unit probes are always included, so the q = 2 value is
    exactly the extreme coefficient."""
    from .core import TraceSpace

    n = len(lambdas)
    space = TraceSpace.standard(n)
    rng = np.random.default_rng(seed)
    best = 0.0
    witness = None
    probes = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            probes.append(e)
    for _ in range(trials):
        probes.append(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    for m in probes:
        x = Element(space, m)
        nx = quasi_norm(x, q)
        if nx < 1e-12:
            continue
        ny = quasi_norm(schur_multiplier_apply(lambdas, theta, x), q)
        for r in (ny / nx, nx / ny if ny > 0 else np.inf):
            if r > best:
                best = r
                witness = m
    return ConstantReport(value=float(best), witness={"matrix": witness},
                          samples=len(probes), seed=seed)


def substitution_pair(s: Element, f: Density, alpha, theta):
    """The T and Z of the substitution trick, in the eigenbasis of f:

      T_ij = 2 (f_i^(a(1-t)) + f_j^(a(1-t))) / (f_i^a + f_j^a) S_ij
      Z_ij = 2 / (f_i^(a t) + f_j^(a t)) S_ij

    so that S = (f^(a t) Z + Z f^(a t))/2 reconstructs S exactly.
    """
    ev, u = hermitian_eig(f.element)
    ev = np.clip(ev, 0.0, None)
    st = u.conj().T @ s.entries @ u

    def psum(beta):
        pw = np.where(ev > 0, ev**beta, 0.0)
        return pw[:, None] + pw[None, :]

    da = psum(alpha)
    dth = psum(alpha * theta)
    d1t = psum(alpha * (1.0 - theta))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(da > 0, 2.0 * d1t / da, 0.0) * st
        z = np.where(dth > 0, 2.0 / dth, 0.0) * st
    back = u
    return (Element(s.space, back @ t @ back.conj().T),
            Element(s.space, back @ z @ back.conj().T))


def steps_diagnostic(x: MatrixTuple, p, q, system: OrthonormalSystem,
                     budgets=None, seed=0):
    """Measure the three extrapolation-step ratios on one instance.

    Returns a dict with the raw quantities (triple norm upper bound, C_p,
    C_2 and C_q upper bounds) and the step ratios, including the weakened
    interpolation exponent 1 - theta' = (1-theta) R / 2.
    """
    if not (0 < p < q < 2):
        raise ValueError("need 0 < p < q < 2")
    budgets = dict(budgets or {})
    restarts = budgets.get("restarts", 2)
    samples = budgets.get("samples", 400)
    maxiter = budgets.get("maxiter", 60)
    tn_restarts = budgets.get("triple_restarts", 3)
    r_expo = budgets.get("R", 0.9 * p)

    from .triple import triple_norm_upper

    norms = [quasi_norm(xk, 2) for xk in x]
    if max(norms) == 0.0:
        zero = {"triple_norm_p": 0.0, "c_p": 0.0, "c_2": 0.0, "c_q": 0.0,
                "step1_ratio": 0.0, "step2_ratio": 0.0, "step3_ratio": 0.0,
                "sup5_ratio": 0.0, "theta": 0.0, "theta_prime": 0.0}
        return zero

    tn = triple_norm_upper(x, p, restarts=tn_restarts, seed=seed)
    cp = _mixed_norm(system, x, p, samples, seed).value
    c2 = cq_upper(x, p, 2.0, system, restarts=restarts, seed=seed,
                  samples=samples, maxiter=maxiter)
    cq = cq_upper(x, p, q, system, restarts=restarts, seed=seed,
                  samples=samples, maxiter=maxiter)

    theta = (1.0 / q - 1.0 / p) / (0.5 - 1.0 / p)
    theta_prime = 1.0 - (1.0 - theta) * r_expo / 2.0

    def ratio(num, den):
        return num / den if den > 0 else np.inf

    report = {
        "triple_norm_p": tn.value,
        "c_p": cp,
        "c_2": c2.value,
        "c_q": cq.value,
        "theta": theta,
        "theta_prime": theta_prime,
        "step1_ratio": ratio(tn.value, cq.value),
        "step2_ratio": ratio(c2.value, tn.value),
        "step3_ratio": ratio(cq.value, cp ** (1 - theta) * c2.value**theta),
        "sup5_ratio": ratio(cq.value, cp ** (1 - theta_prime) * c2.value**theta_prime),
        "chi_q": chi(q),
    }
    return report
