"""Hoelder-type inequality engine: strip Poisson kernels and harmonic measure,
three-lines checks for analytic families, the uniform-convexity probe, the
commutator Hoelder ratio and its random scans, and the algebraic identities
behind the interpolation argument (2x2 self-adjoint reduction, the boundary
H(t) identity).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (ConstantReport, Density, Element, MatrixTuple, TraceSpace,
                   complex_power, hermitian_eig, power, quasi_norm,
                   random_density, random_element)
from .errors import (DegenerateInstance, NonCommuting, QuadratureNotConverged)

COMMUTATION_TOL = 1e-8


@dataclass(frozen=True)
class ExponentProfile:
    """Exponent bundle (p, q, s, theta, alpha, R, gamma, omega).

    Relations: 1/q = (1-theta)/p + theta/s, alpha = 1/p - 1/s, 0 < R < p,
    gamma > 1 and 1 - omega = (1-theta)/gamma.
    """

    p: float
    q: float
    s: float
    theta: float
    alpha: float
    R: float
    gamma: float
    omega: float

    def __post_init__(self):
        inv_s = 0.0 if math.isinf(self.s) else 1.0 / self.s
        if not (0 < self.p < self.q < self.s or (math.isinf(self.s) and 0 < self.p < self.q)):
            raise ValueError("need 0 < p < q < s <= inf")
        if not (0 < self.theta < 1):
            raise ValueError("theta must lie in (0, 1)")
        if abs(1.0 / self.q - ((1 - self.theta) / self.p + self.theta * inv_s)) > 1e-12:
            raise ValueError("1/q must equal (1-theta)/p + theta/s")
        if abs(self.alpha - (1.0 / self.p - inv_s)) > 1e-12:
            raise ValueError("alpha must equal 1/p - 1/s")
        if not (0 < self.R < self.p):
            raise ValueError("need 0 < R < p")
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if abs((1.0 - self.omega) - (1.0 - self.theta) / self.gamma) > 1e-12:
            raise ValueError("1 - omega must equal (1-theta)/gamma")


def make_profile(p, s, theta, R=None, gamma=1.25) -> ExponentProfile:
    """Fill in the dependent exponents from (p, s, theta)."""
    inv_s = 0.0 if math.isinf(s) else 1.0 / s
    q = 1.0 / ((1 - theta) / p + theta * inv_s)
    alpha = 1.0 / p - inv_s
    if R is None:
        R = 0.9 * p
    omega = 1.0 - (1.0 - theta) / gamma
    return ExponentProfile(p=p, q=q, s=s, theta=theta, alpha=alpha, R=R,
                           gamma=gamma, omega=omega)


# ---------------------------------------------------------------------------
# strip kernels and quadrature


def poisson_kernel(k, omega, t):
    """Q^k_omega(t) = sin(pi w) / (2 (cosh(pi t) - (-1)^k cos(pi w)))."""
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    if not (0 < omega < 1):
        raise ValueError("omega must lie in (0, 1)")
    sign = 1.0 if k == 0 else -1.0
    return np.sin(np.pi * omega) / (2.0 * (np.cosh(np.pi * t) - sign * np.cos(np.pi * omega)))


def _truncation(omega, tol):
    """Half-line T with int_T^inf Q^k_omega dt certifiably below tol."""
    # cosh(pi t) - cos >= e^{pi t}/4 for t >= 1, so the tail is below
    # sin(pi w) * 2 e^{-pi T} / pi.
    s = np.sin(np.pi * omega)
    T = max(2.0, np.log(2.0 * s / (np.pi * tol)) / np.pi + 1.0)
    bound = s * 2.0 * np.exp(-np.pi * T) / np.pi
    return T, bound


def kernel_quadrature(k, omega, tol=1e-10, panel=0.5, order=24):
    """Nodes t_i and weights c_i with sum c_i g(t_i) ~ int g dQ^k_omega.

    The raw kernel integrates to 1 - omega (k = 0) or omega (k = 1); the
    weights are divided by that mass so each Q^k is a probability measure.
    Returns (nodes, weights, tail_bound); Gauss-Legendre panels on [-T, T].
    """
    mass = (1.0 - omega) if k == 0 else omega
    T, tail = _truncation(omega, tol * mass)
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    edges = np.arange(-T, T + panel / 2, panel)
    nodes = []
    weights = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid + half * gl_x
        nodes.append(t)
        weights.append(half * gl_w * poisson_kernel(k, omega, t) / mass)
    return np.concatenate(nodes), np.concatenate(weights), 2.0 * tail / mass


def harmonic_reproduce(h, theta, tol=1e-10):
    """Integrate an analytic test function against the harmonic measure of
    theta on the strip boundary; equals h(theta).

    With the probability-normalized kernels the harmonic measure splits as
    (1 - theta) Q^0_theta + theta Q^1_theta over the two boundary lines.
    """
    t0, w0, _ = kernel_quadrature(0, theta, tol)
    t1, w1, _ = kernel_quadrature(1, theta, tol)
    v0 = np.sum(w0 * np.asarray([h(1j * t) for t in t0]))
    v1 = np.sum(w1 * np.asarray([h(1.0 + 1j * t) for t in t1]))
    return (1.0 - theta) * v0 + theta * v1


# ---------------------------------------------------------------------------
# analytic families on the strip


@dataclass(frozen=True)
class AnalyticFamily:
    """G(z) = sum_j A_j f^(b_j + c_j z) B_j + sum_k C_k z^k.

    f must be Hermitian PSD; exponents with nonnegative real part on the
    closed strip keep the family bounded (0^w = 0 convention on the kernel).
    """

    f: Element
    terms: tuple = ()    # (A: Element, beta0: float, beta1: float, B: Element)
    poly: tuple = ()     # Element coefficients of z^k

    def __post_init__(self):
        # cache the eigendata of f; value() is called at every quadrature node
        ev, vec = hermitian_eig(self.f)
        if ev.min() < 0:
            raise ValueError("f must be positive semidefinite")
        object.__setattr__(self, "_ev", ev)
        object.__setattr__(self, "_vec", vec)

    def _f_power(self, w):
        ev = self._ev
        out = np.zeros(len(ev), dtype=complex)
        nz = ev > 0
        out[nz] = np.exp(w * np.log(ev[nz]))
        return (self._vec * out) @ self._vec.conj().T

    def value(self, z) -> Element:
        space = self.f.space
        acc = np.zeros((space.dim, space.dim), dtype=complex)
        for a, b0, b1, b in self.terms:
            acc += a.entries @ self._f_power(b0 + b1 * z) @ b.entries
        for k, c in enumerate(self.poly):
            acc += c.entries * (z**k)
        return Element(space, acc)


def three_lines_check(G: AnalyticFamily, p0, p1, theta, tol=1e-10):
    """Boundary-quadrature check of the interpolation bound

      ||G(theta)||_{p_theta} <= (int g(it)^p0 Q^0)^((1-theta)/p0)
                                (int g(1+it)^p1 Q^1)^(theta/p1)

    with the p1 = inf factor read as (sup_t ||G(1+it)||_inf)^theta.
    Returns a dict {lhs, rhs, holds}.
    """
    if not (0 < p0 < p1):
        raise ValueError("need 0 < p0 < p1")
    inv_p1 = 0.0 if math.isinf(p1) else 1.0 / p1
    p_theta = 1.0 / ((1.0 - theta) / p0 + theta * inv_p1)

    t0, w0, tail0 = kernel_quadrature(0, theta, tol)
    g0 = np.array([quasi_norm(G.value(1j * t), p0) for t in t0])
    i0 = float(np.sum(w0 * g0**p0))
    # certify the truncation against the largest boundary norm seen
    if tail0 * (2.0 * max(g0.max(), 1e-30)) ** p0 > 100 * tol * max(i0, 1e-30):
        raise QuadratureNotConverged("tail bound too large on the left line")

    t1, w1, tail1 = kernel_quadrature(1, theta, tol)
    g1 = np.array([quasi_norm(G.value(1.0 + 1j * t), p1) for t in t1])
    if math.isinf(p1):
        factor1 = g1.max() ** theta
    else:
        i1 = float(np.sum(w1 * g1**p1))
        if tail1 * (2.0 * max(g1.max(), 1e-30)) ** p1 > 100 * tol * max(i1, 1e-30):
            raise QuadratureNotConverged("tail bound too large on the right line")
        factor1 = i1 ** (theta / p1)

    lhs = quasi_norm(G.value(theta), p_theta)
    rhs = i0 ** ((1.0 - theta) / p0) * factor1
    holds = lhs <= rhs * (1.0 + 1e-6) + 1e-12
    return {"lhs": lhs, "rhs": rhs, "holds": bool(holds)}


# ---------------------------------------------------------------------------
# uniform convexity probe


@dataclass(frozen=True)
class MatrixPolynomial:
    """F(z) = sum_k c_k z^k with Element coefficients."""

    coeffs: tuple

    @property
    def space(self):
        return self.coeffs[0].space

    def value(self, z) -> Element:
        acc = np.zeros_like(self.coeffs[0].entries)
        for k, c in enumerate(self.coeffs):
            acc = acc + c.entries * (z**k)
        return Element(self.space, acc)


def _disc_hp_power_mean(F, p, zeta, nodes):
    """int ||F||_p^p against the Poisson measure of zeta on the circle."""
    t = 2.0 * np.pi * np.arange(nodes) / nodes
    pts = np.exp(1j * t)
    if zeta == 0:
        dens = np.ones(nodes)
    else:
        dens = (1.0 - abs(zeta) ** 2) / np.abs(pts - zeta) ** 2
    vals = np.array([quasi_norm(F.value(z), p) for z in pts])
    return float(np.mean(dens * vals**p))


def _strip_hp_power_mean(F, p, theta, tol):
    t0, w0, _ = kernel_quadrature(0, theta, tol)
    t1, w1, _ = kernel_quadrature(1, theta, tol)
    v0 = np.sum(w0 * np.array([quasi_norm(F.value(1j * t), p) for t in t0]) ** p)
    v1 = np.sum(w1 * np.array([quasi_norm(F.value(1.0 + 1j * t), p) for t in t1]) ** p)
    return float((1.0 - theta) * v0 + theta * v1)


def uniform_convexity_probe(F: MatrixPolynomial, p, point=("disc", 0.0),
                            nodes=512, tol=1e-10):
    """Instance lower-bound witness for the convexity constant delta_p:

      (||F||_{Hp}^2 - ||F(z0)||_p^2) / ||F - F(z0)||_{Hp}^2.

    Raises DegenerateInstance for constant F.
    """
    if not (0 < p <= 2):
        raise ValueError("need 0 < p <= 2")
    kind, z0 = point
    center = F.value(z0 if kind == "disc" else complex(z0))
    shifted = MatrixPolynomial(tuple(
        (c - center) if k == 0 else c for k, c in enumerate(F.coeffs)))
    if kind == "disc":
        full = _disc_hp_power_mean(F, p, z0, nodes) ** (2.0 / p)
        diff = _disc_hp_power_mean(shifted, p, z0, nodes) ** (2.0 / p)
    elif kind == "strip":
        full = _strip_hp_power_mean(F, p, z0, tol) ** (2.0 / p)
        diff = _strip_hp_power_mean(shifted, p, z0, tol) ** (2.0 / p)
    else:
        raise ValueError("point kind must be 'disc' or 'strip'")
    denom = diff
    if denom <= 1e-12:
        raise DegenerateInstance("constant polynomial")
    num = full - quasi_norm(center, p) ** 2
    return {"delta_witness": num / denom, "hp_sq": full, "center_sq": quasi_norm(center, p) ** 2,
            "diff_sq": diff}


# ---------------------------------------------------------------------------
# commutator Hoelder ratio


def _check_commutes(u: Element, f: Element):
    comm = u.entries @ f.entries - f.entries @ u.entries
    if np.max(np.abs(comm)) > COMMUTATION_TOL * max(1.0, np.max(np.abs(f.entries))):
        raise NonCommuting("unitary does not commute with f")


def commutator_norm(x: Element, f: Density, V: Element, W: Element, beta, q, sign=1):
    """||x W f^beta + sign V f^beta x||_q for unitaries commuting with f."""
    _check_commutes(V, f.element)
    _check_commutes(W, f.element)
    fb = power(f.element, beta)
    m = x.entries @ W.entries @ fb.entries + sign * (V.entries @ fb.entries @ x.entries)
    return quasi_norm(Element(x.space, m), q)


def holder_ratio(profile: ExponentProfile, x: Element, f: Density,
                 V: Element, W: Element, sign=1):
    """Empirical constant of the Hoelder-type bound: LHS over
    ||xWf^a + Vf^a x||_p^((R/2)(1-theta)) ||x||_s^(1-(R/2)(1-theta))."""
    e = 0.5 * profile.R * (1.0 - profile.theta)
    lhs = commutator_norm(x, f, V, W, profile.alpha * (1.0 - profile.theta),
                          profile.q, sign)
    den_p = commutator_norm(x, f, V, W, profile.alpha, profile.p, sign)
    den_s = quasi_norm(x, profile.s)
    if den_p < 1e-12 and den_s < 1e-12:
        if lhs > 1e-8:
            raise AssertionError("degenerate RHS but nonzero LHS")
        raise DegenerateInstance("both right-hand factors vanish")
    den = den_p**e * den_s ** (1.0 - e)
    return lhs / den if den > 0 else np.inf


def random_commuting_unitary(f: Density, rng) -> Element:
    """u = exp(i diag(h)) in the eigenbasis of f; commutes by construction."""
    ev, vec = hermitian_eig(f.element)
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=len(ev)))
    return Element(f.space, (vec * phases) @ vec.conj().T)


def scan_constant(profiles, dims, instances, seed=0):
    """Max empirical Hoelder constant per profile cell over random instances.

    Returns one dict per profile with per-dimension maxima, the overall
    witness, and a red-flag boolean when the constant grows more than 2x
    from the smallest to the largest dimension.
    """
    reports = []
    for ci, prof in enumerate(profiles):
        per_dim = {}
        best = 0.0
        witness = None
        for di, dim in enumerate(dims):
            rng = np.random.default_rng(np.random.SeedSequence([seed, ci, di]))
            space = TraceSpace.standard(dim)
            dim_max = 0.0
            for _ in range(instances):
                f = random_density(space, rng)
                x = random_element(space, rng)
                nx = quasi_norm(x, prof.s)
                if nx > 0:
                    x = (1.0 / nx) * x
                V = random_commuting_unitary(f, rng)
                W = random_commuting_unitary(f, rng)
                sign = int(rng.choice([-1, 1]))
                try:
                    r = holder_ratio(prof, x, f, V, W, sign)
                except DegenerateInstance:
                    continue
                if r > dim_max:
                    dim_max = r
                if r > best:
                    best = r
                    witness = {"dim": dim, "x": x.entries, "f": f.element.entries,
                               "V": V.entries, "W": W.entries, "sign": sign}
            per_dim[dim] = dim_max
        vals = [v for v in per_dim.values() if v > 0]
        flag = bool(vals and max(vals) > 2.0 * vals[0])
        reports.append({
            "profile": prof,
            "per_dim_max": per_dim,
            "report": ConstantReport(value=best, witness=witness or {},
                                     samples=instances * len(dims), seed=seed),
            "dimension_growth_flag": flag,
        })
    return reports


# ---------------------------------------------------------------------------
# algebraic identities behind the interpolation argument


def selfadjoint_reduction(x: Element, f: Density, V: Element, W: Element):
    """The 2x2 block reduction to self-adjoint x on the doubled space.

    Returns (x_tilde, f_tilde (Density), V_tilde, W_tilde).
    """
    space = x.space
    d = space.dim
    doubled = TraceSpace(2 * d, tuple(space.weights) + tuple(space.weights))

    def blockdiag(a, b):
        m = np.zeros((2 * d, 2 * d), dtype=complex)
        m[:d, :d] = a
        m[d:, d:] = b
        return Element(doubled, m)

    xt = np.zeros((2 * d, 2 * d), dtype=complex)
    xt[:d, d:] = x.entries
    xt[d:, :d] = x.entries.conj().T
    x_t = Element(doubled, xt)
    f_t = Density(blockdiag(0.5 * f.element.entries, 0.5 * f.element.entries),
                  full_support=f.full_support)
    v_t = blockdiag(V.entries, W.entries.conj().T)
    w_t = blockdiag(V.entries.conj().T, W.entries)
    return x_t, f_t, v_t, w_t


def reduction_scaling_check(x, f, V, W, alpha, theta, p, q):
    """Verify the exact doubling factors 2^(1/q - a(1-theta)) and 2^(1/p - a).

    Returns a dict of the two residuals (relative).
    """
    x_t, f_t, v_t, w_t = selfadjoint_reduction(x, f, V, W)

    def both(beta, r):
        single = commutator_norm(x, f, V, W, beta, r)
        doubled = commutator_norm(x_t, f_t, v_t, w_t, beta, r)
        factor = 2.0 ** (1.0 / r - beta)
        return abs(doubled - factor * single) / max(1.0, factor * single)

    return {
        "q_residual": both(alpha * (1.0 - theta), q),
        "p_residual": both(alpha, p),
    }


def h_t_identity_check(x: Element, f: Density, gamma, alpha, t):
    """Residual of the boundary identity (with V = W = 1):

      G(it) = H(-t) + (f^a x + x f^a) f^(a(gamma-1)) u_(-t)

    where u_t = f^(i gamma a t) and H(t) = u_t f^(gamma a) x
    - f^a x f^(a(gamma-1)) u_t.
    """
    fe = f.element
    u_mt = complex_power(fe, -1j * gamma * alpha * t).entries
    f_ga = power(fe, gamma * alpha).entries
    f_a = power(fe, alpha).entries
    f_ag1 = power(fe, alpha * (gamma - 1.0)).entries
    xm = x.entries
    g_it = complex_power(fe, gamma * alpha * (1.0 - 1j * t)).entries @ xm \
        + xm @ complex_power(fe, gamma * alpha * (1.0 - 1j * t)).entries
    h_mt = u_mt @ f_ga @ xm - f_a @ xm @ f_ag1 @ u_mt
    rhs = h_mt + (f_a @ xm + xm @ f_a) @ f_ag1 @ u_mt
    scale = max(1.0, float(np.max(np.abs(g_it))))
    return float(np.max(np.abs(g_it - rhs))) / scale
