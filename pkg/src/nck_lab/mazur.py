"""Mazur maps M_{p,q}(x) = u |x|^{p/q} between L_p and L_q spheres, with
empirical Hoelder-exponent estimation and the related commutator checks.
"""

from dataclasses import dataclass

import numpy as np

from .core import (Density, Element, polar, power, quasi_norm, random_element)
from .errors import DegenerateInstance


@dataclass(frozen=True)
class HolderEstimate:
    exponent: float
    constant: float
    pair_count: int
    regression_r2: float
    seed: int

    def __post_init__(self):
        if self.pair_count < 2:
            raise ValueError("need at least two pairs")


def mazur_map(x: Element, p, q) -> Element:
    """M_{p,q}(x) = u |x|^{p/q} via the polar decomposition x = u|x|.

    Maps the L_p sphere onto the L_q sphere: ||M(x)||_q = ||x||_p^{p/q}.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    if p == q:
        return x
    # single SVD keeps the singular values of the image exactly s^{p/q}
    a, s, bh = np.linalg.svd(x.entries)
    return Element(x.space, (a * s ** (p / q)) @ bh)


def _unit_sphere_sample(space, rng, p):
    g = random_element(space, rng)
    n = quasi_norm(g, p)
    return (1.0 / n) * g


def holder_exponent_estimate(p, q, dim, pairs=64, closeness_scale=1.0, seed=0):
    """Regress log ||Mg - Mh||_q on log ||g - h||_p over unit-sphere pairs.

    Pairs are sampled at log-spaced separations; only the closer half of the
    separation grid enters the regression (the Hoelder exponent is a local
    statement on the sphere).
    """
    if pairs < 16:
        raise ValueError("need at least 16 pairs")
    from .core import TraceSpace

    rng = np.random.default_rng(seed)
    space = TraceSpace.standard(dim)
    deltas = closeness_scale * np.logspace(-6, 0, pairs)
    xs, ys = [], []
    for delta in deltas:
        g = _unit_sphere_sample(space, rng, p)
        direction = random_element(space, rng)
        h = Element(space, g.entries + delta * direction.entries)
        h = (1.0 / quasi_norm(h, p)) * h
        dist = quasi_norm(g - h, p)
        if dist < 1e-14:
            continue
        img = quasi_norm(mazur_map(g, p, q) - mazur_map(h, p, q), q)
        if img < 1e-300:
            continue
        xs.append(np.log(dist))
        ys.append(np.log(img))
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    # local regime: closer half of the distance range
    cut = np.median(xs)
    mask = xs <= cut
    xr, yr = xs[mask], ys[mask]
    slope, intercept = np.polyfit(xr, yr, 1)
    resid = yr - (slope * xr + intercept)
    ss_tot = np.sum((yr - yr.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid**2) / ss_tot) if ss_tot > 0 else 1.0
    return HolderEstimate(exponent=float(slope), constant=float(np.exp(intercept)),
                          pair_count=int(mask.sum()), regression_r2=r2, seed=seed)


def acc_check(x: Element, f: Density, p, q, gamma, sign=1):
    """Ratio ||x f^{p/q} +- f^{p/q} x||_q / ||x f +- f x||_p^gamma.

    Preconditions: x self-adjoint with ||x||_inf = 1 and ||f||_p = 1.
    """
    fe = f.element
    nf = quasi_norm(fe, p)
    fe = (1.0 / nf) * fe
    fpq = power(fe, p / q)
    num = quasi_norm(Element(x.space, x.entries @ fpq.entries
                             + sign * fpq.entries @ x.entries), q)
    den = quasi_norm(Element(x.space, x.entries @ fe.entries
                             + sign * fe.entries @ x.entries), p)
    if den < 1e-12:
        if num > 1e-8:
            raise AssertionError("vanishing denominator with nonzero numerator")
        raise DegenerateInstance("commuting instance")
    return num / den**gamma


def squares_lipschitz_check(g: Element, h: Element, p):
    """|| |g|^2 - |h|^2 ||_{p/2} <= 2^{2/p} ||g - h||_p for unit g, h."""
    gg = Element(g.space, g.entries.conj().T @ g.entries)
    hh = Element(h.space, h.entries.conj().T @ h.entries)
    lhs = quasi_norm(gg - hh, p / 2.0)
    rhs = 2.0 ** (2.0 / p) * quasi_norm(g - h, p)
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs <= rhs + 1e-9)}


def kosaki_remark_check(x: Element, f: Density, p):
    """||x f^p - f^p x||_1 <= 2 ||x f - f x||_p^p for 0 < p < 1, ||x|| <= 1."""
    if not (0 < p < 1):
        raise ValueError("p must lie in (0, 1)")
    fe = f.element
    fp = power(fe, p)
    lhs = quasi_norm(Element(x.space, x.entries @ fp.entries - fp.entries @ x.entries), 1)
    rhs = 2.0 * quasi_norm(Element(x.space, x.entries @ fe.entries
                                   - fe.entries @ x.entries), p) ** p
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs <= rhs + 1e-9)}
