"""Maurey-type factorization for maps H -> L_p(tau), 0 < p < 1.

The quantity D_{f^a}(T) = ||J(f^a)^{-1} T||_2 is evaluated exactly; the
worst case over the unit sphere of H is the top singular value of an
assembled finite linear map, and the factorization itself is a convex
min-max over probability measures on a finite pool of full-support
densities, solved by exponentiated-gradient updates on the simplex with
exact top-eigenvalue certificates at every iterate.
"""

from dataclasses import dataclass

import numpy as np

from .core import Density, Element, MatrixTuple, power, quasi_norm, trace
from .errors import NotInRange
from .extrapolation import JordanMap, jordan_invert, regularize_density


@dataclass(frozen=True)
class LinearMapIntoLp:
    """u: C^m -> L_p(tau) given by the images of the standard basis."""

    domain_dim: int
    images: MatrixTuple
    p: float

    def __post_init__(self):
        if len(self.images) != self.domain_dim:
            raise ValueError("need one image per basis vector")
        if not (0 < self.p < 1):
            raise ValueError("p must lie in (0, 1)")

    @property
    def space(self):
        return self.images.space

    @property
    def alpha(self):
        return 1.0 / self.p - 0.5

    def apply(self, x) -> Element:
        x = np.asarray(x, dtype=complex)
        acc = np.zeros_like(self.images[0].entries)
        for c, img in zip(x, self.images):
            acc = acc + c * img.entries
        return Element(self.space, acc)


def operator_norm_estimate(u: LinearMapIntoLp, samples=200, seed=0):
    """Empirical quasi-norm sup_{|x|=1} ||u(x)||_p over sphere samples."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        x = rng.normal(size=u.domain_dim) + 1j * rng.normal(size=u.domain_dim)
        x /= np.linalg.norm(x)
        val = quasi_norm(u.apply(x), u.p)
        best = max(best, val)
    return best


def normalize_map(u: LinearMapIntoLp, samples=200, seed=0) -> LinearMapIntoLp:
    """Rescale so the sampled operator quasi-norm is at most 1."""
    nrm = operator_norm_estimate(u, samples, seed)
    if nrm == 0.0:
        return u
    scaled = MatrixTuple(tuple((1.0 / nrm) * img for img in u.images))
    return LinearMapIntoLp(u.domain_dim, scaled, u.p)


@dataclass(frozen=True)
class DensityMeasure:
    """Finitely supported probability measure on full-support densities."""

    atoms: tuple  # of (Density, weight)

    def __post_init__(self):
        ws = [w for _, w in self.atoms]
        if not ws or any(w <= 0 for w in ws) or abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError("weights must be positive and sum to 1")


def d_value(f: Density, alpha, t: Element):
    """D_{f^a}(T) = ||J(f^a)^{-1} T||_2, or infinity off the range."""
    jm = JordanMap(f, alpha)
    try:
        y = jordan_invert(jm, t)
    except NotInRange:
        return np.inf
    return quasi_norm(y, 2)


def _tau_vec(space, m):
    """Vectorize so Euclidean norm equals the L_2(tau) norm."""
    return (m * np.sqrt(space.w)[None, :]).ravel()


def _assemble(f: Density, u: LinearMapIntoLp):
    """Matrix of x -> J(f^a)^{-1} u(x) from C^m into L_2(tau)."""
    jm = JordanMap(f, u.alpha)
    space = u.space
    cols = []
    for img in u.images:
        y = jordan_invert(jm, img)
        cols.append(_tau_vec(space, y.entries))
    return np.stack(cols, axis=1)


def worst_case_d(f: Density, u: LinearMapIntoLp):
    """sup over unit x of D_{f^a}(u(x)), exactly, with the maximizing x."""
    a = _assemble(f, u)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    return {"value": float(s[0]), "x_witness": vh[0].conj()}


def _identity_density(space) -> Density:
    d = space.dim
    return Density(Element(space, np.eye(d) / float(np.sum(space.w))),
                   full_support=True)


def _as_density(space, g: Element) -> Density:
    tr = trace(g).real
    return Density((1.0 / tr) * g, full_support=True)


def _structured_atoms(u: LinearMapIntoLp, f0: Density):
    """Deterministic pool atoms: identity, and powers of sum |T_k|^2.

    The exponent 1/(2a) reproduces the commutative equalizing density; p/2
    is the classical Maurey choice.  Both are regularized to full support.
    """
    space = u.space
    h = np.zeros((space.dim, space.dim), dtype=complex)
    for img in u.images:
        h += img.entries.conj().T @ img.entries
    atoms = [f0]
    he = Element(space, h)
    for beta in (1.0 / (2.0 * u.alpha), u.p / 2.0):
        g = power(he, beta)
        tr = trace(g).real
        if tr <= 0:
            continue
        cand = (1.0 / tr) * g
        ev_min = np.linalg.eigvalsh(cand.entries).min()
        if ev_min > 1e-12:
            atoms.append(Density(cand, full_support=True))
        else:
            reg = regularize_density(Density(cand, full_support=False),
                                     f0, u.alpha)
            atoms.append(_as_density(space, reg))
    return atoms


def maurey_fit(u: LinearMapIntoLp, pool_size=24, iterations=80, seed=0,
               extra_pool=(), greedy_rounds=3):
    """Minimize the certified constant over measures on a density pool.

    Returns {"measure": DensityMeasure, "C_certified": float}.  The
    certificate is the exact top eigenvalue of the measure-averaged PSD
    quadratic form, so every intermediate value is sound.
    """
    rng = np.random.default_rng(seed)
    space = u.space
    f0 = _identity_density(space)

    pool = list(_structured_atoms(u, f0)) + list(extra_pool)
    while len(pool) < pool_size:
        h = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
        g = Element(space, h @ h.conj().T)
        pool.append(_as_density(space, g))

    mats = [_assemble(f, u) for f in pool]
    quad = [a.conj().T @ a for a in mats]  # PSD forms on C^m

    def top_eig(lam):
        q = sum(l * qi for l, qi in zip(lam, quad))
        ev, vec = np.linalg.eigh(q)
        return float(ev[-1]), vec[:, -1]

    def optimize(lam):
        best_val, _ = top_eig(lam)
        best_lam = lam.copy()
        cur = lam.copy()
        for it in range(iterations):
            val, v = top_eig(cur)
            if val < best_val:
                best_val, best_lam = val, cur.copy()
            grads = np.array([float(np.real(v.conj() @ qi @ v)) for qi in quad])
            eta = 1.0 / (1.0 + it) ** 0.5 / max(grads.max(), 1e-30)
            cur = cur * np.exp(-eta * grads)
            cur = np.clip(cur, 1e-300, None)
            cur /= cur.sum()
        val, _ = top_eig(cur)
        if val < best_val:
            best_val, best_lam = val, cur
        return best_val, best_lam

    def seeded_optimize():
        # vertex measures are cheap to certify and often optimal; start both
        # from uniform and from (almost) the best single atom
        n = len(pool)
        vertex_vals = [float(np.linalg.eigvalsh(qi)[-1]) for qi in quad]
        vi = int(np.argmin(vertex_vals))
        best_v = vertex_vals[vi]
        best_l = np.zeros(n)
        best_l[vi] = 1.0
        for lam0 in (np.full(n, 1.0 / n),
                     np.full(n, 0.05 / n) + 0.95 * best_l):
            lam0 = lam0 / lam0.sum()
            val, lam = optimize(lam0)
            if val < best_v:
                best_v, best_l = val, lam
        return best_v, best_l

    best_val, best_lam = seeded_optimize()

    # greedy pool growth from worst-case witnesses
    for _ in range(greedy_rounds):
        idx = int(np.argmax(best_lam))
        wc = worst_case_d(pool[idx], u)
        t = u.apply(wc["x_witness"])
        g = power(Element(space, t.entries.conj().T @ t.entries), u.p / 2.0)
        tr = trace(g).real
        if tr <= 0:
            break
        if np.linalg.eigvalsh(g.entries).min() / max(tr, 1e-300) > 1e-12:
            pool.append(Density((1.0 / tr) * g, full_support=True))
        else:
            reg = regularize_density(Density((1.0 / tr) * g, full_support=False),
                                     f0, u.alpha)
            pool.append(_as_density(space, reg))
        mats.append(_assemble(pool[-1], u))
        quad.append(mats[-1].conj().T @ mats[-1])
        val, lam = seeded_optimize()
        if val < best_val:
            best_val, best_lam = val, lam
        elif len(best_lam) < len(pool):
            best_lam = np.append(best_lam, 0.0)

    keep = best_lam > 1e-12
    atoms = tuple((f, float(w)) for f, w, k in
                  zip(pool, best_lam / best_lam[keep].sum(), keep) if k)
    measure = DensityMeasure(atoms=atoms)
    return {"measure": measure, "C_certified": float(np.sqrt(best_val))}


def certificate_check(u: LinearMapIntoLp, measure: DensityMeasure, c_certified,
                      samples=1000, seed=0):
    """Spot-check: averaged D^2 on random unit x never beats the certificate."""
    rng = np.random.default_rng(seed)
    quad = None
    for f, w in measure.atoms:
        a = _assemble(f, u)
        q = w * (a.conj().T @ a)
        quad = q if quad is None else quad + q
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=u.domain_dim) + 1j * rng.normal(size=u.domain_dim)
        x /= np.linalg.norm(x)
        worst = max(worst, float(np.real(x.conj() @ quad @ x)))
    return worst <= c_certified**2 + 1e-8
