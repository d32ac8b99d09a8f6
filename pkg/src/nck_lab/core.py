"""Finite matrix model of a semifinite trace: weighted traces, L_p quasi-norms,
functional calculus and polar decomposition.

A :class:`TraceSpace` is the algebra of ``dim x dim`` complex matrices with the
positive linear functional ``tau(x) = sum_i w_i x_ii``.  Uniform weights give a
multiple of the usual trace (the tracial case); non-uniform weights are
supported as data but make ``tau`` non-tracial, so the classical inequalities
are only guaranteed on uniform-weight spaces.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativePowerOfSingular, NotPositiveSemidefinite

# Eigenvalues in [-PSD_CLIP_TOL, PSD_CLIP_TOL] are clipped to zero; anything
# more negative is rejected.
PSD_CLIP_TOL = 1e-12

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class TraceSpace:
    """Matrix algebra of size ``dim`` with trace weights ``weights``."""

    dim: int
    weights: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        w = tuple(float(v) for v in self.weights)
        if len(w) != self.dim:
            raise ValueError("weights length must equal dim")
        if any(v <= 0 for v in w):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "weights", w)

    @property
    def w(self):
        return np.asarray(self.weights)

    @classmethod
    def standard(cls, dim):
        """Usual matrix trace (all weights 1)."""
        return cls(dim, (1.0,) * dim)

    @classmethod
    def normalized(cls, dim):
        """Normalized trace (weights 1/dim), tau(1) = 1."""
        return cls(dim, (1.0 / dim,) * dim)

    @property
    def is_uniform(self):
        return len(set(self.weights)) == 1


@dataclass(frozen=True)
class Element:
    """A matrix viewed as a member of L_p(tau) over its TraceSpace."""

    space: TraceSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError("entries shape must match space dim")
        if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "entries", m)

    def adjoint(self):
        return Element(self.space, self.entries.conj().T)

    def __add__(self, other):
        _check_same_space(self, other)
        return Element(self.space, self.entries + other.entries)

    def __sub__(self, other):
        _check_same_space(self, other)
        return Element(self.space, self.entries - other.entries)

    def __neg__(self):
        return Element(self.space, -self.entries)

    def __mul__(self, scalar):
        return Element(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        _check_same_space(self, other)
        return Element(self.space, self.entries @ other.entries)

    @classmethod
    def identity(cls, space):
        return cls(space, np.eye(space.dim))

    @classmethod
    def zero(cls, space):
        return cls(space, np.zeros((space.dim, space.dim)))


def _check_same_space(a, b):
    if a.space != b.space:
        raise ValueError("elements live over different trace spaces")


@dataclass(frozen=True)
class MatrixTuple:
    """Finite sequence (x_1, ..., x_n) of elements over one TraceSpace."""

    items: tuple

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("tuple must be nonempty")
        sp = items[0].space
        for it in items[1:]:
            if it.space != sp:
                raise ValueError("all items must share one trace space")
        object.__setattr__(self, "items", items)

    @property
    def space(self):
        return self.items[0].space

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, k):
        return self.items[k]

    def stack(self):
        """Entries stacked into an (n, d, d) array."""
        return np.stack([it.entries for it in self.items])


@dataclass(frozen=True)
class Density:
    """Positive element of trace one; the set D (D' when full_support)."""

    element: Element
    full_support: bool = False

    def __post_init__(self):
        f = self.element.entries
        if np.max(np.abs(f - f.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(f))):
            raise ValueError("density must be Hermitian")
        ev = np.linalg.eigvalsh(0.5 * (f + f.conj().T))
        if ev.min() < -1e-10 * max(1.0, ev.max()):
            raise ValueError("density must be positive semidefinite")
        tr = trace(self.element)
        if abs(tr - 1.0) > 1e-8:
            raise ValueError("density must have trace 1")
        if self.full_support and ev.min() <= 0:
            raise ValueError("full_support density must have min eigenvalue > 0")

    @property
    def space(self):
        return self.element.space


@dataclass(frozen=True)
class ConstantReport:
    """Empirical constant estimate with the witnessing instance."""

    value: float
    witness: dict
    samples: int
    seed: int


def trace(x: Element) -> complex:
    """tau(x) = sum_i w_i x_ii."""
    return complex(np.sum(x.space.w * np.diag(x.entries)))


def inner(a: Element, b: Element) -> complex:
    """GNS inner product <a, b> = tau(a* b)."""
    return trace(a.adjoint() @ b)


def _weighted_spectral_data(space, mats):
    """Eigenvalues mu and weight coefficients d of x*x for a stack of matrices.

    tau(|x|^p) = sum_i d_i mu_i^{p/2} with x*x = U diag(mu) U* and
    d_i = sum_j w_j |U_ji|^2.  For uniform weight c, d_i = c.
    """
    mats = np.asarray(mats, dtype=complex)
    # SVD keeps small singular values far more accurate than an
    # eigendecomposition of the Gram matrix x*x
    lu, s, vh = np.linalg.svd(mats)
    mu = s**2
    u = vh.conj().swapaxes(-1, -2)  # columns = eigenvectors of x*x
    d = np.einsum("j,...ji->...i", space.w, np.abs(u) ** 2)
    return mu, d


def quasi_norm_stack(space, mats, p):
    """Vectorized quasi-norm over a stack of matrices (..., d, d)."""
    mu, d = _weighted_spectral_data(space, mats)
    if np.isinf(p):
        return np.sqrt(mu.max(axis=-1))
    if p <= 0:
        raise ValueError("p must be positive")
    return np.einsum("...i,...i->...", d, mu ** (p / 2.0)) ** (1.0 / p)


def quasi_norm(x: Element, p) -> float:
    """(tau(|x|^p))^(1/p) for finite p, operator norm for p = inf."""
    return float(quasi_norm_stack(x.space, x.entries[None], p)[0])


def hermitian_eig(x: Element, tol=None):
    """Eigendecomposition of a Hermitian element, with PSD clipping.

    Returns (eigenvalues, eigenvectors).  Eigenvalues in the clipping band
    around zero are set to exactly zero; more negative values raise.
    """
    m = x.entries
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("element is not Hermitian")
    ev, vec = np.linalg.eigh(0.5 * (m + m.conj().T))
    clip = PSD_CLIP_TOL if tol is None else tol
    small = np.abs(ev) <= clip * scale
    ev = ev.copy()
    ev[small] = 0.0
    return ev, vec


def power(f: Element, beta) -> Element:
    """Functional calculus f^beta for Hermitian PSD f, with 0^beta = 0.

    Negative beta requires full support (all eigenvalues > 0 after clipping).
    """
    ev, vec = hermitian_eig(f)
    if ev.min() < 0:
        raise NotPositiveSemidefinite("negative eigenvalue %g beyond tolerance" % ev.min())
    if beta < 0 and np.any(ev == 0.0):
        raise NegativePowerOfSingular("negative power of a singular element")
    out = np.zeros_like(ev)
    nz = ev > 0
    out[nz] = ev[nz] ** beta
    if beta == 0:
        # support projection convention: 0^0 = 0
        pass
    return Element(f.space, (vec * out) @ vec.conj().T)


def complex_power(f: Element, z) -> Element:
    """f^z for Hermitian PSD f and complex z, with 0^z = 0."""
    ev, vec = hermitian_eig(f)
    if ev.min() < 0:
        raise NotPositiveSemidefinite("negative eigenvalue beyond tolerance")
    out = np.zeros(len(ev), dtype=complex)
    nz = ev > 0
    out[nz] = np.exp(z * np.log(ev[nz]))
    return Element(f.space, (vec * out) @ vec.conj().T)


def polar(x: Element):
    """Polar decomposition x = u |x| with |x| = (x*x)^(1/2).

    The returned u is unitary (x invertible) or a unitary completion of the
    partial isometry on the range.
    """
    a, s, bh = np.linalg.svd(x.entries)
    u = a @ bh
    absx = (bh.conj().T * s) @ bh
    return Element(x.space, u), Element(x.space, absx)


def chi(p) -> float:
    """Quasi-triangle constant max(2^(1/p - 1), 1)."""
    if p <= 0:
        raise ValueError("p must be positive")
    if np.isinf(p):
        return 1.0
    return max(2.0 ** (1.0 / p - 1.0), 1.0)


def random_element(space, rng, hermitian=False):
    """Standard complex Gaussian element (Hermitian part if requested)."""
    d = space.dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    if hermitian:
        m = 0.5 * (m + m.conj().T)
    return Element(space, m)


def random_density(space, rng, full_support=True):
    """Random density f = hh*/tau(hh*); almost surely full support."""
    h = random_element(space, rng)
    g = h @ h.adjoint()
    if not full_support:
        # kill the smallest eigenvector direction to create a kernel
        ev, vec = np.linalg.eigh(g.entries)
        ev = ev.copy()
        ev[0] = 0.0
        g = Element(space, (vec * ev) @ vec.conj().T)
    g = (1.0 / trace(g).real) * g
    return Density(g, full_support=full_support)
