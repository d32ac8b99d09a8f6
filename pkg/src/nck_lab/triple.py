"""The triple norm |||x|||_q: closed row/column formula for q >= 2 and a
decomposition-infimum optimizer for q <= 2.

For q <= 2 the infimum over x_k = a_k + b_k of
``||(sum a*a)^(1/2)||_q + ||(sum bb*)^(1/2)||_q`` is attacked by multistart
local minimization with an eigenvalue-smoothed objective; every returned value
is a certified upper bound witnessed by an explicit decomposition.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .core import Element, MatrixTuple, power, quasi_norm


@dataclass(frozen=True)
class Decomposition:
    a: MatrixTuple
    b: MatrixTuple

    def __post_init__(self):
        if len(self.a) != len(self.b) or self.a.space != self.b.space:
            raise ValueError("a and b must match in length and space")

    def target(self):
        return MatrixTuple(tuple(ak + bk for ak, bk in zip(self.a, self.b)))


@dataclass(frozen=True)
class TripleNormResult:
    value: float
    witness: Optional[Decomposition]
    certified: str  # "exact" or "upper_bound"


def _square_function_norm(space, mats, q, column=True):
    """||(sum x*x)^(1/2)||_q (column) or ||(sum xx*)^(1/2)||_q (row)."""
    if column:
        s = np.einsum("kji,kjl->il", mats.conj(), mats)
    else:
        s = np.einsum("kij,klj->il", mats, mats.conj())
    root = power(Element(space, s), 0.5)
    return quasi_norm(root, q)


def row_column_value(x: MatrixTuple, q) -> TripleNormResult:
    """max of the column and row square-function norms (exact for q >= 2)."""
    if q < 2:
        raise ValueError("row/column formula requires q >= 2")
    mats = x.stack()
    col = _square_function_norm(x.space, mats, q, column=True)
    row = _square_function_norm(x.space, mats, q, column=False)
    return TripleNormResult(value=max(col, row), witness=None, certified="exact")


def decomposition_objective(d: Decomposition, q) -> float:
    """||(sum a*a)^(1/2)||_q + ||(sum bb*)^(1/2)||_q."""
    if not (0 < q <= 2):
        raise ValueError("objective defined for 0 < q <= 2")
    space = d.a.space
    col = _square_function_norm(space, d.a.stack(), q, column=True)
    row = _square_function_norm(space, d.b.stack(), q, column=False)
    return col + row


def _w_power_trace_grad(a_gram, w, q, eps2):
    """Value and gradient of A -> tr(W (A + eps2)^(q/2)) at Hermitian A.

    Returns (value, G) with d value[E] = Re tr(G E) for Hermitian E; G is the
    Daleckii-Krein derivative matrix in the original basis.
    """
    mu, u = np.linalg.eigh(a_gram)
    mu = np.clip(mu, 0.0, None)
    h = (mu + eps2) ** (q / 2.0)
    hp = (q / 2.0) * (mu + eps2) ** (q / 2.0 - 1.0)
    wt = (u.conj().T * w) @ u  # U* W U
    value = float(np.real(np.sum(np.diag(wt) * h)))
    # first divided differences of h on the eigenvalues
    dmu = mu[:, None] - mu[None, :]
    dh = h[:, None] - h[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(np.abs(dmu) > 1e-14 * (1.0 + np.abs(mu).max()),
                       dh / dmu, 0.0)
    same = np.abs(dmu) <= 1e-14 * (1.0 + np.abs(mu).max())
    phi = np.where(same, 0.5 * (hp[:, None] + hp[None, :]), phi)
    g = u @ (wt * phi) @ u.conj().T
    return value, 0.5 * (g + g.conj().T)


def _objective_and_grad(avec, xs, w, q, eps):
    """Smoothed objective and gradient w.r.t. the real/imag parts of a."""
    n, d, _ = xs.shape
    a = avec[: n * d * d].reshape(n, d, d) + 1j * avec[n * d * d:].reshape(n, d, d)
    b = xs - a
    gram_a = np.einsum("kji,kjl->il", a.conj(), a)
    gram_b = np.einsum("kij,klj->il", b, b.conj())
    eps2 = eps * eps
    va, ga = _w_power_trace_grad(gram_a, w, q, eps2)
    vb, gb = _w_power_trace_grad(gram_b, w, q, eps2)
    # smoothed q-norms of the square functions
    fa = va ** (1.0 / q)
    fb = vb ** (1.0 / q)
    ca = (1.0 / q) * va ** (1.0 / q - 1.0)
    cb = (1.0 / q) * vb ** (1.0 / q - 1.0)
    # d va = 2 Re<a_k Ga, da_k>;  d vb = -2 Re<Gb b_k, da_k>
    grad_a = 2.0 * ca * np.einsum("kij,jl->kil", a, ga)
    grad_b = -2.0 * cb * np.einsum("ij,kjl->kil", gb, b)
    grad = grad_a + grad_b
    gvec = np.concatenate([grad.real.ravel(), grad.imag.ravel()])
    return fa + fb, gvec


def _exact_objective(xs, avec, space, q):
    n, d, _ = xs.shape
    a = avec[: n * d * d].reshape(n, d, d) + 1j * avec[n * d * d:].reshape(n, d, d)
    dec = _decomposition_from_matrices(space, xs, a)
    return decomposition_objective(dec, q), dec


def _decomposition_from_matrices(space, xs, a):
    at = MatrixTuple(tuple(Element(space, m) for m in a))
    bt = MatrixTuple(tuple(Element(space, m) for m in xs - a))
    return Decomposition(at, bt)


def triple_norm_upper(x: MatrixTuple, q, restarts=4, seed=0, maxiter=300,
                      allow_exact=True, polish=True) -> TripleNormResult:
    """Certified upper bound on |||x|||_q for 0 < q <= 2.

    Starts from b=0, a=0, a=x/2 plus ``restarts`` random perturbations; with
    ``polish=False`` only the canonical starts are evaluated (no local
    minimization), which is still a valid certificate.
    """
    if not (0 < q <= 2):
        raise ValueError("optimizer covers 0 < q <= 2")
    xs = x.stack()
    n, d, _ = xs.shape
    space = x.space
    w = space.w
    scale = max(np.max(np.abs(xs)), 1e-30)
    rng = np.random.default_rng(seed)

    starts = [xs.copy(), np.zeros_like(xs), 0.5 * xs]
    for _ in range(max(restarts, 0)):
        base = starts[len(starts) % 3]
        noise = 0.3 * scale * (rng.normal(size=xs.shape) + 1j * rng.normal(size=xs.shape))
        starts.append(base + noise)

    best_val = np.inf
    best_dec = None
    grad_ok = []
    finals = []
    for a0 in starts:
        avec = np.concatenate([a0.real.ravel(), a0.imag.ravel()])
        if polish:
            for eps in (1e-3 * scale, 1e-6 * scale):
                res = minimize(_objective_and_grad, avec, args=(xs, w, q, eps),
                               jac=True, method="L-BFGS-B",
                               options={"maxiter": maxiter, "ftol": 1e-14, "gtol": 1e-12})
                avec = res.x
            grad_ok.append(np.linalg.norm(res.jac) < 1e-8 * max(1.0, scale))
        val, dec = _exact_objective(xs, avec, space, q)
        finals.append(val)
        if val < best_val - 0.0:
            best_val = val
            best_dec = dec

    certified = "upper_bound"
    if allow_exact and polish and 1 <= q <= 2 and grad_ok and all(grad_ok):
        spread = max(finals) - min(finals)
        if spread <= 1e-6 * max(1.0, best_val):
            certified = "exact"
    return TripleNormResult(value=float(best_val), witness=best_dec, certified=certified)


def certified_upper_bound(x: MatrixTuple, q) -> TripleNormResult:
    """Cheap certificate: best of the three canonical decompositions."""
    return triple_norm_upper(x, q, restarts=0, polish=False, allow_exact=False)
