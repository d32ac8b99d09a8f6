"""Orthonormal systems and the mixed norm ||sum xi_k (x) x_k||_{L_q(phi (x) tau)}.

Rademacher sums are enumerated exactly (2^n sign patterns); Rademacher,
Steinhaus, Gaussian and Haar-unitary systems are all available through a
seeded Monte-Carlo estimator.  Haar unitaries of matrix dimension d stand in
for free Haar unitaries (asymptotic freeness); every estimate records d so the
approximation is visible in reports.
"""

from dataclasses import dataclass

import numpy as np

from .core import MatrixTuple, TraceSpace, quasi_norm_stack
from .errors import EnumerationTooLarge

ENUMERATION_LIMIT = 22

SCALAR_KINDS = ("rademacher", "steinhaus", "gaussian")


@dataclass(frozen=True)
class OrthonormalSystem:
    """One of the built-in L_2(phi)-orthonormal systems."""

    kind: str
    count: int
    model_dim: int = 1

    def __post_init__(self):
        if self.kind not in SCALAR_KINDS + ("haar_unitary",):
            raise ValueError("unknown system kind %r" % (self.kind,))
        if self.kind in SCALAR_KINDS and self.model_dim != 1:
            raise ValueError("scalar systems require model_dim = 1")
        if self.model_dim < 1 or self.count < 1:
            raise ValueError("count and model_dim must be >= 1")


@dataclass(frozen=True)
class MixedNormEstimate:
    value: float
    std_error: float
    samples: int
    exact: bool
    seed: int
    model_dim: int = 1
    free_approximation: bool = False

    def __post_init__(self):
        if self.exact and self.std_error != 0.0:
            raise ValueError("exact estimates carry zero std_error")


def _sample_rng(seed, index):
    """Counter-based per-sample stream; independent of evaluation order."""
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _haar_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _reduce(values, q, seed, average, samples, extra=None):
    values = np.asarray(values, dtype=float)
    n = len(values)
    if average == "l2":
        pw = values**2
        expo = 0.5
    else:
        pw = values**q
        expo = 1.0 / q
    m = float(pw.mean())
    var = float(pw.var(ddof=1)) if n > 1 else 0.0
    se_mean = np.sqrt(var / n)
    value = m**expo
    # delta method for the root of the mean
    se = expo * m ** (expo - 1.0) * se_mean if m > 0 else se_mean
    kw = extra or {}
    return MixedNormEstimate(value=value, std_error=float(se), samples=samples,
                             exact=False, seed=seed, **kw)


def mixed_norm_exact_rademacher(x: MatrixTuple, q, average="power") -> MixedNormEstimate:
    """(2^-n sum_eps ||sum eps_k x_k||_q^q)^(1/q) by full sign enumeration."""
    n = len(x)
    if n > ENUMERATION_LIMIT:
        raise EnumerationTooLarge("n = %d exceeds enumeration budget %d" % (n, ENUMERATION_LIMIT))
    space = x.space
    xs = x.stack()
    total = 1 << n
    acc = []
    chunk = 4096
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        signs = 1.0 - 2.0 * ((idx[:, None] >> np.arange(n)[None, :]) & 1)
        sums = np.einsum("pk,kij->pij", signs, xs)
        acc.append(quasi_norm_stack(space, sums, q))
    norms = np.concatenate(acc)
    if average == "l2":
        value = float(np.sqrt(np.mean(norms**2)))
    else:
        value = float(np.mean(norms**q) ** (1.0 / q))
    return MixedNormEstimate(value=value, std_error=0.0, samples=total, exact=True, seed=0)


def _sample_sum(system, xs, space, rng):
    """One realization of sum xi_k (x) x_k, and the space it lives on."""
    n = len(xs)
    if system.kind == "rademacher":
        coeff = rng.choice([-1.0, 1.0], size=n)
    elif system.kind == "steinhaus":
        coeff = np.exp(2j * np.pi * rng.uniform(size=n))
    elif system.kind == "gaussian":
        coeff = rng.normal(size=n)
    else:  # haar_unitary
        d = system.model_dim
        s = np.zeros((d * space.dim, d * space.dim), dtype=complex)
        for k in range(n):
            s += np.kron(_haar_unitary(rng, d), xs[k])
        return s
    return np.einsum("k,kij->ij", coeff, xs)


def _tensor_space(system, space):
    if system.kind == "haar_unitary":
        d = system.model_dim
        w = np.kron(np.full(d, 1.0 / d), space.w)
        return TraceSpace(d * space.dim, tuple(w))
    return space


def mixed_norm_mc(system: OrthonormalSystem, x: MatrixTuple, q, samples, seed,
                  average="power") -> MixedNormEstimate:
    """Monte-Carlo estimate of (E ||sum xi_k (x) x_k||_q^q)^(1/q).

    For haar_unitary the norm is taken on the tensor product with the
    normalized trace on the d-dimensional factor.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if system.count != len(x):
        raise ValueError("system.count must equal len(x)")
    xs = x.stack()
    tspace = _tensor_space(system, x.space)
    norms = np.empty(samples)
    batch = []
    batch_idx = 0
    for i in range(samples):
        rng = _sample_rng(seed, i)
        batch.append(_sample_sum(system, xs, x.space, rng))
        if len(batch) == 512 or i == samples - 1:
            vals = quasi_norm_stack(tspace, np.stack(batch), q)
            norms[batch_idx:batch_idx + len(batch)] = vals
            batch_idx += len(batch)
            batch = []
    extra = {}
    if system.kind == "haar_unitary":
        extra = {"model_dim": system.model_dim, "free_approximation": True}
    return _reduce(norms, q, seed, average, samples, extra)


def check_contraction_l2(system: OrthonormalSystem, y: MatrixTuple, samples, seed):
    """Check ||sum xi_k (x) y_k||_2 <= (sum ||y_k||_2^2)^(1/2) (plus MC noise).

    Returns (holds, margin, estimate); margin = rhs - lhs.
    """
    rhs = float(np.sqrt(sum(quasi_norm_stack(y.space, yk.entries[None], 2)[0] ** 2
                            for yk in y)))
    if system.kind == "rademacher" and len(y) <= ENUMERATION_LIMIT:
        est = mixed_norm_exact_rademacher(y, 2)
        slack = 1e-10 * max(1.0, rhs)
    else:
        est = mixed_norm_mc(system, y, 2, samples, seed)
        slack = 3.0 * est.std_error + 1e-10 * max(1.0, rhs)
    margin = rhs - est.value
    return margin >= -slack, margin, est
