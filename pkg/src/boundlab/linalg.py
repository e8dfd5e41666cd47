"""Dense bipartite linear algebra: states, partial operations, norms, entropies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, ValidationError

TOL = 1e-10


def _as_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if not dims or any(x < 1 for x in dims):
        raise InputError(f"invalid dims {dims}")
    return dims


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix on a tensor product of subsystems."""

    dims: tuple[int, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        a = np.array(self.entries, dtype=np.complex128)
        D = int(np.prod(dims))
        if a.shape != (D, D):
            raise InputError(f"entries shape {a.shape} does not match dims {dims}")
        if np.abs(a - a.conj().T).max(initial=0.0) > TOL:
            raise ValidationError("operator is not Hermitian")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def expectation(self, rho) -> float:
        r = rho.entries if hasattr(rho, "entries") else np.asarray(rho)
        return float(np.real(np.trace(self.entries @ r)))


@dataclass(frozen=True)
class DenseState(HermitianOperator):
    """Density matrix with declared subsystem dimensions."""

    def __post_init__(self):
        super().__post_init__()
        a = self.entries
        if abs(np.trace(a).real - 1.0) > TOL:
            raise ValidationError(f"trace {float(np.trace(a).real):.12g} != 1")
        if np.linalg.eigvalsh(a)[0] < -TOL:
            raise ValidationError("state is not positive semidefinite")

    @classmethod
    def from_vector(cls, psi, dims) -> "DenseState":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(dims, np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left, self.right).ravel()


def _entries(x) -> np.ndarray:
    return x.entries if hasattr(x, "entries") else np.asarray(x, dtype=np.complex128)


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for op in ops:
        out = np.kron(out, _entries(op))
    return out


def product_state(*states) -> DenseState:
    """Tensor product of DenseStates, dims concatenated."""
    dims = sum((s.dims for s in states), ())
    return DenseState(dims, kron(*states))


def partial_trace(rho: DenseState, keep: Sequence[int]) -> DenseState:
    dims = rho.dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n or keep[0] < 0 or keep[-1] >= n:
        raise InputError(f"keep={keep} must be a nonempty proper subset of 0..{n - 1}")
    t = rho.entries.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace out from the highest index so axis numbers stay valid
    cur = n
    for i in reversed(traced):
        t = np.trace(t, axis1=i, axis2=i + cur)
        cur -= 1
    kd = tuple(dims[i] for i in keep)
    D = int(np.prod(kd))
    return DenseState(kd, t.reshape(D, D))


def partial_transpose_array(a: np.ndarray, dims: Sequence[int], part: int | Sequence[int] = 1) -> np.ndarray:
    dims = tuple(dims)
    n = len(dims)
    parts = [part] if np.isscalar(part) else list(part)
    if any(p < 0 or p >= n for p in parts):
        raise InputError(f"invalid subsystem index {part}")
    perm = list(range(2 * n))
    for p in parts:
        perm[p], perm[p + n] = perm[p + n], perm[p]
    D = int(np.prod(dims))
    return np.asarray(a).reshape(dims + dims).transpose(perm).reshape(D, D)


def partial_transpose(rho, part: int | Sequence[int] = 1) -> HermitianOperator:
    """Partial transpose on subsystem ``part`` (default: the second)."""
    return HermitianOperator(rho.dims, partial_transpose_array(rho.entries, rho.dims, part))


def realign(rho) -> np.ndarray:
    """|i><j| (x) |k><l|  ->  |i><k| (x) |j><l|, shape dA^2 x dB^2."""
    if len(rho.dims) != 2:
        raise InputError("realignment needs exactly two subsystems")
    dA, dB = rho.dims
    return rho.entries.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)


def trace_norm(a) -> float:
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise InputError("non-finite entries")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def schmidt_decompose(psi, dims: Sequence[int]) -> SchmidtDecomposition:
    dA, dB = (int(x) for x in dims)
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.size != dA * dB:
        raise InputError("vector length does not match dims")
    if abs(np.linalg.norm(psi) - 1) > TOL:
        raise InputError("vector is not normalized")
    u, s, vh = np.linalg.svd(psi.reshape(dA, dB), full_matrices=False)
    return SchmidtDecomposition(s, u, vh.T)


def _log2_spectrum(lam: np.ndarray) -> float:
    lam = lam[lam > 1e-14]
    return float(-(lam * np.log2(lam)).sum())


def von_neumann_entropy(rho: DenseState) -> float:
    """Entropy in bits."""
    return max(0.0, _log2_spectrum(np.linalg.eigvalsh(rho.entries)))


def entanglement_entropy(psi, dims) -> float:
    s = schmidt_decompose(psi, dims).coefficients
    return max(0.0, _log2_spectrum(s ** 2))


def relative_entropy(rho: DenseState, sigma: DenseState) -> float:
    """S(rho || sigma) in bits; ``inf`` if supp(rho) is not inside supp(sigma)."""
    if rho.dims != sigma.dims:
        raise InputError("dimension mismatch")
    lr, vr = np.linalg.eigh(rho.entries)
    ls, vs = np.linalg.eigh(sigma.entries)
    overlap = np.abs(vr.conj().T @ vs) ** 2  # |<r_i|s_j>|^2
    pos_r = lr > 1e-14
    null_s = ls <= TOL
    if np.any(overlap[np.ix_(pos_r, null_s)] * lr[pos_r, None] > 1e-12):
        return float("inf")
    lr_p = lr[pos_r]
    term1 = float((lr_p * np.log2(lr_p)).sum())
    log_s = np.where(null_s, 0.0, np.log2(np.where(null_s, 1.0, ls)))
    term2 = float((lr[pos_r, None] * overlap[pos_r] * log_s[None, :]).sum())
    return max(0.0, term1 - term2)


def fidelity(rho: DenseState, sigma: DenseState) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    lam, v = np.linalg.eigh(rho.entries)
    sq = (v * np.sqrt(np.clip(lam, 0, None))) @ v.conj().T
    m = sq @ sigma.entries @ sq
    ev = np.clip(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0, None)
    return float(np.sqrt(ev).sum() ** 2)


def maximally_mixed(dims: Sequence[int]) -> DenseState:
    D = int(np.prod(dims))
    return DenseState(dims, np.eye(D) / D)


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_product_vectors(dA: int, dB: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    a = rng.normal(size=(n, dA)) + 1j * rng.normal(size=(n, dA))
    b = rng.normal(size=(n, dB)) + 1j * rng.normal(size=(n, dB))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    return a, b


def random_separable(dA: int, dB: int, rng: np.random.Generator, terms: int = 4) -> DenseState:
    """Random convex mixture of pure product states."""
    a, b = random_product_vectors(dA, dB, terms, rng)
    w = rng.exponential(size=terms)
    w /= w.sum()
    v = np.einsum("ni,nj->nij", a, b).reshape(terms, dA * dB)
    rho = np.einsum("n,ni,nj->ij", w, v, v.conj())
    return DenseState((dA, dB), rho)


def random_state(D: int, rng: np.random.Generator, dims=None) -> DenseState:
    """Random full-rank density matrix (Hilbert-Schmidt measure)."""
    g = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    r = g @ g.conj().T
    return DenseState(dims or (D,), r / np.trace(r).real)
