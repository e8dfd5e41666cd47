"""Entanglement witnesses from MUBs and SICs, separability windows, mirroring."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _data, _kernels
from .bell import weyl_operator
from .errors import InputError, ValidationError
from .linalg import DenseState, HermitianOperator, partial_transpose_array, random_product_vectors

GATE_SAMPLES = 1000
GATE_SEED = 0


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


# -------------------------------------------------------------------- MUBs

@dataclass(frozen=True)
class MUBSet:
    """Mutually unbiased bases; ``bases[k][:, i]`` is |i_k>, basis 0 computational."""

    d: int
    bases: tuple = field(repr=False)
    name: str = "custom"

    def __post_init__(self):
        d = int(self.d)
        bases = tuple(np.array(B, dtype=np.complex128) for B in self.bases)
        if len(bases) < 1 or any(B.shape != (d, d) for B in bases):
            raise InputError("each basis must be a d x d matrix of column vectors")
        if len(bases) > d + 1:
            raise InputError(f"no more than d+1 = {d + 1} MUBs exist")
        if not np.allclose(bases[0], np.eye(d), atol=1e-9):
            raise InputError("basis 0 must be the computational basis")
        for k, Bk in enumerate(bases):
            for l in range(k, len(bases)):
                G = np.abs(Bk.conj().T @ bases[l]) ** 2
                target = np.eye(d) if k == l else np.full((d, d), 1.0 / d)
                if np.abs(G - target).max() > 1e-9:
                    raise ValidationError(f"bases {k} and {l} violate the MUB overlap condition")
        for B in bases:
            B.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "bases", bases)

    @property
    def m(self) -> int:
        return len(self.bases)

    def subset(self, indices: Sequence[int]) -> "MUBSet":
        idx = list(indices)
        if 0 not in idx:
            idx = [0] + idx
        return MUBSet(self.d, tuple(self.bases[i] for i in idx), f"{self.name}{idx}")


def build_mub_set(d: int, m: int) -> MUBSet:
    """First ``m`` bases of the Weyl-eigenbasis complete set for prime ``d``."""
    d, m = int(d), int(m)
    if m > d + 1:
        raise InputError(f"no more than d+1 = {d + 1} MUBs exist")
    if m < 1:
        raise InputError("m must be >= 1")
    if not _is_prime(d):
        raise InputError(f"d={d} is not prime; supply a validated MUB set instead")
    bases = [np.eye(d, dtype=np.complex128)]
    if d == 2:
        s = 1 / np.sqrt(2)
        bases.append(np.array([[s, s], [s, -s]], dtype=np.complex128))
        bases.append(np.array([[s, s], [1j * s, -1j * s]]))
    else:
        w = np.exp(2j * np.pi / d)
        j = np.arange(d)
        for b in range(d):
            bases.append(np.array([w ** ((b * j * j + a * j) % d) for a in range(d)]).T / np.sqrt(d))
    return MUBSet(d, tuple(bases[:m]), f"weyl-d{d}")


BUNDLED_MUB_SETS = ("d4-stabilizer", "d4-real-unextendible")


def bundled_mub_set(name: str, m: int | None = None) -> MUBSet:
    """Bundled d=4 sets: the complete stabilizer set and an unextendible real triple."""
    key = {"d4-stabilizer": "stabilizer", "d4-real-unextendible": "real-unextendible"}.get(name)
    if key is None:
        raise InputError(f"unknown MUB set {name!r}; choose from {BUNDLED_MUB_SETS}")
    raw = _data.load("mub_d4.json")
    bases = []
    for entry in raw["sets"][key]:
        B = np.array([[complex(re, im) for re, im in col] for col in entry["vectors"]]).T
        bases.append(B / entry["scale"])
    if m is not None:
        if m > len(bases):
            raise InputError(f"set {name!r} has only {len(bases)} bases")
        bases = bases[:m]
    return MUBSet(raw["d"], tuple(bases), name)


def mub_operator(mubs: MUBSet, s: int = 0, transposed: bool = False) -> np.ndarray:
    """B(M_m, s), or its partial transpose with conjugated second factors."""
    d = mubs.d
    if not 0 <= s < d:
        raise InputError("shift s must satisfy 0 <= s < d")
    B = np.zeros((d * d, d * d), dtype=np.complex128)
    for l in range(d):
        B[l * d + (l + s) % d, l * d + (l + s) % d] += 1.0
    for Bk in mubs.bases[1:]:
        for i in range(d):
            v = Bk[:, i]
            u = np.kron(v, v.conj() if transposed else v)
            B += np.outer(u, u.conj())
    return B


def correlation_terms(rho: DenseState, mubs: MUBSet, s: int = 0, conjugate: bool = False) -> np.ndarray:
    """Per-basis correlations C_{B_k,B_k}; term 0 uses the shift ``s``.

    With ``conjugate`` the second factor of the unbiased terms uses |i_k^*>,
    which is the measured quantity behind the transposed witness.
    """
    d = mubs.d
    r = rho.entries
    out = np.empty(mubs.m)
    out[0] = sum(r[l * d + (l + s) % d, l * d + (l + s) % d].real for l in range(d))
    for k, Bk in enumerate(mubs.bases[1:], start=1):
        U = np.einsum("ai,bi->abi", Bk, Bk.conj() if conjugate else Bk).reshape(d * d, d)
        out[k] = float(np.real(np.einsum("ai,ab,bi->", U.conj(), r, U)))
    return out


def correlation_value(rho: DenseState, mubs: MUBSet, s: int = 0, conjugate: bool = False) -> float:
    return float(correlation_terms(rho, mubs, s, conjugate).sum())


# -------------------------------------------------------------------- SICs

@dataclass(frozen=True)
class SICSet:
    """d^2 rank-1 projectors with Tr(P_s P_r) = (1 + d delta_sr)/(d+1)."""

    d: int
    vectors: np.ndarray = field(repr=False)
    name: str = "custom"

    def __post_init__(self):
        d = int(self.d)
        V = np.array(self.vectors, dtype=np.complex128)
        if V.shape != (d * d, d):
            raise InputError("a SIC needs d^2 vectors of length d")
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        G = np.abs(V.conj() @ V.T) ** 2
        target = (1 + d * np.eye(d * d)) / (d + 1)
        if np.abs(G - target).max() > 1e-9:
            raise ValidationError("SIC overlap condition violated")
        P = np.einsum("na,nb->nab", V, V.conj())
        if np.abs(P.sum(axis=0) / d - np.eye(d)).max() > 1e-9:
            raise ValidationError("SIC projectors do not resolve the identity")
        V.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "vectors", V)

    @property
    def projectors(self) -> np.ndarray:
        return np.einsum("na,nb->nab", self.vectors, self.vectors.conj())

    @property
    def povm(self) -> np.ndarray:
        """POVM elements Pi_s / d."""
        return self.projectors / self.d


def weyl_orbit(fiducial: np.ndarray) -> np.ndarray:
    d = len(fiducial)
    return np.array([weyl_operator(k, l, d) @ fiducial for k in range(d) for l in range(d)])


def sic_set(d: int) -> SICSet:
    """Bundled SICs: tetrahedron for d=2, Hesse SIC for d=3 (Weyl orbits)."""
    raw = _data.load("sic_fiducials.json")
    entry = raw.get(str(int(d)))
    if entry is None:
        raise InputError(f"no bundled SIC for d={d}; available: {sorted(raw)}")
    fid = np.array([complex(re, im) for re, im in entry["fiducial"]])
    return SICSet(d, weyl_orbit(fid), entry["name"])


@dataclass(frozen=True)
class GSICSet:
    """General SIC POVM: Tr(E_a^2) = a, Tr(E_a E_b) = (1 - d a)/(d (d^2-1))."""

    d: int
    elements: np.ndarray = field(repr=False)
    a: float = 0.0

    def __post_init__(self):
        d = int(self.d)
        E = np.array(self.elements, dtype=np.complex128)
        if E.shape != (d * d, d, d):
            raise InputError("a GSIC needs d^2 operators of size d x d")
        G = np.real(np.einsum("nab,mba->nm", E, E))
        a = float(np.mean(np.diag(G)))
        cross = (1 - d * a) / (d * (d * d - 1))
        target = np.where(np.eye(d * d, dtype=bool), a, cross)
        if np.abs(G - target).max() > 1e-9:
            raise ValidationError("GSIC overlap conditions violated")
        if np.abs(E.sum(axis=0) - np.eye(d)).max() > 1e-9:
            raise ValidationError("GSIC elements do not sum to the identity")
        if min(np.linalg.eigvalsh(e)[0] for e in E) < -1e-10:
            raise ValidationError("GSIC element is not positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "elements", E)
        object.__setattr__(self, "a", a)


def gsic_from_sic(sic: SICSet, t: float = 1.0) -> GSICSet:
    """E_s = t Pi_s / d + (1 - t) 1/d^2; t = 1 gives the SIC POVM itself (a = 1/d^2)."""
    d = sic.d
    if not -1.0 / (d - 1) <= t <= 1.0:
        raise InputError("t outside the positivity range")
    E = t * sic.povm + (1 - t) * np.eye(d)[None] / d ** 2
    return GSICSet(d, E)


def sic_operator(sic: SICSet, subset: Sequence[int] | None = None, conjugate: bool = False) -> np.ndarray:
    """K = sum_s Pi_s (x) Pi_s over the chosen SIC members."""
    V = sic.vectors if subset is None else sic.vectors[list(subset)]
    U = np.einsum("na,nb->nab", V, V.conj() if conjugate else V).reshape(len(V), -1)
    return np.einsum("na,nb->ab", U, U.conj())


def sic_correlation_value(rho: DenseState, sic: SICSet, subset: Sequence[int] | None = None) -> float:
    return float(np.real(np.trace(sic_operator(sic, subset) @ rho.entries)))


# --------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class Witness:
    operator: HermitianOperator
    kind: str
    params: dict = field(default_factory=dict)
    bounds: tuple | None = None
    provenance: str | None = None
    is_witness: bool = True

    def value(self, rho) -> float:
        return self.operator.expectation(rho)


def product_gate(op: np.ndarray, dims, n: int = GATE_SAMPLES, seed: int = GATE_SEED) -> float:
    """Smallest <ab|op|ab> over ``n`` random product vectors."""
    dA, dB = dims
    a, b = random_product_vectors(dA, dB, n, np.random.default_rng(seed))
    v = np.einsum("ni,nj->nij", a, b).reshape(n, dA * dB)
    return float(np.real(np.einsum("na,ab,nb->n", v.conj(), op, v)).min())


def validate_witness(op: np.ndarray, dims) -> None:
    lam = np.linalg.eigvalsh(op)[0]
    if lam >= -1e-10:
        raise ValidationError(f"operator has no negative eigenvalue (min {lam:.3g}); it detects nothing")
    g = product_gate(op, dims)
    if g < -1e-8:
        raise ValidationError(f"operator is negative on a product state ({g:.3g})")


def mub_witness(mubs: MUBSet, s: int = 0, transposed: bool = False) -> Witness:
    """W = ((d+m-1)/d) 1 - B(M_m, s), or the transposed variant."""
    d, m = mubs.d, mubs.m
    bound = (d + m - 1) / d
    W = bound * np.eye(d * d) - mub_operator(mubs, s, transposed)
    validate_witness(W, (d, d))
    return Witness(HermitianOperator((d, d), W), "mub",
                   {"d": d, "m": m, "s": s, "transposed": transposed, "set": mubs.name},
                   bounds=(0.0, None), provenance="analytic")


@dataclass(frozen=True)
class SeparabilityWindow:
    L: float
    U: float
    restarts: int
    iterations: int
    converged: bool
    converged_fraction: float

    def as_dict(self) -> dict:
        return {"L": self.L, "U": self.U, "restarts": self.restarts, "iterations": self.iterations,
                "converged": self.converged, "converged_fraction": self.converged_fraction}


def _start_vectors(dB: int, restarts: int, seed: int) -> np.ndarray:
    out = np.empty((restarts, dB), dtype=np.complex128)
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        b = rng.normal(size=dB) + 1j * rng.normal(size=dB)
        out[r] = b / np.linalg.norm(b)
    return out


def product_extremum(K: np.ndarray, dims, maximize: bool = True, restarts: int = 200,
                     iterations: int = 500, tol: float = 1e-10, seed: int = 0):
    """Best <ab|K|ab> over product vectors by multi-restart see-saw.

    Returns ``(value, a, b, converged_fraction)``.  Each restart draws its
    start from ``default_rng([seed, restart])``.
    """
    dA, dB = (int(x) for x in dims)
    K = np.asarray(K, dtype=np.complex128)
    if np.abs(K - K.conj().T).max() > 1e-10:
        raise InputError("operator is not Hermitian")
    sign = 1.0 if maximize else -1.0
    b0 = _start_vectors(dB, restarts, seed)
    vals, conv, a, b = _kernels.seesaw(K.reshape(dA, dB, dA, dB), b0, iterations, tol, sign)
    return sign * float(vals.max()), a, b, float(conv.mean())


def separability_window(K, dims=None, restarts: int = 200, iterations: int = 500,
                        tol: float = 1e-10, seed: int = 0) -> SeparabilityWindow:
    """Estimate [L, U] of Tr(K sigma) over separable sigma.

    U is a lower estimate of the true maximum and L an upper estimate of the
    true minimum (both are attained on pure product states).
    """
    if isinstance(K, HermitianOperator):
        dims = K.dims
        K = K.entries
    if dims is None:
        d = int(round(np.sqrt(np.shape(K)[0])))
        dims = (d, d)
    U, _, _, cu = product_extremum(K, dims, True, restarts, iterations, tol, seed)
    L, _, _, cl = product_extremum(K, dims, False, restarts, iterations, tol, seed)
    frac = 0.5 * (cu + cl)
    return SeparabilityWindow(L, U, restarts, iterations, frac > 0.5, frac)


def mirror_witness(W: Witness, window: SeparabilityWindow | None = None, **window_kw) -> Witness:
    """W_M = mu 1 - W with mu the separable maximum of Tr(W sigma)."""
    if window is None:
        window = separability_window(W.operator, **window_kw)
    mu = window.U
    D = W.operator.dim
    lam_max = float(np.linalg.eigvalsh(W.operator.entries)[-1])
    op = HermitianOperator(W.operator.dims, mu * np.eye(D) - W.operator.entries)
    return Witness(op, "mirror", {"of": W.kind, "mu": mu, "lambda_max": lam_max, **W.params},
                   bounds=(0.0, mu - window.L), provenance="see-saw", is_witness=lam_max > mu + 1e-10)


# ---------------------------------------------------------- nonlinear part

def _apply_on_B(M: np.ndarray, dims, name: str) -> np.ndarray:
    if name == "transpose":
        return partial_transpose_array(M, dims, 1)
    if name == "reduction":
        dA, dB = dims
        trB = np.trace(M.reshape(dA, dB, dA, dB), axis1=1, axis2=3)
        return np.kron(trB, np.eye(dB)) - M
    raise InputError(f"unknown map {name!r}; use 'transpose' or 'reduction'")


# both maps are self-dual under the Hilbert-Schmidt product
POSITIVE_MAPS = ("transpose", "reduction")


def map_witness(rho: DenseState, map_name: str = "transpose") -> tuple[Witness, np.ndarray]:
    """W = (1 (x) L*)(|phi><phi|) with |phi> the most negative eigenvector of (1 (x) L)(rho)."""
    img = _apply_on_B(rho.entries, rho.dims, map_name)
    lam, vecs = np.linalg.eigh(0.5 * (img + img.conj().T))
    if lam[0] >= -1e-10:
        raise ValidationError(f"map {map_name!r} does not detect this state")
    phi = vecs[:, 0]
    W = _apply_on_B(np.outer(phi, phi.conj()), rho.dims, map_name)
    return Witness(HermitianOperator(rho.dims, W), f"map-{map_name}", {"eigenvalue": float(lam[0])}), phi


def functional_value(rho, W: np.ndarray, X: np.ndarray, s: float) -> float:
    r = rho.entries
    if s <= 0:
        raise InputError("largest Schmidt coefficient must be positive")
    tx = np.trace(X @ r)
    txd = np.trace(X.conj().T @ r)
    return float(np.real(np.trace(W @ r) - tx * txd / s ** 2))


def nonlinear_functional(rho: DenseState, phi: np.ndarray, chi: np.ndarray, map_name: str = "transpose") -> float:
    """F[rho] = Tr(W rho) - Tr(X rho) Tr(X^dag rho) / s(chi)^2, X = (1 (x) L*)(|phi><chi|)."""
    dims = rho.dims
    chi = np.asarray(chi, dtype=np.complex128)
    n = np.linalg.norm(chi)
    if n == 0:
        raise InputError("chi must be nonzero")
    chi = chi / n
    s = float(np.linalg.svd(chi.reshape(dims), compute_uv=False)[0])
    W = _apply_on_B(np.outer(phi, phi.conj()), dims, map_name)
    X = _apply_on_B(np.outer(phi, chi.conj()), dims, map_name)
    return functional_value(rho, W, X, s)


# ----------------------------------------------------------- Bell witness

def bell_violation_witness() -> Witness:
    raw = _data.load("bell_violation.json")
    W = _data.radical_matrix(raw["w_bell"])
    return Witness(HermitianOperator(tuple(raw["dims"]), W), "bell", {}, provenance="catalog")


def bell_violation_value() -> float:
    from .zoo import rho_bound
    return bell_violation_witness().value(rho_bound())
