"""Weyl-Heisenberg operators, Bell bases and the Magic Simplex."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InputError, ValidationError
from .linalg import DenseState


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def weyl_operator(k: int, l: int, d: int) -> np.ndarray:
    """W_{k,l} = sum_j w^{jk} |j><j+l|."""
    k %= d
    l %= d
    W = np.zeros((d, d), dtype=np.complex128)
    j = np.arange(d)
    W[j, (j + l) % d] = omega(d) ** (j * k)
    return W


def omega00(d: int) -> np.ndarray:
    return np.eye(d).ravel() / np.sqrt(d)


@dataclass(frozen=True)
class BellBasis:
    """Bell basis generated by (generalized) Weyl operators.

    ``phases[s, t]`` are the unit-modulus factors alpha_{s,t}; all ones gives
    the standard basis.
    """

    d: int
    phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = int(self.d)
        if d < 2:
            raise InputError("d must be >= 2")
        a = np.array(self.phases, dtype=np.complex128)
        if a.shape != (d, d):
            raise InputError(f"phases must be {d}x{d}")
        if np.abs(np.abs(a) - 1).max() > 1e-12:
            raise ValidationError("phases must have unit modulus")
        a.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "phases", a)

    @classmethod
    def standard(cls, d: int) -> "BellBasis":
        return cls(d, np.ones((d, d)))

    @classmethod
    def random(cls, d: int, seed: int) -> "BellBasis":
        rng = np.random.default_rng(seed)
        return cls(d, np.exp(2j * np.pi * rng.random((d, d))))

    @property
    def is_standard(self) -> bool:
        return bool(np.allclose(self.phases, 1.0, atol=1e-12))

    def operator(self, k: int, l: int) -> np.ndarray:
        """V^alpha_{k,l} = sum_j w^{jk} alpha_{j+l,l} |j><j+l|."""
        d = self.d
        k %= d
        l %= d
        j = np.arange(d)
        V = np.zeros((d, d), dtype=np.complex128)
        V[j, (j + l) % d] = omega(d) ** (j * k) * self.phases[(j + l) % d, l]
        return V

    def vector(self, k: int, l: int) -> np.ndarray:
        return np.kron(self.operator(k, l), np.eye(self.d)) @ omega00(self.d)

    def vectors(self) -> np.ndarray:
        """Array (d*d, d*d): row k*d+l holds |Phi_{k,l}>."""
        return _vectors_cached(self.d, self.phases.tobytes())

    def projectors(self) -> np.ndarray:
        v = self.vectors()
        return np.einsum("na,nb->nab", v, v.conj())

    def to_json(self):
        if self.is_standard:
            return "standard"
        return {"alpha": [[[float(z.real), float(z.imag)] for z in row] for row in self.phases]}


@lru_cache(maxsize=64)
def _vectors_cached(d: int, phase_bytes: bytes) -> np.ndarray:
    basis = BellBasis(d, np.frombuffer(phase_bytes, dtype=np.complex128).reshape(d, d))
    out = np.array([basis.vector(k, l) for k in range(d) for l in range(d)])
    out.setflags(write=False)
    return out


def bell_projector(k: int, l: int, basis: BellBasis) -> DenseState:
    v = basis.vector(k, l)
    return DenseState((basis.d, basis.d), np.outer(v, v.conj()))


@dataclass(frozen=True)
class SimplexState:
    """Bell-diagonal state sum_{k,l} c_{k,l} P_{k,l}."""

    basis: BellBasis
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.basis.d
        c = np.array(self.coeffs, dtype=np.float64).reshape(d, d)
        if c.min() < -1e-12:
            raise InputError("negative simplex coefficient")
        if abs(c.sum() - 1) > 1e-9:
            raise InputError(f"coefficients sum to {c.sum()!r}, not 1")
        c = np.clip(c, 0.0, None)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def d(self) -> int:
        return self.basis.d

    @classmethod
    def standard(cls, coeffs) -> "SimplexState":
        c = np.asarray(coeffs, dtype=np.float64)
        d = int(round(np.sqrt(c.size)))
        return cls(BellBasis.standard(d), c.reshape(d, d))

    def to_dense(self) -> DenseState:
        return to_dense(self)


def to_dense(s: SimplexState) -> DenseState:
    v = s.basis.vectors()
    rho = np.einsum("n,na,nb->ab", s.coeffs.ravel(), v, v.conj())
    return DenseState((s.d, s.d), rho)


def coefficients_of(rho: DenseState, basis: BellBasis) -> np.ndarray:
    """Bell-basis diagonal <Phi_{k,l}|rho|Phi_{k,l}> as a d x d array."""
    v = basis.vectors()
    return np.real(np.einsum("na,ab,nb->n", v.conj(), rho.entries, v)).reshape(basis.d, basis.d)


# -------------------------------------------------------------- polytopes

@lru_cache(maxsize=16)
def _subgroups(d: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    elements = [(a, b) for a in range(d) for b in range(d)]
    found = set()
    # every subgroup of Z_d^2 is generated by at most two elements
    for g, h in itertools.combinations_with_replacement(elements, 2):
        S = {(0, 0)}
        gens = [g, h]
        changed = True
        while changed:
            new = S | {((x[0] + y[0]) % d, (x[1] + y[1]) % d) for x in S for y in gens}
            changed = new != S
            S = new
        if len(S) == d:
            found.add(tuple(sorted(S)))
    return tuple(sorted(found))


def enumerate_subgroups(d: int) -> list[list[tuple[int, int]]]:
    """All d-element subgroups of Z_d x Z_d, sorted."""
    if d < 2:
        raise InputError("d must be >= 2")
    return [list(S) for S in _subgroups(d)]


@lru_cache(maxsize=16)
def _kernel_vertices(d: int) -> np.ndarray:
    cosets = set()
    for S in _subgroups(d):
        for p in range(d):
            for q in range(d):
                cosets.add(tuple(sorted(((k + p) % d, (l + q) % d) for k, l in S)))
    verts = []
    for C in sorted(cosets):
        v = np.zeros((d, d))
        for k, l in C:
            v[k, l] = 1.0 / d
        verts.append(v.ravel())
    out = np.array(verts).T
    out.setflags(write=False)
    return out


def kernel_vertices(d: int) -> np.ndarray:
    """Coefficient vectors (columns) of all subgroup states and their translates."""
    return _kernel_vertices(d)


def subgroup_state(subgroup: Sequence[tuple[int, int]], d: int) -> SimplexState:
    c = np.zeros((d, d))
    for k, l in subgroup:
        c[k % d, l % d] = 1.0 / d
    return SimplexState(BellBasis.standard(d), c)


def enclosure_contains(s: SimplexState, tol: float = 1e-12) -> bool:
    return bool(np.all(s.coeffs <= 1.0 / s.d + tol))


@dataclass(frozen=True)
class KernelCertificate:
    contained: bool
    weights: np.ndarray | None
    vertices: np.ndarray | None
    residual: float


def kernel_contains_coeffs(c: np.ndarray, d: int, tol: float = 1e-9) -> KernelCertificate:
    V = kernel_vertices(d)
    ok, x = _kernels.phase1_feasible(V, np.asarray(c, dtype=float).ravel())
    if not ok:
        return KernelCertificate(False, None, None, float("nan"))
    res = float(np.abs(V @ x - np.ravel(c)).max())
    if res > tol:
        return KernelCertificate(False, None, None, res)
    return KernelCertificate(True, x, V, res)


def kernel_contains(s: SimplexState, tol: float = 1e-9) -> KernelCertificate:
    """Membership in the kernel polytope with mixing weights as certificate.

    The check is a linear feasibility problem solved by a Bland-rule
    phase-I simplex, so the certificate is deterministic.
    """
    if not s.basis.is_standard:
        raise InputError("kernel polytope is defined for the standard Bell basis only")
    return kernel_contains_coeffs(s.coeffs, s.d, tol)


# ------------------------------------------------------------- symmetries

@dataclass(frozen=True)
class PhaseSpaceSymmetry:
    kind: str
    d: int
    p: int = 0
    q: int = 0

    KINDS = ("translation", "momentum_inversion", "quarter_rotation", "shear")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InputError(f"unknown symmetry kind {self.kind!r}")

    def map(self, k: int, l: int) -> tuple[int, int]:
        d = self.d
        if self.kind == "translation":
            return (k + self.p) % d, (l + self.q) % d
        if self.kind == "momentum_inversion":
            return (-k) % d, l % d
        if self.kind == "quarter_rotation":
            return l % d, (-k) % d
        return (k + l) % d, l % d


def apply_symmetry(sym: PhaseSpaceSymmetry, s: SimplexState) -> SimplexState:
    if not s.basis.is_standard:
        raise InputError("symmetries act on the standard Bell basis only")
    if sym.d != s.d:
        raise InputError("dimension mismatch")
    out = np.zeros_like(s.coeffs)
    for k in range(s.d):
        for l in range(s.d):
            out[sym.map(k, l)] = s.coeffs[k, l]
    return SimplexState(s.basis, out)
