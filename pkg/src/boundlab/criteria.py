"""Entanglement criteria and the classifier that fuses them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .bell import BellBasis, KernelCertificate, SimplexState, kernel_contains, kernel_contains_coeffs
from .errors import InputError
from .linalg import DenseState, partial_transpose_array, trace_norm
from .witnesses import GSICSet, SICSet, product_extremum, sic_set

FIRE_TOL = 1e-9
EIG_TOL = 1e-10

SEPARABLE = "Separable"
BOUND = "BoundEntangled"
NPT = "NPTEntangled"
UNDETERMINED = "PPTUndetermined"
CLASSES = (SEPARABLE, BOUND, NPT, UNDETERMINED)


@dataclass(frozen=True)
class CriterionOutcome:
    criterion: str
    fired: bool
    score: float
    threshold: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "fired": self.fired, "score": self.score,
                "threshold": self.threshold, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    label: str
    evidence: tuple = ()
    certificate: KernelCertificate | None = field(default=None, repr=False)

    def fired(self) -> list[str]:
        return [o.criterion for o in self.evidence if o.fired]

    def as_dict(self) -> dict:
        out = {"class": self.label, "evidence": [o.as_dict() for o in self.evidence]}
        if self.certificate is not None and self.certificate.contained:
            w = self.certificate.weights
            V = self.certificate.vertices
            out["certificate"] = [
                {"weight": float(w[i]), "vertex": [float(x) for x in V[:, i]]}
                for i in range(len(w)) if w[i] > 1e-12
            ]
        return out


def _bipartite(rho: DenseState, cut: Sequence[int] | None = None) -> tuple[np.ndarray, tuple[int, int]]:
    """Entries and (dA, dB) with subsystems in ``cut`` grouped as A."""
    dims = rho.dims
    if cut is None:
        if len(dims) != 2:
            raise InputError("state has more than two subsystems; declare a bipartition cut")
        return rho.entries, dims
    A = sorted(set(int(i) for i in cut))
    if not A or len(A) == len(dims) or A[0] < 0 or A[-1] >= len(dims):
        raise InputError(f"invalid cut {cut}")
    B = [i for i in range(len(dims)) if i not in A]
    order = A + B
    n = len(dims)
    dA = int(np.prod([dims[i] for i in A]))
    dB = int(np.prod([dims[i] for i in B]))
    t = rho.entries.reshape(dims + dims).transpose(order + [i + n for i in order])
    return t.reshape(dA * dB, dA * dB), (dA, dB)


def ppt_check(rho: DenseState, cut: Sequence[int] | None = None) -> CriterionOutcome:
    r, dims = _bipartite(rho, cut)
    lam = float(np.linalg.eigvalsh(partial_transpose_array(r, dims, 1))[0])
    return CriterionOutcome("ppt", lam < -EIG_TOL, lam, -EIG_TOL)


def _realign_array(r: np.ndarray, dims) -> np.ndarray:
    dA, dB = dims
    return r.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)


def realignment_check(rho: DenseState, cut: Sequence[int] | None = None) -> CriterionOutcome:
    r, dims = _bipartite(rho, cut)
    tn = trace_norm(_realign_array(r, dims))
    return CriterionOutcome("realignment", tn > 1 + FIRE_TOL, tn, 1.0)


def reduction_check(rho: DenseState, cut: Sequence[int] | None = None) -> CriterionOutcome:
    r, (dA, dB) = _bipartite(rho, cut)
    rhoB = np.trace(r.reshape(dA, dB, dA, dB), axis1=0, axis2=2)
    lam = float(np.linalg.eigvalsh(np.kron(np.eye(dA), rhoB) - r)[0])
    return CriterionOutcome("reduction", lam < -EIG_TOL, lam, -EIG_TOL)


# ------------------------------------------------------ correlation tensor

@lru_cache(maxsize=16)
def gell_mann_basis(d: int) -> np.ndarray:
    """Hilbert-Schmidt orthonormal Hermitian basis, element 0 = 1/sqrt(d)."""
    G = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            M = np.zeros((d, d), dtype=np.complex128)
            M[j, k] = M[k, j] = 1 / np.sqrt(2)
            G.append(M)
            M = np.zeros((d, d), dtype=np.complex128)
            M[j, k] = -1j / np.sqrt(2)
            M[k, j] = 1j / np.sqrt(2)
            G.append(M)
    for l in range(1, d):
        M = np.zeros((d, d), dtype=np.complex128)
        M[np.arange(l), np.arange(l)] = 1
        M[l, l] = -l
        G.append(M / np.sqrt(l * (l + 1)))
    out = np.array(G)
    out.setflags(write=False)
    return out


def correlation_tensor(rho: DenseState, cut=None) -> np.ndarray:
    """C_{ab} = Tr(rho G_a (x) G_b)."""
    r, (dA, dB) = _bipartite(rho, cut)
    GA, GB = gell_mann_basis(dA), gell_mann_basis(dB)
    r4 = r.reshape(dA, dB, dA, dB)
    return np.real(np.einsum("aji,blk,ikjl->ab", GA, GB, r4))


def _ct_score(C: np.ndarray, dims, x: float, y: float) -> tuple[float, float]:
    dA, dB = dims
    Dx = np.ones(C.shape[0])
    Dy = np.ones(C.shape[1])
    Dx[0] = x
    Dy[0] = y
    tn = trace_norm(Dx[:, None] * C * Dy[None, :])
    bound = np.sqrt((dA - 1 + x * x) / dA) * np.sqrt((dB - 1 + y * y) / dB)
    return tn, bound


def correlation_tensor_check(rho: DenseState, x: float = 1.0, y: float = 1.0, cut=None) -> CriterionOutcome:
    if x < 0 or y < 0:
        raise InputError("x and y must be nonnegative")
    _, dims = _bipartite(rho, cut)
    tn, bound = _ct_score(correlation_tensor(rho, cut), dims, x, y)
    score = tn - bound
    return CriterionOutcome("correlation_tensor", score > FIRE_TOL, score, 0.0, f"x={x!r},y={y!r}")


def default_ct_grid(dA: int, dB: int) -> list[tuple[float, float]]:
    """Special points (0,0), (1,1), (sqrt(dA+1), sqrt(dB+1)) plus a 5x5 grid."""
    pts = [(0.0, 0.0), (1.0, 1.0), (float(np.sqrt(dA + 1)), float(np.sqrt(dB + 1)))]
    xs = np.concatenate([[0.0], np.geomspace(0.1, np.sqrt(dA + 1), 4)])
    ys = np.concatenate([[0.0], np.geomspace(0.1, np.sqrt(dB + 1), 4)])
    pts += [(float(x), float(y)) for x in xs for y in ys]
    return pts


def correlation_tensor_scan(rho: DenseState, grid=None, cut=None) -> CriterionOutcome:
    _, dims = _bipartite(rho, cut)
    C = correlation_tensor(rho, cut)
    grid = default_ct_grid(*dims) if grid is None else grid
    best, where = -np.inf, None
    for x, y in grid:
        tn, bound = _ct_score(C, dims, x, y)
        if tn - bound > best:
            best, where = tn - bound, (x, y)
    return CriterionOutcome("correlation_tensor", best > FIRE_TOL, float(best), 0.0,
                            f"best at x={where[0]!r},y={where[1]!r}")


# --------------------------------------------------------------- SIC based

def _povm_tensor(rho: DenseState, EA: np.ndarray, EB: np.ndarray) -> np.ndarray:
    dA, dB = rho.dims
    r4 = rho.entries.reshape(dA, dB, dA, dB)
    return np.real(np.einsum("aji,blk,ikjl->ab", EA, EB, r4))


def esic_check(rho: DenseState, sicA: SICSet | None = None, sicB: SICSet | None = None) -> CriterionOutcome:
    """Trace norm of P_ab = Tr(E_a (x) E_b rho) with SIC POVM elements E = Pi/d."""
    if len(rho.dims) != 2:
        raise InputError("bipartite state required")
    dA, dB = rho.dims
    sicA = sicA or sic_set(dA)
    sicB = sicB or sic_set(dB)
    if sicA.d != dA or sicB.d != dB:
        raise InputError("SIC dimensions do not match the state")
    tn = trace_norm(_povm_tensor(rho, sicA.povm, sicB.povm))
    bound = 2 / np.sqrt(dA * (dA + 1) * dB * (dB + 1))
    return CriterionOutcome("esic", tn > bound + FIRE_TOL, tn, float(bound))


def gsic_check(rho: DenseState, gA: GSICSet, gB: GSICSet) -> CriterionOutcome:
    dA, dB = rho.dims
    if gA.d != dA or gB.d != dB:
        raise InputError("GSIC dimensions do not match the state")
    tn = trace_norm(_povm_tensor(rho, gA.elements, gB.elements))
    bound = np.sqrt((gA.a * dA ** 2 + 1) / (dA * (dA + 1))) * np.sqrt((gB.a * dB ** 2 + 1) / (dB * (dB + 1)))
    return CriterionOutcome("gsic", tn > bound + FIRE_TOL, tn, float(bound))


# -------------------------------------------------------------- quasi-pure

def _antisym_both(t: np.ndarray) -> np.ndarray:
    # t indexed (A1, B1, A2, B2); apply P_-^{A1A2} (x) P_-^{B1B2}
    tA = 0.5 * (t - t.transpose(2, 1, 0, 3))
    return 0.5 * (tA - tA.transpose(0, 3, 2, 1))


def quasi_pure_concurrence(rho: DenseState) -> CriterionOutcome:
    """General quasi-pure approximation of the concurrence.

    chi is the normalized projection of |psi0>|psi0> onto the antisymmetric
    subspaces of both parties; T_ij = sqrt(l_i l_j) <psi_i psi_j|chi>.
    """
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise InputError("quasi-pure concurrence needs two subsystems of equal dimension")
    d = rho.dims[0]
    lam, V = np.linalg.eigh(rho.entries)
    lam, V = lam[::-1], V[:, ::-1]
    if lam[0] - lam[1] < 1e-12:
        raise InputError("dominant eigenvalue is degenerate")
    psi0 = V[:, 0]
    pp = np.kron(psi0, psi0).reshape(d, d, d, d)
    chi = _antisym_both(pp)
    nrm2 = float(np.real(np.vdot(pp, chi)))
    if nrm2 < 1e-14:
        return CriterionOutcome("quasi_pure", False, 0.0, 0.0, "product dominant eigenvector")
    chi = chi.reshape(d * d, d * d) / np.sqrt(nrm2)
    lam = np.clip(lam, 0, None)
    T = np.sqrt(np.outer(lam, lam)) * (V.conj().T @ chi @ V.conj())
    S = np.linalg.svd(T, compute_uv=False)
    score = max(0.0, float(S[0] - S[1:].sum()))
    return CriterionOutcome("quasi_pure", score > FIRE_TOL, score, 0.0)


def quasi_pure_simplex(s: SimplexState) -> CriterionOutcome:
    """Closed form on the Magic Simplex; ties in the largest weight go to the smallest (k, l)."""
    if not s.basis.is_standard:
        raise InputError("closed form needs the standard Bell basis")
    score = float(_kernels.quasi_pure_closed(s.coeffs[None])[0])
    return CriterionOutcome("quasi_pure", score > FIRE_TOL, score, 0.0, "closed form")


# ------------------------------------------------------------------- range

def range_check(rho: DenseState, restarts: int = 100, seed: int = 0) -> CriterionOutcome:
    """Heuristic range criterion: no product vector in the range => entangled."""
    lam, V = np.linalg.eigh(rho.entries)
    R = V[:, lam > EIG_TOL]
    Pi = R @ R.conj().T
    best, *_ = product_extremum(Pi, rho.dims, True, restarts, 500, 1e-12, seed)
    score = 1.0 - best
    return CriterionOutcome("range", score > 1e-6, score, 1e-6, "range-criterion (heuristic)")


# --------------------------------------------------------------- classifier

CRITERIA_ORDER = ("ppt", "reduction", "realignment", "correlation_tensor", "esic", "quasi_pure", "range")


def classify(rho: DenseState, simplex: SimplexState | None = None, heuristics: bool = False,
             cut: Sequence[int] | None = None) -> Verdict:
    """Fuse the criteria into a Verdict.

    Separable is only claimed with a kernel-polytope certificate, which
    needs the simplex form in the standard basis.
    """
    if simplex is not None and simplex.d ** 2 != rho.dim:
        raise InputError("simplex form does not match the state")
    ev = [ppt_check(rho, cut), reduction_check(rho, cut), realignment_check(rho, cut),
          correlation_tensor_scan(rho, cut=cut)]
    bip = cut is None and len(rho.dims) == 2
    if bip:
        try:
            ev.append(esic_check(rho))
        except InputError:
            pass
        if rho.dims[0] == rho.dims[1]:
            if simplex is not None and simplex.basis.is_standard:
                ev.append(quasi_pure_simplex(simplex))
            else:
                try:
                    ev.append(quasi_pure_concurrence(rho))
                except InputError as exc:
                    ev.append(CriterionOutcome("quasi_pure", False, 0.0, 0.0, f"skipped: {exc}"))
        if heuristics:
            ev.append(range_check(rho))
    ev.sort(key=lambda o: CRITERIA_ORDER.index(o.criterion))
    if ev[0].fired:
        return Verdict(NPT, tuple(ev))
    if any(o.fired for o in ev[1:]):
        return Verdict(BOUND, tuple(ev))
    if simplex is not None and simplex.basis.is_standard:
        cert = kernel_contains(simplex)
        if cert.contained:
            return Verdict(SEPARABLE, tuple(ev), cert)
    return Verdict(UNDETERMINED, tuple(ev))


def classify_simplex(s: SimplexState, heuristics: bool = False) -> Verdict:
    return classify(s.to_dense(), s, heuristics)


# ------------------------------------------------------- batched (survey)

SIMPLEX_CHAIN = ("ppt", "realignment", "quasi_pure", "kernel")


def classify_coeffs_batch(C: np.ndarray, basis: BellBasis, chain: Sequence[str] = SIMPLEX_CHAIN) -> np.ndarray:
    """Labels for many Bell-diagonal states at once (same rules as ``classify``).

    ``C`` has shape (N, d, d).  Criteria needing the standard basis
    (closed-form quasi-pure, kernel certificate) are skipped otherwise.
    """
    chain = tuple(chain)
    if "ppt" not in chain:
        raise InputError("criteria chain must include ppt")
    unknown = set(chain) - {"ppt", "realignment", "quasi_pure", "kernel", "reduction", "esic"}
    if unknown:
        raise InputError(f"unknown criteria {sorted(unknown)}")
    N, d, _ = C.shape
    V = basis.vectors()
    rho = np.einsum("nk,ka,kb->nab", C.reshape(N, d * d), V, V.conj())
    pt = rho.reshape(N, d, d, d, d).transpose(0, 1, 4, 3, 2).reshape(N, d * d, d * d)
    mins = np.linalg.eigvalsh(pt)[:, 0]
    labels = np.full(N, UNDETERMINED, dtype=object)
    npt = mins < -EIG_TOL
    labels[npt] = NPT
    ppt_idx = np.flatnonzero(~npt)
    if ppt_idx.size == 0:
        return labels
    detected = np.zeros(ppt_idx.size, dtype=bool)
    sub = rho[ppt_idx]
    if "realignment" in chain:
        R = sub.reshape(-1, d, d, d, d).transpose(0, 1, 3, 2, 4).reshape(-1, d * d, d * d)
        detected |= np.linalg.svd(R, compute_uv=False).sum(axis=1) > 1 + FIRE_TOL
    if "reduction" in chain:
        rhoB = np.trace(sub.reshape(-1, d, d, d, d), axis1=1, axis2=3)
        red = np.einsum("ij,nab->niajb", np.eye(d), rhoB).reshape(-1, d * d, d * d) - sub
        detected |= np.linalg.eigvalsh(red)[:, 0] < -EIG_TOL
    if "esic" in chain:
        try:
            sic = sic_set(d)
            E = sic.povm
            P = np.real(np.einsum("aji,blk,nikjl->nab", E, E, sub.reshape(-1, d, d, d, d)))
            detected |= np.linalg.svd(P, compute_uv=False).sum(axis=1) > 2 / (d * (d + 1)) + FIRE_TOL
        except InputError:
            pass
    if "quasi_pure" in chain and basis.is_standard:
        detected |= _kernels.quasi_pure_closed(C[ppt_idx]) > FIRE_TOL
    labels[ppt_idx[detected]] = BOUND
    if "kernel" in chain and basis.is_standard:
        for i in ppt_idx[~detected]:
            if kernel_contains_coeffs(C[i], d).contained:
                labels[i] = SEPARABLE
    return labels
