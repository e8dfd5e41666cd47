"""Named states and constructive families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _data
from .bell import BellBasis, SimplexState, omega00
from .errors import InputError, ValidationError
from .linalg import DenseState, maximally_mixed
from .witnesses import product_extremum


def isotropic(d: int, p: float) -> DenseState:
    """p P_00 + (1-p) 1/d^2."""
    d = int(d)
    if not -1.0 / (d * d - 1) - 1e-12 <= p <= 1 + 1e-12:
        raise InputError(f"p={p} outside the PSD range [-1/(d^2-1), 1]")
    w = omega00(d)
    return DenseState((d, d), p * np.outer(w, w) + (1 - p) * np.eye(d * d) / d ** 2)


def rho_bound() -> DenseState:
    """Qutrit-qutrit PPT entangled state that violates a Bell inequality."""
    raw = _data.load("bell_violation.json")
    return DenseState(tuple(raw["dims"]), _data.radical_matrix(raw["rho_bound"]))


def _simplex3(c) -> SimplexState:
    return SimplexState(BellBasis.standard(3), np.asarray(c, dtype=float))


def _fe(F0: float, l: int) -> SimplexState:
    if not 0 < F0 < 1:
        raise InputError("F0 must lie in (0, 1)")
    c = np.zeros((3, 3))
    c[0, 0] = F0
    c[:, l] += (1 - F0) / 3
    return _simplex3(c)


def activation_fe(F0: float) -> SimplexState:
    """F0 P_00 + (1-F0)/3 sum_i P_{i,1}."""
    return _fe(F0, 1)


def activation_fe_tilde(F0: float) -> SimplexState:
    """F0 P_00 + (1-F0)/3 sum_i P_{i,2}."""
    return _fe(F0, 2)


def activation_be(alpha: float) -> SimplexState:
    """2/7 P_00 + alpha/21 sum_i P_{i,1} + (5-alpha)/21 sum_i P_{i,2}."""
    if not 0 <= alpha <= 5:
        raise InputError("alpha must lie in [0, 5]")
    c = np.zeros((3, 3))
    c[0, 0] = 2 / 7
    c[:, 1] += alpha / 21
    c[:, 2] += (5 - alpha) / 21
    return _simplex3(c)


def _checked(c: np.ndarray) -> SimplexState:
    if c.min() < -1e-12:
        raise InputError("parameters leave the simplex (negative coefficient)")
    return _simplex3(np.clip(c, 0, None))


def experiment_family_A(alpha: float, beta: float) -> SimplexState:
    """(1-a-b)/9 1 + a P_00 + b P_10."""
    c = np.full((3, 3), (1 - alpha - beta) / 9)
    c[0, 0] += alpha
    c[1, 0] += beta
    return _checked(c)


def experiment_family_B(alpha: float, beta: float, gamma: float) -> SimplexState:
    """(1-a/5-b/4-g)/9 1 + a/5 P_00 + b/8 (P_10+P_20) + g/3 sum_i P_{i,1}."""
    c = np.full((3, 3), (1 - alpha / 5 - beta / 4 - gamma) / 9)
    c[0, 0] += alpha / 5
    c[1, 0] += beta / 8
    c[2, 0] += beta / 8
    c[:, 1] += gamma / 3
    return _checked(c)


GAMMA_B1 = -1 / np.sqrt(3)
GAMMA_B2 = -0.83


def experiment_B1() -> SimplexState:
    """The slice-B1 point realized in the qutrit MUB experiment."""
    return experiment_family_B(-0.07, -1.73, GAMMA_B1)


# ---------------------------------------------------------------------- UPB

@dataclass(frozen=True)
class UPB:
    """Orthogonal product set; ``members[j][p]`` is party p's vector of member j."""

    dims: tuple
    members: tuple = field(repr=False)
    name: str = "custom"

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        if len(dims) == 2 and min(dims) == 2:
            raise InputError("no UPB exists in 2 x n")
        members = tuple(tuple(np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in m)
                        for m in self.members)
        if any(len(m) != len(dims) or any(v.size != d for v, d in zip(m, dims)) for m in members):
            raise InputError("member vectors do not match party dims")
        n = len(members)
        D = int(np.prod(dims))
        m_min = 1 + sum(d - 1 for d in dims)
        if n < m_min:
            raise InputError(f"{n} members; a UPB needs at least {m_min}")
        if n > D - 4:
            raise InputError(f"{n} members; a UPB has at most D-4 = {D - 4}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "members", members)
        G = self.product_vectors()
        G = np.abs(G.conj() @ G.T)
        if np.abs(G - np.eye(n)).max() > 1e-10:
            raise ValidationError("UPB members are not pairwise orthogonal")

    @property
    def m(self) -> int:
        return len(self.members)

    def product_vectors(self) -> np.ndarray:
        out = []
        for m in self.members:
            v = np.ones(1, dtype=np.complex128)
            for part in m:
                v = np.kron(v, part)
            out.append(v)
        return np.array(out)


def load_upb(name: str = "tiles") -> UPB:
    raw = _data.load(f"upb_{name}.json")
    parties = [_data.complex_columns(p).T for p in raw["parties"]]
    members = tuple(tuple(p[j] for p in parties) for j in range(len(parties[0])))
    return UPB(tuple(raw["dims"]), members, raw["name"])


def upb_projector_complement(upb: UPB) -> np.ndarray:
    V = upb.product_vectors()
    return np.eye(V.shape[1]) - V.T @ V.conj()


def upb_state(upb: UPB) -> DenseState:
    """(1 - sum_j |phi_j><phi_j|) / (D - m)."""
    D = int(np.prod(upb.dims))
    return DenseState(upb.dims, upb_projector_complement(upb) / (D - upb.m))


def product_vector_search(Pi: np.ndarray, dims, restarts: int = 100, seed: int = 0) -> float:
    """Best <ab|Pi|ab> over product vectors (heuristic unextendibility evidence)."""
    Pi = np.asarray(Pi, dtype=np.complex128)
    if np.abs(Pi @ Pi - Pi).max() > 1e-8:
        raise InputError("operator is not a projector")
    if len(dims) != 2:
        raise InputError("bipartite subspace required")
    best, *_ = product_extremum(Pi, dims, True, restarts, 1000, 1e-12, seed)
    return best


# ---------------------------------------------------------- conversion aid

def conversion_assist(m: int, d: int) -> DenseState:
    """PPT state assisting |Omega^m> -> |Omega^d> conversion.

    Subsystems (A1, A2, B1, B2) with dims (d, m, d, m); the PPT cut is
    A1A2 | B1B2.  Normalized by its trace.
    """
    m, d = int(m), int(d)
    if not 2 <= m <= d:
        raise InputError("need 2 <= m <= d")
    Pd = np.outer(omega00(d), omega00(d))
    Pm = np.outer(omega00(m), omega00(m))
    # built in (A1 B1)(A2 B2) order, then reordered to A1 A2 B1 B2
    s = (m - 1) * np.kron(Pd, Pm) + np.kron(np.eye(d * d) - Pd, np.eye(m * m) - Pm) / (d + 1)
    s = s.reshape(d, d, m, m, d, d, m, m).transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d * d * m * m, -1)
    return DenseState((d, m, d, m), s / np.trace(s).real)


CONVERSION_CUT = (0, 1)


# ------------------------------------------------------------------ catalog

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable
    params: dict
    note: str


def _bell(d=3, k=0, l=0):
    from .bell import bell_projector
    return bell_projector(int(k), int(l), BellBasis.standard(int(d)))


CATALOG = {
    "isotropic": CatalogEntry("isotropic", isotropic, {"d": 3, "p": 0.5}, "p P_00 + (1-p) 1/d^2"),
    "rho_bound": CatalogEntry("rho_bound", rho_bound, {}, "Bell-violating PPT entangled qutrit pair"),
    "activation_fe": CatalogEntry("activation_fe", activation_fe, {"F0": 0.5}, "free entangled activation target"),
    "activation_fe_tilde": CatalogEntry("activation_fe_tilde", activation_fe_tilde, {"F0": 0.5}, "tilde-variant target"),
    "activation_be": CatalogEntry("activation_be", activation_be, {"alpha": 1.5}, "activating qutrit state"),
    "experiment_A": CatalogEntry("experiment_A", experiment_family_A, {"alpha": 0.0, "beta": 0.0}, "slice family A"),
    "experiment_B": CatalogEntry("experiment_B", experiment_family_B, {"alpha": -0.07, "beta": -1.73, "gamma": GAMMA_B1}, "slice family B"),
    "experiment_B1": CatalogEntry("experiment_B1", experiment_B1, {}, "MUB experiment state"),
    "upb_tiles": CatalogEntry("upb_tiles", lambda: upb_state(load_upb("tiles")), {}, "Tiles UPB bound entangled state"),
    "conversion_assist": CatalogEntry("conversion_assist", conversion_assist, {"m": 2, "d": 3}, "PPT across A1A2|B1B2"),
    "maximally_mixed": CatalogEntry("maximally_mixed", lambda d=3: maximally_mixed((int(d), int(d))), {"d": 3}, "1/d^2"),
    "bell": CatalogEntry("bell", _bell, {"d": 3, "k": 0, "l": 0}, "standard Bell projector P_kl"),
}

_INT_PARAMS = {"d", "m", "k", "l"}


def build(name: str, **params):
    """Build a catalog state; returns DenseState or SimplexState."""
    entry = CATALOG.get(name)
    if entry is None:
        raise InputError(f"unknown state {name!r}; known: {sorted(CATALOG)}")
    unknown = set(params) - set(entry.params)
    if unknown:
        raise InputError(f"unknown parameters for {name}: {sorted(unknown)}")
    kw = dict(entry.params)
    kw.update(params)
    kw = {k: (int(v) if k in _INT_PARAMS else float(v)) for k, v in kw.items()}
    return entry.builder(**kw)
