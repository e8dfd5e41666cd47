"""Teleportation bounds, the qutrit activation protocol, Choi duality, QFI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bell import omega00
from .errors import InputError, ValidationError
from .linalg import DenseState, HermitianOperator


def singlet_fraction(rho: DenseState) -> float:
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise InputError("singlet fraction needs two subsystems of equal dimension")
    w = omega00(rho.dims[0])
    return float(np.real(w @ rho.entries @ w))


def max_teleport_fidelity(F: float, d: int) -> float:
    """Optimal teleportation fidelity (dF + 1)/(d + 1)."""
    if not 0 <= F <= 1:
        raise InputError("singlet fraction must lie in [0, 1]")
    return (d * F + 1) / (d + 1)


def measure_prepare_fidelity(d: int) -> float:
    """Best fidelity of the classical measure-and-prepare strategy."""
    if d < 2:
        raise InputError("d must be >= 2")
    return 2 / (d + 1)


# -------------------------------------------------------------- activation

def xor_gate(d: int) -> np.ndarray:
    """U_XOR |i>|j> = |i>|j+i> on (control, target)."""
    U = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            U[i * d + (j + i) % d, i * d + j] = 1.0
    return U


def activation_step_simulate(rho_free: DenseState, rho_act: DenseState) -> tuple[float, DenseState]:
    """One round: local XORs on A1A2 and B1B2, measure A2 and B2, keep equal outcomes.

    ``rho_free`` lives on A1B1 (control pair) and ``rho_act`` on A2B2.
    Returns the exact success probability and the normalized state on A1B1.
    """
    if len(rho_free.dims) != 2 or rho_free.dims != rho_act.dims or rho_free.dims[0] != rho_free.dims[1]:
        raise InputError("both states must be d x d bipartite with the same d")
    d = rho_free.dims[0]
    joint = np.kron(rho_free.entries, rho_act.entries)  # A1 B1 A2 B2
    J = joint.reshape([d] * 8).transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d ** 4, d ** 4)  # A1 A2 B1 B2
    U = np.kron(xor_gate(d), xor_gate(d))
    J = U @ J @ U.T
    t = J.reshape([d] * 8)  # a1 a2 b1 b2 | a1' a2' b1' b2'
    post = np.zeros((d, d, d, d), dtype=np.complex128)
    for o in range(d):
        # project A2 = B2 = o on both sides, trace them out
        post += t[:, o, :, o, :, o, :, o]
    p = float(np.real(np.einsum("abab->", post)))
    if p <= 0:
        raise ValidationError("postselection has zero probability")
    return p, DenseState((d, d), post.reshape(d * d, d * d) / p)


def activation_step_closed_form(F: float, alpha: float, variant: str = "standard") -> tuple[float, float]:
    """Success probability and new singlet fraction of one activation round."""
    if not 0 < F < 1:
        raise InputError("F must lie in (0, 1)")
    if not 0 <= alpha <= 5:
        raise InputError("alpha must lie in [0, 5]")
    if variant == "standard":
        x = 5 - alpha
    elif variant == "tilde":
        x = alpha
    else:
        raise InputError("variant must be 'standard' or 'tilde'")
    den = 2 * F + (1 - F) * x
    return den / 7, 2 * F / den


@dataclass(frozen=True)
class ActivationRound:
    round: int
    F: float
    P: float
    cumulative: float


@dataclass(frozen=True)
class ActivationTrace:
    F0: float
    alpha: float
    variant: str
    rounds: tuple = field(default=())
    boosting: bool = True
    max_check_error: float | None = None

    def fidelities(self) -> list[float]:
        return [self.F0] + [r.F for r in self.rounds]


def run_activation(F0: float, alpha: float, rounds: int, variant: str = "standard",
                   cross_check: bool = False) -> ActivationTrace:
    """Iterate the closed form; optionally verify each round with the simulator."""
    from .zoo import activation_be, activation_fe, activation_fe_tilde

    if rounds < 0:
        raise InputError("rounds must be >= 0")
    F, cum = F0, 1.0
    out = []
    err = 0.0 if cross_check else None
    for n in range(1, rounds + 1):
        P, Fn = activation_step_closed_form(F, alpha, variant)
        if cross_check:
            free = (activation_fe if variant == "standard" else activation_fe_tilde)(F).to_dense()
            p_sim, post = activation_step_simulate(free, activation_be(alpha).to_dense())
            err = max(err, abs(p_sim - P), abs(singlet_fraction(post) - Fn))
        cum *= P
        out.append(ActivationRound(n, Fn, P, cum))
        F = Fn
        if F >= 1 - 1e-15:
            break
    boosting = bool(out) and out[0].F > F0
    return ActivationTrace(F0, alpha, variant, tuple(out), boosting, err)


# -------------------------------------------------------------------- Choi

@dataclass(frozen=True)
class QuantumChannel:
    """Linear map on d_in x d_in matrices, given by Kraus operators or a Choi matrix.

    The Choi matrix is J = sum_ij E(|i><j|) (x) |i><j| (output first).
    """

    d_in: int
    d_out: int
    kraus: tuple | None = field(default=None, repr=False)
    choi: np.ndarray | None = field(default=None, repr=False)
    name: str = "custom"

    def __post_init__(self):
        if (self.kraus is None) == (self.choi is None):
            raise InputError("give exactly one of kraus or choi")
        if self.kraus is not None:
            ks = tuple(np.asarray(K, dtype=np.complex128) for K in self.kraus)
            if any(K.shape != (self.d_out, self.d_in) for K in ks):
                raise InputError("Kraus operator shape mismatch")
            tp = sum(K.conj().T @ K for K in ks)
            if np.abs(tp - np.eye(self.d_in)).max() > 1e-9:
                raise ValidationError("Kraus operators are not trace preserving")
            object.__setattr__(self, "kraus", ks)
        else:
            J = np.asarray(self.choi, dtype=np.complex128)
            D = self.d_in * self.d_out
            if J.shape != (D, D):
                raise InputError("Choi matrix shape mismatch")
            object.__setattr__(self, "choi", J)

    def apply(self, X: np.ndarray) -> np.ndarray:
        if self.kraus is not None:
            return sum(K @ X @ K.conj().T for K in self.kraus)
        J = self.choi.reshape(self.d_out, self.d_in, self.d_out, self.d_in)
        # E(X) = sum_ij X_ij E(|i><j|) = Tr_in[J (1 (x) X^T)]
        return np.einsum("aibj,ij->ab", J, X)

    def choi_matrix(self) -> np.ndarray:
        if self.choi is not None:
            return self.choi
        d = self.d_in
        J = np.zeros((self.d_out * d, self.d_out * d), dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                E = np.zeros((d, d))
                E[i, j] = 1.0
                J += np.kron(self.apply(E), E)
        return J

    def is_cp(self, tol: float = 1e-10) -> bool:
        return bool(np.linalg.eigvalsh(self.choi_matrix())[0] >= -tol)


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel(d, d, kraus=(np.eye(d),), name="identity")


def depolarizing_channel(d: int, p: float = 1.0) -> QuantumChannel:
    """X -> (1-p) X + p Tr(X) 1/d, via the Weyl Kraus set."""
    from .bell import weyl_operator
    if not 0 <= p <= 1 + 1 / (d * d - 1):
        raise InputError("p outside the CP range")
    ks = [np.sqrt(1 - p + p / d ** 2) * np.eye(d)]
    ks += [np.sqrt(p) / d * weyl_operator(k, l, d) for k in range(d) for l in range(d) if (k, l) != (0, 0)]
    return QuantumChannel(d, d, kraus=tuple(ks), name="depolarizing")


def transpose_map(d: int) -> QuantumChannel:
    """Transposition: positive, trace preserving, not completely positive."""
    J = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            J[j * d + i, i * d + j] = 1.0
    return QuantumChannel(d, d, choi=J, name="transpose")


def choi_matrix(E: QuantumChannel) -> np.ndarray:
    """Unnormalized J(E) = sum E(|i><j|) (x) |i><j|."""
    return E.choi_matrix()


def choi_state(E: QuantumChannel) -> DenseState:
    """J(E)/d_in as a density matrix; raises if E is not CP."""
    J = E.choi_matrix()
    lam = np.linalg.eigvalsh(J)[0]
    if lam < -1e-10:
        raise ValidationError(f"map is not completely positive (Choi eigenvalue {lam:.3g})")
    return DenseState((E.d_out, E.d_in), J / E.d_in)


def state_from_channel(E: QuantumChannel) -> DenseState:
    """(E (x) id) P_00: send one half of a maximally entangled pair through E."""
    d = E.d_in
    w = omega00(d)
    P = np.outer(w, w).reshape(d, d, d, d)
    out = np.zeros((E.d_out, d, E.d_out, d), dtype=np.complex128)
    for b in range(d):
        for b2 in range(d):
            out[:, b, :, b2] = E.apply(P[:, b, :, b2])
    D = E.d_out * d
    J = out.reshape(D, D)
    if np.linalg.eigvalsh(0.5 * (J + J.conj().T))[0] < -1e-10:
        raise ValidationError("map is not completely positive")
    return DenseState((E.d_out, d), J)


# --------------------------------------------------------------------- QFI

def qfi(rho: DenseState, H) -> float:
    """F_Q = 2 sum (l_i - l_j)^2/(l_i + l_j) |<i|H|j>|^2 over l_i + l_j > 1e-12."""
    Hm = H.entries if isinstance(H, HermitianOperator) else np.asarray(H)
    if Hm.shape != rho.entries.shape:
        raise InputError("dimension mismatch")
    lam, V = np.linalg.eigh(rho.entries)
    lam = np.clip(lam, 0, None)
    Hb = np.abs(V.conj().T @ Hm @ V) ** 2
    s = lam[:, None] + lam[None, :]
    mask = s > 1e-12
    num = (lam[:, None] - lam[None, :]) ** 2
    return float(2 * np.sum(np.where(mask, num / np.where(mask, s, 1.0), 0.0) * Hb))


def qfi_upper_bound(rho: DenseState, H) -> float:
    """4 (<H^2> - <H>^2)."""
    Hm = H.entries if isinstance(H, HermitianOperator) else np.asarray(H)
    r = rho.entries
    m1 = np.real(np.trace(r @ Hm))
    m2 = np.real(np.trace(r @ Hm @ Hm))
    return float(4 * (m2 - m1 * m1))


def local_generator(dims: Sequence[int]) -> HermitianOperator:
    """H = sum_p 1 (x) .. (x) diag(0..d_p-1) (x) .. (x) 1."""
    dims = tuple(int(x) for x in dims)
    D = int(np.prod(dims))
    H = np.zeros((D, D))
    for p, d in enumerate(dims):
        ops = [np.eye(x) for x in dims]
        ops[p] = np.diag(np.arange(d, dtype=float))
        t = np.ones((1, 1))
        for o in ops:
            t = np.kron(t, o)
        H += t
    return HermitianOperator(dims, H)
