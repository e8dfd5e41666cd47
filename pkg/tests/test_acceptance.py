"""Acceptance checks, one per criterion.

Run directly for a PASS/FAIL summary:

    python3 tests/test_acceptance.py

Under pytest each criterion is its own test and prints its line (see with -s).
"""

from __future__ import annotations

import sys
import time

import numpy as np
import pytest

from boundlab import criteria, protocols, survey, witnesses, zoo
from boundlab.bell import BellBasis, SimplexState, weyl_operator, omega
from boundlab.criteria import BOUND, NPT, SEPARABLE
from boundlab.linalg import DenseState, partial_transpose, random_separable, random_pure


def _line(n: int, ok: bool, msg: str, elapsed: float, limit: float | None) -> str:
    lim = f" (limit {limit:g}s)" if limit else ""
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {msg} [{elapsed:.2f}s{lim}]"


def crit1():
    v = witnesses.bell_violation_value()
    return abs(v - (-0.000263144)) <= 1e-6, f"Tr(W rho_bound) = {v:.9f}"


def crit2():
    rho = zoo.rho_bound()
    lam = float(np.linalg.eigvalsh(partial_transpose(rho).entries)[0])
    tn = criteria.realignment_check(rho).score
    label = criteria.classify(rho).label
    ok = lam >= -1e-10 and tn > 1 and label == BOUND
    return ok, f"min eig PT = {lam:.3g}, realigned norm = {tn:.6f}, class = {label}"


def crit3():
    mubs = witnesses.build_mub_set(3, 4)
    terms = witnesses.correlation_terms(zoo.experiment_B1().to_dense(), mubs, s=2, conjugate=True)
    ok = (abs(terms[0] - 0.675) <= 0.002 and np.all(np.abs(terms[1:] - 0.468) <= 0.002)
          and abs(terms.sum() - 2.079) <= 0.004)
    return ok, "C = " + ", ".join(f"{t:.6f}" for t in terms) + f"; sum = {terms.sum():.6f}"


def _window(K, d):
    return witnesses.separability_window(K, (d, d), restarts=200, iterations=500, seed=0)


def crit4():
    rows = []
    ok = True

    def check(tag, win, L, U):
        nonlocal ok
        good = (L is None or abs(win.L - L) <= 1e-3) and abs(win.U - U) <= 1e-3
        ok &= good
        rows.append(f"{tag} L={win.L:.4f} U={win.U:.4f}")

    for d, m, L, U in [(2, 2, 0.5, 1.5), (2, 3, 1.0, 2.0), (3, 4, 1.0, 2.0)]:
        check(f"MUB d={d} m={m}", _window(witnesses.mub_operator(witnesses.build_mub_set(d, m)), d), L, U)
    Ls = set()
    for name in witnesses.BUNDLED_MUB_SETS:
        win = _window(witnesses.mub_operator(witnesses.bundled_mub_set(name, 3)), 4)
        check(f"MUB d=4 m=3 {name}", win, None, 1.5)
        Ls.add(round(win.L, 3))
    if Ls != {0.25, 0.5}:
        ok = False
    check("SIC d=2 m=3", _window(witnesses.sic_operator(witnesses.sic_set(2), [0, 1, 2]), 2), 0.266, 1.333)
    check("SIC d=3 m=9", _window(witnesses.sic_operator(witnesses.sic_set(3)), 3), 0.75, 1.5)
    return ok, "; ".join(rows) + f"; d=4 L values {sorted(Ls)}"


def crit5():
    r2 = survey.run_survey(survey.SurveyConfig(2, 20000, seed=0))
    r3 = survey.run_survey(survey.SurveyConfig(3, 20000, seed=0))
    r4 = survey.run_survey(survey.SurveyConfig(4, 20000, seed=0))
    f = lambda r, k: r.frequency(k)
    ok = (abs(f(r2, "PPT") - 0.50) <= 0.01 and r2.counts[BOUND] == 0
          and abs(f(r3, "PPT") - 0.39) <= 0.01 and abs(f(r3, NPT) - 0.61) <= 0.01 and f(r3, BOUND) >= 0.04
          and abs(f(r4, "PPT") - 0.116) <= 0.02)
    return ok, (f"d=2 PPT {f(r2, 'PPT'):.4f} BE {r2.counts[BOUND]}; d=3 PPT {f(r3, 'PPT'):.4f} "
                f"NPT {f(r3, NPT):.4f} BE {f(r3, BOUND):.4f}; d=4 PPT {f(r4, 'PPT'):.4f}")


def crit6():
    err = 0.0
    for F0 in (0.2, 0.35, 0.5, 0.65, 0.8, 0.95):
        for alpha in (0.0, 1.0, 2.5, 4.0, 5.0):
            for variant in ("standard", "tilde"):
                free = (zoo.activation_fe if variant == "standard" else zoo.activation_fe_tilde)(F0)
                p, post = protocols.activation_step_simulate(free.to_dense(), zoo.activation_be(alpha).to_dense())
                P, F1 = protocols.activation_step_closed_form(F0, alpha, variant)
                err = max(err, abs(p - P), abs(protocols.singlet_fraction(post) - F1))
    tr = protocols.run_activation(0.3, 4.0, 10)
    Fs = tr.fidelities()
    increasing = all(b > a for a, b in zip(Fs, Fs[1:]))
    P, F1 = protocols.activation_step_closed_form(0.5, 4.0)
    point = abs(P - 3 / 14) <= 1e-12 and abs(F1 - 2 / 3) <= 1e-12
    expected = {0.5: NPT, 1.0: BOUND, 1.5: BOUND, 1.99: BOUND, 2.0: SEPARABLE, 2.5: SEPARABLE,
                3.0: SEPARABLE, 3.01: BOUND, 3.5: BOUND, 4.0: BOUND, 4.5: NPT}
    got = {a: criteria.classify_simplex(zoo.activation_be(a)).label for a in expected}
    classes = got == expected
    ok = err <= 1e-10 and increasing and point and classes
    return ok, (f"max sim/closed diff {err:.2e}; trace increasing {increasing}; "
                f"P={P:.15f} F'={F1:.15f}; class map {'ok' if classes else got}")


def crit7():
    msgs = []
    ok = True
    # Weyl relations
    werr = 0.0
    for d in range(2, 8):
        w = omega(d)
        for k, l, k2, l2 in [(1, 0, 0, 1), (1, 1, 2, 3), (d - 1, 2, 1, d - 1)]:
            A, B = weyl_operator(k, l, d), weyl_operator(k2, l2, d)
            C = weyl_operator((k + k2) % d, (l + l2) % d, d)
            werr = max(werr, np.abs(A @ B - w ** (l * k2) * C).max(),
                       np.abs(A.conj().T @ A - np.eye(d)).max())
    ok &= werr <= 1e-12
    msgs.append(f"Weyl {werr:.1e}")
    # Bell projectors
    berr = 0.0
    for d in (2, 3, 4):
        P = BellBasis.standard(d).projectors()
        berr = max(berr, np.abs(P.sum(axis=0) - np.eye(d * d)).max())
        G = np.einsum("aij,bji->ab", P, P)
        berr = max(berr, np.abs(G - np.eye(d * d)).max())
    ok &= berr <= 1e-12
    msgs.append(f"Bell {berr:.1e}")
    # no criterion fires on separable mixtures
    rng = np.random.default_rng(7)
    fired = 0
    for i in range(10000):
        dA, dB = (2, 2) if i % 3 == 0 else ((2, 3) if i % 3 == 1 else (3, 3))
        rho = random_separable(dA, dB, rng, terms=int(rng.integers(1, 10)))
        checks = [criteria.ppt_check(rho), criteria.realignment_check(rho), criteria.reduction_check(rho),
                  criteria.correlation_tensor_check(rho)]
        if dA == dB:
            checks.append(criteria.esic_check(rho))
        fired += any(c.fired for c in checks)
    ok &= fired == 0
    msgs.append(f"separable fired {fired}/10000")
    # reduction implies NPT
    viol = 0
    for i in range(2000):
        d = 2 + i % 2
        psi = random_pure(d * d, rng)
        rho = DenseState((d, d), 0.5 * np.outer(psi, psi.conj()) + 0.5 * random_separable(d, d, rng).entries)
        if criteria.reduction_check(rho).fired and not criteria.ppt_check(rho).fired:
            viol += 1
    ok &= viol == 0
    msgs.append(f"reduction=>NPT violations {viol}")
    # quasi-pure closed form vs general
    qerr = 0.0
    for i in range(100):
        e = rng.exponential(size=9)
        e[rng.integers(9)] += rng.uniform(0, 6)
        s = SimplexState.standard((e / e.sum()).reshape(3, 3))
        qerr = max(qerr, abs(criteria.quasi_pure_simplex(s).score - criteria.quasi_pure_concurrence(s.to_dense()).score))
    ok &= qerr <= 1e-8
    msgs.append(f"quasi-pure diff {qerr:.1e}")
    # correlation-tensor special points
    mism = 0
    for i in range(100):
        d = 2 + i % 2
        if i % 4:
            e = rng.exponential(size=d * d)
            rho = SimplexState.standard((e / e.sum()).reshape(d, d)).to_dense()
        else:
            psi = random_pure(d * d, rng)
            rho = DenseState((d, d), 0.6 * np.outer(psi, psi.conj()) + 0.4 * np.eye(d * d) / d ** 2)
        mism += criteria.correlation_tensor_check(rho, 1, 1).fired != criteria.realignment_check(rho).fired
        r = np.sqrt(d + 1)
        mism += criteria.correlation_tensor_check(rho, r, r).fired != criteria.esic_check(rho).fired
    ok &= mism == 0
    msgs.append(f"CT special-point mismatches {mism}")
    # QFI
    qv = 0
    sat = 0.0
    for i in range(200):
        dims = (2, 3)
        H = protocols.local_generator(dims)
        if i % 2:
            psi = random_pure(6, rng)
            rho = DenseState(dims, np.outer(psi, psi.conj()))
            sat = max(sat, abs(protocols.qfi(rho, H) - protocols.qfi_upper_bound(rho, H)))
        else:
            rho = DenseState(dims, random_separable(2, 3, rng).entries)
        qv += protocols.qfi(rho, H) > protocols.qfi_upper_bound(rho, H) + 1e-10
    ok &= qv == 0 and sat <= 1e-8
    msgs.append(f"QFI bound violations {qv}, pure saturation {sat:.1e}")
    return ok, "; ".join(msgs)


def crit8():
    upb = zoo.load_upb("tiles")
    m_min = 1 + sum(d - 1 for d in upb.dims)
    V = upb.product_vectors()
    orth = float(np.abs(V.conj() @ V.T - np.eye(upb.m)).max())
    rho = zoo.upb_state(upb)
    rank = int(np.sum(np.linalg.eigvalsh(rho.entries) > 1e-10))
    ppt = not criteria.ppt_check(rho).fired
    best = zoo.product_vector_search(zoo.upb_projector_complement(upb), upb.dims, restarts=100, seed=0)
    ok = upb.m == m_min == 5 and orth <= 1e-10 and rank == 4 and ppt and best <= 0.99
    return ok, f"m={upb.m} (m_min {m_min}), orth {orth:.1e}, rank {rank}, PPT {ppt}, best product overlap {best:.4f}"


def crit9():
    vals = [(d, protocols.max_teleport_fidelity(1 / d, d), protocols.measure_prepare_fidelity(d)) for d in range(2, 7)]
    ok = all(a == b == 2 / (d + 1) for d, a, b in vals)
    return ok, ", ".join(f"d={d}: {a:.6f}" for d, a, _ in vals)


CRITERIA = [
    (1, crit1, 1.0), (2, crit2, 1.0), (3, crit3, 1.0), (4, crit4, 120.0), (5, crit5, 600.0),
    (6, crit6, 60.0), (7, crit7, None), (8, crit8, 60.0), (9, crit9, None),
]


def run(n, fn, limit):
    t0 = time.perf_counter()
    ok, msg = fn()
    el = time.perf_counter() - t0
    if limit is not None and el > limit:
        ok = False
        msg += " (over time limit)"
    print(_line(n, ok, msg, el, limit))
    return ok


@pytest.mark.parametrize("n,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(n, fn, limit):
    # warm numba caches so timings measure the work, not compilation
    witnesses.product_extremum(np.eye(4), (2, 2), True, 1, 2, 1e-10, 0)
    assert run(n, fn, limit)


if __name__ == "__main__":
    witnesses.product_extremum(np.eye(4), (2, 2), True, 1, 2, 1e-10, 0)
    results = [run(*c) for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
