"""Seeded Monte Carlo surveys of the Bell-diagonal simplex and slice scans."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bell import BellBasis, SimplexState
from .criteria import BOUND, NPT, SEPARABLE, SIMPLEX_CHAIN, UNDETERMINED, classify_coeffs_batch
from .errors import InputError

OUT_OF_SIMPLEX = "OutOfSimplex"
CHUNK = 2048


def sample_simplex(d: int, rng: np.random.Generator) -> SimplexState:
    """Flat Dirichlet point via normalized exponential deviates."""
    return SimplexState(BellBasis.standard(d), _sample_coeffs(d, rng))


def _sample_coeffs(d: int, rng: np.random.Generator) -> np.ndarray:
    e = rng.exponential(size=d * d)
    return (e / e.sum()).reshape(d, d)


def sample_coeffs(d: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Samples ``start..stop-1``; sample i uses ``default_rng([seed, i])``."""
    return np.array([_sample_coeffs(d, np.random.default_rng([seed, i])) for i in range(start, stop)])


@dataclass(frozen=True)
class SurveyConfig:
    d: int
    n: int
    seed: int = 0
    basis: BellBasis | None = None
    chain: tuple = SIMPLEX_CHAIN
    threads: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError("sample count must be >= 1")
        if self.d < 2:
            raise InputError("d must be >= 2")
        if not self.chain or "ppt" not in self.chain:
            raise InputError("criteria chain must include ppt")
        if self.basis is not None and self.basis.d != self.d:
            raise InputError("basis dimension mismatch")


@dataclass(frozen=True)
class SurveyResult:
    config: SurveyConfig
    counts: dict = field(default_factory=dict)

    LABELS = (NPT, "PPT", SEPARABLE, BOUND, UNDETERMINED)

    @property
    def n(self) -> int:
        return self.config.n

    def frequency(self, label: str) -> float:
        return self.counts[label] / self.n

    def half_width(self, label: str) -> float:
        """95% normal-approximation binomial half-width."""
        p = self.frequency(label)
        return float(1.96 * np.sqrt(p * (1 - p) / self.n))

    def rows(self) -> list[dict]:
        return [{"class": k, "count": self.counts[k], "frequency": self.frequency(k),
                 "ci95": self.half_width(k)} for k in self.LABELS]

    def as_dict(self) -> dict:
        c = self.config
        return {"config": {"d": c.d, "n": c.n, "seed": c.seed, "chain": list(c.chain),
                           "basis": "standard" if c.basis is None else c.basis.to_json()},
                "classes": self.rows()}


def _chunk_labels(cfg: SurveyConfig, basis: BellBasis, start: int, stop: int) -> np.ndarray:
    C = sample_coeffs(cfg.d, cfg.seed, start, stop)
    return classify_coeffs_batch(C, basis, cfg.chain)


def run_survey(cfg: SurveyConfig) -> SurveyResult:
    """Classify ``cfg.n`` uniform simplex samples; deterministic for any thread count."""
    basis = cfg.basis or BellBasis.standard(cfg.d)
    bounds = [(s, min(s + CHUNK, cfg.n)) for s in range(0, cfg.n, CHUNK)]
    threads = cfg.threads or os.cpu_count() or 1
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: _chunk_labels(cfg, basis, *b), bounds))
    else:
        parts = [_chunk_labels(cfg, basis, *b) for b in bounds]
    labels = np.concatenate(parts)
    counts = {k: int(np.sum(labels == k)) for k in (NPT, SEPARABLE, BOUND, UNDETERMINED)}
    counts["PPT"] = cfg.n - counts[NPT]
    return SurveyResult(cfg, counts)


# ------------------------------------------------------------------- scans

def family_coeffs(name: str, x: float, y: float, gamma: float | None = None) -> np.ndarray:
    """Unchecked coefficients of the named 2-parameter families (x=alpha, y=beta)."""
    c = np.zeros((3, 3))
    if name == "A":
        c += (1 - x - y) / 9
        c[0, 0] += x
        c[1, 0] += y
        return c
    if name in ("B", "B1", "B2"):
        from .zoo import GAMMA_B1, GAMMA_B2
        g = {"B1": GAMMA_B1, "B2": GAMMA_B2}.get(name, gamma)
        if g is None:
            raise InputError("family B needs gamma")
        c += (1 - x / 5 - y / 4 - g) / 9
        c[0, 0] += x / 5
        c[1, 0] += y / 8
        c[2, 0] += y / 8
        c[:, 1] += g / 3
        return c
    raise InputError(f"unknown family {name!r}; use A, B1, B2 or B with gamma")


@dataclass(frozen=True)
class ScanResult:
    family: str
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # shape (len(ys), len(xs))

    def rows(self) -> list[dict]:
        return [{"x": float(x), "y": float(y), "class": str(self.labels[j, i])}
                for j, y in enumerate(self.ys) for i, x in enumerate(self.xs)]

    def count(self, label: str) -> int:
        return int(np.sum(self.labels == label))


def slice_scan(family: str | Callable[[float, float], np.ndarray], xs: Sequence[float], ys: Sequence[float],
               basis: BellBasis | None = None, chain: Sequence[str] = SIMPLEX_CHAIN,
               gamma: float | None = None) -> ScanResult:
    """Verdict label per grid point; points with negative coefficients are OutOfSimplex."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if callable(family):
        fn, fname = family, getattr(family, "__name__", "custom")
    else:
        fn, fname = (lambda x, y: family_coeffs(family, x, y, gamma)), family
    pts = [(j, i, np.asarray(fn(x, y), dtype=float)) for j, y in enumerate(ys) for i, x in enumerate(xs)]
    d = int(round(np.sqrt(pts[0][2].size)))
    basis = basis or BellBasis.standard(d)
    labels = np.full((len(ys), len(xs)), OUT_OF_SIMPLEX, dtype=object)
    valid = [(j, i, c.reshape(d, d)) for j, i, c in pts if c.min() >= -1e-12 and abs(c.sum() - 1) < 1e-9]
    if valid:
        C = np.clip(np.array([c for _, _, c in valid]), 0, None)
        lab = classify_coeffs_batch(C, basis, chain)
        for (j, i, _), l in zip(valid, lab):
            labels[j, i] = l
    return ScanResult(fname, xs, ys, labels)
