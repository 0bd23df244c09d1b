"""Evaluate U(t) = exp(itM) from a spectral decomposition, plus pointwise checks."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import WeightedGraph, build_hamiltonian
from .spectral import SpectralDecomposition, decompose

__all__ = [
    "PROB_TOL",
    "TransitionMatrix",
    "CheckResult",
    "GeneralizedFR",
    "evolve",
    "probability",
    "amplitudes",
    "check_pst_at",
    "check_periodic_at",
    "check_fr_at",
    "check_generalized_fr_at",
    "mixing_matrix",
    "local_uniform_mixing_at",
    "walks_equivalent_at_vertex",
    "Trace",
    "sweep_trace",
    "scan_max",
]

PROB_TOL = 1e-8


@dataclass(frozen=True)
class TransitionMatrix:
    t: float
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def unitarity_error(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(self.n))))

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))


def evolve(sd: SpectralDecomposition, t: float) -> TransitionMatrix:
    """``sum_j exp(i t lambda_j) E_j``."""
    phases = np.exp(1j * float(t) * sd.eigenvalues)
    return TransitionMatrix(float(t), np.tensordot(phases, sd.projectors, 1))


def probability(U: TransitionMatrix, u: int, v: int) -> float:
    return float(abs(U.matrix[u, v]) ** 2)


def amplitudes(sd: SpectralDecomposition, u: int, v: int, times) -> np.ndarray:
    """``U(t)_{u,v}`` for an array of times without forming full matrices."""
    coef = sd.projectors[:, u, v]
    times = np.asarray(times, dtype=float)
    return np.exp(1j * np.multiply.outer(times, sd.eigenvalues)) @ coef


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a pointwise check.

    ``marginal`` marks a near miss: the check failed but came within ten
    times the tolerance of passing.
    """

    holds: bool
    value: float
    marginal: bool = False
    alpha: complex | None = None
    beta: complex | None = None
    proper: bool | None = None
    balanced: bool | None = None


def _threshold(value: float, tol: float) -> CheckResult:
    holds = value > 1 - tol
    return CheckResult(holds, value, marginal=(not holds) and value > 1 - 10 * tol)


def check_pst_at(U: TransitionMatrix, u: int, v: int, tol: float = PROB_TOL) -> CheckResult:
    if u == v:
        raise ValueError("PST needs two distinct vertices")
    return _threshold(probability(U, u, v), tol)


def check_periodic_at(U: TransitionMatrix, u: int, tol: float = PROB_TOL) -> CheckResult:
    return _threshold(probability(U, u, u), tol)


def check_fr_at(U: TransitionMatrix, u: int, v: int, tol: float = PROB_TOL) -> CheckResult:
    if u == v:
        raise ValueError("FR needs two distinct vertices")
    alpha, beta = complex(U.matrix[u, u]), complex(U.matrix[u, v])
    r = _threshold(abs(alpha) ** 2 + abs(beta) ** 2, tol)
    return CheckResult(
        r.holds,
        r.value,
        r.marginal,
        alpha,
        beta,
        proper=r.holds and abs(beta) > math.sqrt(tol),
        balanced=r.holds and abs(abs(alpha) - abs(beta)) < math.sqrt(tol),
    )


@dataclass(frozen=True)
class GeneralizedFR:
    holds: bool
    proper: bool
    leak: float  # largest |U_{v,w}| with v in S, w outside S


def check_generalized_fr_at(U: TransitionMatrix, S: Iterable[int], tol: float = PROB_TOL) -> GeneralizedFR:
    """No amplitude flows between ``S`` and its complement at this time.

    Proper additionally needs every entry ``U_{u,v}`` with ``u != v`` in
    ``S`` to be nonzero.
    """
    S = sorted(set(S))
    if not S:
        raise ValueError("S must be nonempty")
    rest = [w for w in range(U.n) if w not in S]
    leak = float(np.max(np.abs(U.matrix[np.ix_(S, rest)]))) if rest else 0.0
    holds = leak**2 < tol
    block = np.abs(U.matrix[np.ix_(S, S)]) ** 2
    off = block[~np.eye(len(S), dtype=bool)]
    proper = holds and bool(np.all(off > tol))
    return GeneralizedFR(holds, proper, leak)


def mixing_matrix(sd: SpectralDecomposition, t: float) -> np.ndarray:
    """``U(t) o U(-t)``, which for real symmetric ``M`` is ``|U(t)|^2`` entrywise."""
    return np.abs(evolve(sd, t).matrix) ** 2


def local_uniform_mixing_at(U: TransitionMatrix, u: int, tol: float = 1e-8) -> bool:
    return bool(np.all(np.abs(np.abs(U.matrix[:, u]) - 1 / math.sqrt(U.n)) < tol))


def walks_equivalent_at_vertex(g: WeightedGraph, u: int, tgrid: Sequence[float], tol: float = 1e-8) -> bool:
    """Adjacency and Laplacian mixing columns at ``u`` agree on every grid time.

    Agreement on a grid is consistent with equivalence but does not prove it.
    """
    tgrid = list(tgrid)
    if not tgrid:
        raise ValueError("tgrid must be nonempty")
    sa = decompose(build_hamiltonian(g, "adjacency"), exact=False)
    sl = decompose(build_hamiltonian(g, "laplacian"), exact=False)
    for t in tgrid:
        if np.max(np.abs(mixing_matrix(sa, t)[:, u] - mixing_matrix(sl, t)[:, u])) > tol:
            return False
    return True


@dataclass(frozen=True)
class Trace:
    u: int
    v: int
    t: np.ndarray
    p_uv: np.ndarray
    p_uu: np.ndarray

    def rows(self):
        return list(zip(self.t.tolist(), self.p_uv.tolist(), self.p_uu.tolist()))

    def argmax(self) -> int:
        return int(np.argmax(self.p_uv))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "p_uv", "p_uu"])
        for row in self.rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"u": self.u, "v": self.v, "rows": [list(r) for r in self.rows()]})


def sweep_trace(sd: SpectralDecomposition, u: int, v: int, t0: float, t1: float, steps: int) -> Trace:
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    if steps < 2:
        raise ValueError("need at least 2 steps")
    t = np.linspace(t0, t1, steps)
    return Trace(u, v, t, np.abs(amplitudes(sd, u, v, t)) ** 2, np.abs(amplitudes(sd, u, u, t)) ** 2)


def scan_max(
    sd: SpectralDecomposition,
    u: int,
    v: int,
    t1: float,
    t0: float = 0.0,
    step: float | None = None,
    target: float | None = None,
    chunk: int = 200_000,
) -> tuple[float, float]:
    """Largest ``|U(t)_{u,v}|^2`` over ``[t0, t1]``: grid search then local polish.

    The grid step defaults to a tenth of the fastest oscillation period.
    With ``target`` the scan stops at the first polished peak reaching it.
    Returns ``(t, probability)``.
    """
    coef = sd.projectors[:, u, v]
    lam = sd.eigenvalues[np.abs(coef) > 1e-12]
    spread = float(np.ptp(lam)) if lam.size > 1 else 1.0
    step = step or (2 * math.pi / max(spread, 1e-12)) / 10

    def prob(t):
        return float(abs(amplitudes(sd, u, v, [t])[0]) ** 2)

    best_t, best_p = t0, prob(t0)
    start = t0
    while start < t1:
        ts = np.arange(start, min(t1, start + chunk * step), step)
        ps = np.abs(amplitudes(sd, u, v, ts)) ** 2
        # polish the strongest few local maxima of this chunk
        for i in np.argsort(ps)[-5:][::-1]:
            lo, hi = max(t0, ts[i] - step), min(t1, ts[i] + step)
            res = minimize_scalar(lambda t: -prob(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
            t, p = (float(res.x), -float(res.fun)) if -res.fun > ps[i] else (float(ts[i]), float(ps[i]))
            if p > best_p:
                best_t, best_p = t, p
        if target is not None and best_p >= target:
            break
        start = float(ts[-1]) + step
    return best_t, best_p
