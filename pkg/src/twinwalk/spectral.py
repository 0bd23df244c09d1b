"""Symmetric eigendecomposition, spectral idempotents and cospectrality tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Hamiltonian
from .numberfield import ExactPoly, Unrecognized, char_poly, lcm, minimal_poly, recognize_support, scale_value

__all__ = [
    "EigenError",
    "jacobi_eigh",
    "SpectralDecomposition",
    "SupportProfile",
    "decompose",
    "support",
    "cospectral",
    "parallel",
    "strongly_cospectral",
    "strong_cospectrality_of_twins",
    "residuals",
]

GROUP_TOL = 1e-8
SUPPORT_TOL = 1e-8


class EigenError(RuntimeError):
    """Jacobi iteration did not converge within its sweep cap."""


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 100, tol: float = 1e-14):
    """Cyclic Jacobi rotations; returns ``(eigenvalues, eigenvectors)`` in columns.

    Deterministic for a fixed input.  Converges quadratically; the cap is a
    guard against non-symmetric or non-finite input.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(a), initial=0.0)):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(2 * np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            return np.diag(a).copy(), v
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * scale:
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1 / np.hypot(t, 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            return np.diag(a).copy(), v
    raise EigenError(f"Jacobi did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) with their orthogonal projectors."""

    hamiltonian: Hamiltonian
    eigenvalues: np.ndarray
    projectors: np.ndarray  # shape (k, n, n)
    multiplicities: tuple[int, ...]
    char_poly: ExactPoly | None = None
    scale: int = 1
    exact_values: tuple | None = None
    exact_consistent: bool | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    @property
    def integral(self) -> bool:
        """Characteristic polynomial has integer coefficients."""
        return self.char_poly is not None and self.char_poly.is_integral

    @property
    def confidence(self) -> str:
        if self.exact_consistent:
            return "exact"
        return "numeric-only"

    def index_of(self, value: float, tol: float | None = None) -> int | None:
        tol = GROUP_TOL * max(1.0, float(np.ptp(self.eigenvalues))) if tol is None else tol
        d = np.abs(self.eigenvalues - value)
        j = int(np.argmin(d))
        return j if d[j] <= max(tol, 1e-7) else None

    def exact_value(self, j: int):
        return None if self.exact_values is None else self.exact_values[j]


def _group(values: np.ndarray, vectors: np.ndarray, tol: float):
    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    groups: list[list[int]] = []
    for i, x in enumerate(values):
        if groups and abs(values[groups[-1][0]] - x) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    lam = np.array([values[g].mean() for g in groups])
    proj = np.array([vectors[:, g] @ vectors[:, g].T for g in groups])
    return lam, proj, tuple(len(g) for g in groups)


def decompose(h: Hamiltonian, group_tol: float | None = None, exact: bool = True) -> SpectralDecomposition:
    """Group eigenvalues of ``h`` and build projectors from orthonormal bases.

    With rational entries the grouping is cross-checked against the exact
    characteristic polynomial: the number of distinct eigenvalues must equal
    the degree of its square-free part, and each recognised eigenvalue must
    have the exact multiplicity of its minimal polynomial.
    """
    m = np.asarray(h.matrix, dtype=float)
    values, vectors = jacobi_eigh(m)
    spread = float(np.ptp(values)) if values.size else 0.0
    tol = (GROUP_TOL if group_tol is None else group_tol) * max(1.0, spread)
    lam, proj, mult = _group(values, vectors, tol)
    if not (exact and h.is_exact):
        return SpectralDecomposition(h, lam, proj, mult, notes=("inexact weights",) if not h.is_exact else ())
    poly = char_poly(h.exact)
    notes = []
    consistent = True
    # rational entries: recognise eigenvalues of the integer matrix d*M, then divide by d
    d = lcm(*(Fraction(x).denominator for row in h.exact for x in row))
    scaled = [[Fraction(x) * d for x in row] for row in h.exact]
    found = recognize_support(char_poly(scaled), lam * d, spectrum=values * d)
    vals = tuple(x if isinstance(x, Unrecognized) else scale_value(x, Fraction(1, d)) for x in found)
    if d > 1:
        notes.append(f"exact values recognised on the matrix scaled by {d}")
    sqf = poly.squarefree()
    if sqf.degree != len(lam):
        consistent = False
        notes.append(f"grouping found {len(lam)} distinct eigenvalues, exact count {sqf.degree}")
    for j, x in enumerate(vals):
        if isinstance(x, Unrecognized):
            continue
        k = poly.multiplicity(minimal_poly(x))
        if k != mult[j]:
            consistent = False
            notes.append(f"eigenvalue {x}: numeric multiplicity {mult[j]}, exact {k}")
    return SpectralDecomposition(h, lam, proj, mult, poly, d, vals, consistent, tuple(notes))


@dataclass(frozen=True)
class SupportProfile:
    vertex: int
    support: tuple[int, ...]
    plus_part: tuple[int, ...] | None = None
    minus_part: tuple[int, ...] | None = None

    def values(self, sd: SpectralDecomposition, part: str = "support") -> list[float]:
        idx = getattr(self, part if part == "support" else f"{part}_part")
        return [float(sd.eigenvalues[j]) for j in idx or ()]


def support(sd: SpectralDecomposition, u: int, tol: float = SUPPORT_TOL) -> SupportProfile:
    if not 0 <= u < sd.n:
        raise IndexError(f"vertex {u} out of range")
    norms = np.sqrt(np.clip(sd.projectors[:, u, u], 0.0, None))
    return SupportProfile(u, tuple(int(j) for j in np.flatnonzero(norms > tol)))


def _check_pair(sd, u, v):
    if u == v:
        raise ValueError("need two distinct vertices")
    for x in (u, v):
        if not 0 <= x < sd.n:
            raise IndexError(f"vertex {x} out of range")


def cospectral(sd: SpectralDecomposition, u: int, v: int, tol: float = SUPPORT_TOL) -> bool:
    _check_pair(sd, u, v)
    return bool(np.all(np.abs(sd.projectors[:, u, u] - sd.projectors[:, v, v]) < tol))


def parallel(sd: SpectralDecomposition, u: int, v: int, tol: float = SUPPORT_TOL) -> bool:
    """Every ``E_j e_u`` and ``E_j e_v`` span at most a line (Gram determinant test)."""
    _check_pair(sd, u, v)
    for e in sd.projectors:
        # for a projector, |E e_u|^2 = E_uu and <E e_u, E e_v> = E_uv
        if e[u, u] * e[v, v] - e[u, v] ** 2 > tol:
            return False
    return True


def strongly_cospectral(sd: SpectralDecomposition, u: int, v: int, tol: float = SUPPORT_TOL):
    """``(ok, plus, minus)``: ``E_j e_u = +-E_j e_v`` for each ``j``."""
    _check_pair(sd, u, v)
    plus, minus = [], []
    for j, e in enumerate(sd.projectors):
        x, y = e[:, u], e[:, v]
        if max(np.max(np.abs(x)), np.max(np.abs(y))) <= tol:
            continue
        if np.max(np.abs(x - y)) <= tol:
            plus.append(j)
        elif np.max(np.abs(x + y)) <= tol:
            minus.append(j)
        else:
            return False, (), ()
    return True, tuple(plus), tuple(minus)


def strong_cospectrality_of_twins(sd: SpectralDecomposition, u: int, v: int, theta: float, tol: float = SUPPORT_TOL):
    """Eigenspace test for a twin pair ``{u, v}`` with twin eigenvalue ``theta``.

    Strongly cospectral iff every ``theta``-eigenvector orthogonal to
    ``e_u - e_v`` vanishes on ``u`` (and so on ``v``), which is the same as
    ``E_theta e_u == (e_u - e_v)/2``.  Returns ``(ok, plus, minus)`` as index
    tuples; on success ``minus`` is exactly the index of ``theta``.
    """
    _check_pair(sd, u, v)
    j = sd.index_of(float(theta))
    if j is None:
        raise ValueError(f"{theta} is not an eigenvalue; are {u} and {v} twins?")
    target = np.zeros(sd.n)
    target[u], target[v] = 0.5, -0.5
    if np.max(np.abs(sd.projectors[j][:, u] - target)) > tol:
        return False, (), ()
    prof = support(sd, u, tol)
    plus = tuple(i for i in prof.support if i != j)
    return True, plus, (j,)


def residuals(sd: SpectralDecomposition) -> dict[str, float]:
    """Max-norm residuals of the projector identities."""
    n = sd.n
    e = sd.projectors
    m = np.asarray(sd.hamiltonian.matrix, dtype=float)
    out = {
        "sum_identity": float(np.max(np.abs(e.sum(axis=0) - np.eye(n)))),
        "reconstruction": float(np.max(np.abs(np.tensordot(sd.eigenvalues, e, 1) - m))),
        "trace_multiplicity": float(max(abs(np.trace(p) - k) for p, k in zip(e, sd.multiplicities))),
    }
    worst = 0.0
    for j in range(len(e)):
        for l in range(j, len(e)):
            target = e[j] if j == l else 0.0
            worst = max(worst, float(np.max(np.abs(e[j] @ e[l] - target))))
    out["orthogonality"] = worst
    return out
