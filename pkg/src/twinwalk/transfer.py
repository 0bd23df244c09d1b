"""Periodicity, PST, PGST and FR between twin vertices.

Exact answers come from recognised eigenvalues mapped to rational
coordinates over a basis that is linearly independent over Q, so every
"is this ratio rational" or "is there an integer relation" question becomes
finite linear algebra.  Without recognised values the procedures fall back
to tolerance-based checks and say so in ``confidence``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import (
    PROB_TOL,
    check_fr_at,
    check_periodic_at,
    check_pst_at,
    evolve,
    scan_max,
)
from .graph import WeightedGraph, are_twins, build_hamiltonian, theta_of, twin_set_of
from .numberfield import (
    QuadraticValue,
    SqrtQuadratic,
    Unrecognized,
    coordinates,
    integer_kernel,
    is_rational_ratio,
    lcm,
    nu2,
    proportional,
    rational_gcd,
    squarefree_part,
    sub_coords,
)
from .spectral import (
    SUPPORT_TOL,
    SpectralDecomposition,
    decompose,
    strong_cospectrality_of_twins,
    strongly_cospectral,
    support,
)

__all__ = [
    "EXACT",
    "NUMERIC",
    "INCONCLUSIVE",
    "ExactTime",
    "RatioResult",
    "Period",
    "FRParams",
    "TransferVerdict",
    "AnalysisOptions",
    "PairReport",
    "ratio_condition",
    "min_period",
    "exact_ratio",
    "periodicity",
    "pst_between_twins",
    "pgst_between_twins",
    "fr_between_twins",
    "analyze_pair",
    "twin_pairs",
]

EXACT, NUMERIC, INCONCLUSIVE = "exact", "numeric-only", "inconclusive"


# ---------------------------------------------------------------------------
# exact times
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactTime:
    """The time ``coeff * pi / sqrt(root)``; ``root`` is a square-free integer
    when rational, otherwise a positive quadratic irrational."""

    coeff: Fraction
    root: QuadraticValue

    @classmethod
    def from_square(cls, coeff, square: QuadraticValue) -> "ExactTime":
        """``coeff * pi / |w|`` given ``w**2``."""
        coeff = Fraction(coeff)
        if coeff <= 0:
            raise ValueError("time coefficient must be positive")
        if square.is_rational:
            r = square.rational_part
            if r <= 0:
                raise ValueError("square must be positive")
            s, k = squarefree_part(r.numerator * r.denominator)
            return cls(coeff * r.denominator / k, QuadraticValue.rational(s))
        return cls(coeff, square)

    def __float__(self) -> float:
        return float(self.coeff) * math.pi / math.sqrt(float(self.root))

    def scaled(self, c) -> "ExactTime":
        return ExactTime(self.coeff * Fraction(c), self.root)

    def __str__(self) -> str:
        p, q = self.coeff.numerator, self.coeff.denominator
        num = "pi" if p == 1 else f"{p}*pi"
        if self.root.is_rational and self.root.rational_part == 1:
            return num if q == 1 else f"{num}/{q}"
        rt = f"sqrt({self.root})"
        if self.root.is_rational:
            c = self.coeff / self.root.rational_part
            if c.denominator == 1:
                # 2*pi/sqrt(2) reads better as sqrt(2)*pi
                return f"{rt}*pi" if c == 1 else f"{c}*{rt}*pi"
        return f"{num}/{rt}" if q == 1 else f"{num}/({q}*{rt})"


# ---------------------------------------------------------------------------
# coordinate helpers
# ---------------------------------------------------------------------------


def _block(c: dict):
    """Which one-field block a coordinate vector lives in, or None if mixed."""
    if not c:
        return None
    kinds = {k[0] for k in c}
    if kinds <= {"1", "sqrt"}:
        deltas = {k[1] for k in c if k[0] == "sqrt"}
        return ("field", deltas.pop() if deltas else 1) if len(deltas) <= 1 else None
    if kinds == {"nested"}:
        tags = {k[1] for k in c}
        return ("nested", tags.pop()) if len(tags) == 1 else None
    return None


def _split(c: dict, blk):
    """Write the number as ``s * sqrt(root)`` with ``s`` in ``Q(sqrt(delta))``."""
    if blk[0] == "field":
        d = blk[1]
        s = QuadraticValue(2 * c.get(("1",), Fraction(0)), 2 * c.get(("sqrt", d), Fraction(0)), d)
        return s, QuadraticValue.rational(1)
    tag = blk[1]
    s = QuadraticValue(2 * c.get(("nested", tag, 0), Fraction(0)), 2 * c.get(("nested", tag, 1), Fraction(0)), tag[2])
    return s, QuadraticValue(*tag)


def _square(c: dict) -> QuadraticValue | None:
    blk = _block(c)
    if blk is None:
        return None
    s, root = _split(c, blk)
    return s * s * root


def exact_ratio(x: dict, y: dict) -> QuadraticValue | None:
    """Exact ``x/y`` when both lie in one quadratic block, else None."""
    r = proportional(x, y)
    if r is not None:
        return QuadraticValue.rational(r)
    bx, by = _block(x), _block(y)
    if bx is None or bx != by:
        return None
    return _split(x, bx)[0] / _split(y, by)[0]


def _surd_multiple(c: dict):
    """``(b, delta)`` with the number equal to ``b*sqrt(delta)``, else None."""
    if not c:
        return Fraction(0), 1
    if len(c) != 1:
        return None
    (k, v), = c.items()
    if k == ("1",):
        return v, 1
    if k[0] == "sqrt":
        return v, k[1]
    return None


def _exactify(x):
    if isinstance(x, bool):
        raise TypeError("bool is not an eigenvalue")
    if isinstance(x, (QuadraticValue, SqrtQuadratic, Unrecognized)):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadraticValue.rational(x)
    return None


def _fmt(x) -> str:
    if isinstance(x, (QuadraticValue, SqrtQuadratic)):
        return str(x)
    return f"{float(x):.12g}"


# ---------------------------------------------------------------------------
# ratio condition and periods
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioResult:
    status: str  # "holds" | "fails" | "inconclusive"
    confidence: str
    values: tuple  # sorted descending
    ratios: tuple = ()  # (l1 - lj)/(l1 - l2) for j >= 3
    witness: dict | None = None
    coords: tuple | None = None

    @property
    def holds(self) -> bool | None:
        return {"holds": True, "fails": False}.get(self.status)


def ratio_condition(support_values: Sequence, qmax: int = 10**6) -> RatioResult:
    """Are all ratios of differences of ``support_values`` rational?

    Ints, Fractions and recognised values are treated exactly; a failing
    exact test comes with a witness quadruple.  Floats and unrecognised
    values are probed with continued fractions: success is numeric-only and
    failure is inconclusive, never a proof.
    """
    vals = sorted(support_values, key=lambda x: -float(x if not isinstance(x, Unrecognized) else x.value))
    if len(vals) < 2:
        raise ValueError("need at least two eigenvalues")
    fl = [float(x.value if isinstance(x, Unrecognized) else x) for x in vals]
    ex = [_exactify(x) for x in vals]
    coords = None
    if all(e is not None and not isinstance(e, Unrecognized) for e in ex):
        coords = coordinates(ex)
    if coords is not None:
        d = [sub_coords(coords[0], c) for c in coords]
        ratios = []
        for j in range(2, len(vals)):
            r = proportional(d[j], d[1])
            if r is None:
                q = exact_ratio(d[j], d[1])
                w = {
                    "quadruple": [_fmt(ex[0]), _fmt(ex[j]), _fmt(ex[0]), _fmt(ex[1])],
                    "ratio": str(q) if q is not None else "irrational",
                    "ratio_value": (fl[0] - fl[j]) / (fl[0] - fl[1]),
                }
                return RatioResult("fails", EXACT, tuple(ex), tuple(ratios), w, tuple(coords))
            ratios.append(r)
        return RatioResult("holds", EXACT, tuple(ex), tuple(ratios), coords=tuple(coords))
    ratios = []
    for j in range(2, len(vals)):
        pq = is_rational_ratio(fl[0] - fl[j], fl[0] - fl[1], qmax)
        if pq is None:
            w = {"quadruple": [_fmt(fl[0]), _fmt(fl[j]), _fmt(fl[0]), _fmt(fl[1])], "ratio_value": (fl[0] - fl[j]) / (fl[0] - fl[1]), "qmax": qmax}
            return RatioResult("inconclusive", INCONCLUSIVE, tuple(fl), tuple(ratios), w)
        ratios.append(Fraction(*pq))
    return RatioResult("holds", NUMERIC, tuple(fl), tuple(ratios))


@dataclass(frozen=True)
class Period:
    time: float
    exact: ExactTime | None
    certificate: dict


def min_period(support_values: Sequence, qmax: int = 10**6) -> Period:
    """Minimum period ``2*pi/(g*sqrt(delta))`` of a vertex with this support.

    With ``lambda_1 - lambda_j = b_j*sqrt(delta)`` the lattice of periods is
    generated by ``2*pi/(g*sqrt(delta))`` where ``g`` is the gcd of the
    ``b_j``.  Values need not be of that form: in general the differences
    are rational multiples ``r_j`` of ``lambda_1 - lambda_2`` and the period
    is ``2*pi/(gcd(r_j) * (lambda_1 - lambda_2))``.
    """
    rc = ratio_condition(support_values, qmax)
    if rc.status != "holds":
        raise ValueError("ratio condition not established; no period certificate")
    rs = [Fraction(1), *rc.ratios]
    g_r = rational_gcd(rs)
    fl = [float(x) for x in rc.values]
    cert: dict = {"ratios": [str(r) for r in rs], "q": lcm(*(r.denominator for r in rs))}
    if rc.confidence == EXACT:
        d2 = sub_coords(rc.coords[0], rc.coords[1])
        sm = _surd_multiple(d2)
        if sm is not None:
            c, delta = sm
            b = [r * c for r in rs]
            cert.update(delta=delta, b_list=[str(x) for x in b], g=str(rational_gcd(b)))
        exact = ExactTime.from_square(2 / g_r, _square(d2))
        return Period(float(exact), exact, cert)
    return Period(2 * math.pi / (float(g_r) * (fl[0] - fl[1])), None, cert)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FRParams:
    tau: float
    gamma: float  # reduced into [0, 2*pi)
    zeta: float
    alpha: complex
    beta: complex
    proper: bool
    balanced: bool
    gamma_over_pi: str | None  # exact value when known
    gamma_rational: bool | None
    downstream: str


@dataclass(frozen=True)
class TransferVerdict:
    phenomenon: str  # "periodic" | "pst" | "pgst" | "fr"
    holds: bool | None
    confidence: str
    status: str = ""
    time: float | None = None
    exact_time: ExactTime | None = None
    certificate: dict = field(default_factory=dict)
    fr: FRParams | None = None
    verified: bool | None = None
    note: str = ""

    def __post_init__(self):
        if not self.status:
            s = "inconclusive" if self.holds is None else ("yes" if self.holds else "no")
            object.__setattr__(self, "status", s)

    @property
    def time_text(self) -> str | None:
        if self.exact_time is not None:
            return str(self.exact_time)
        return None if self.time is None else f"{self.time:.12g}"


@dataclass(frozen=True)
class AnalysisOptions:
    tol: float = PROB_TOL
    qmax: int = 10**6
    bound: int = 20
    group_tol: float | None = None
    support_tol: float = SUPPORT_TOL
    horizon: float = 200.0


def _min_conf(*cs: str) -> str:
    order = [EXACT, NUMERIC, INCONCLUSIVE]
    return max(cs, key=order.index)


# ---------------------------------------------------------------------------
# analysis context for one pair
# ---------------------------------------------------------------------------


@dataclass
class _Ctx:
    graph: WeightedGraph
    kind: str
    u: int
    v: int
    opts: AnalysisOptions
    sd: SpectralDecomposition | None = None
    cu: int = 0
    cv: int = 0
    same_component: bool = True
    ts: object = None
    theta: object = None
    j_theta: int | None = None
    twins: bool = False
    sc: bool = False
    plus: tuple = ()
    minus: tuple = ()
    supp: tuple = ()
    exact: bool = False
    notes: list = field(default_factory=list)

    def value(self, j: int):
        if self.exact:
            return self.sd.exact_values[j]
        return float(self.sd.eigenvalues[j])

    def values(self, idx) -> list:
        return [self.value(j) for j in idx]

    @property
    def base_conf(self) -> str:
        return EXACT if self.sd.exact_consistent else NUMERIC


_CTX_CACHE: dict = {}


def _context(g: WeightedGraph, kind: str, u: int, v: int, opts: AnalysisOptions | None) -> _Ctx:
    opts = opts or AnalysisOptions()
    key = (id(g), g.n, tuple(g.edges.items()), tuple(g.loops.items()), str(kind), u, v, opts)
    hit = _CTX_CACHE.get(key)
    if hit is not None:
        return hit
    ctx = _build_context(g, kind, u, v, opts)
    if len(_CTX_CACHE) > 256:
        _CTX_CACHE.clear()
    _CTX_CACHE[key] = ctx
    return ctx


def _build_context(g, kind, u, v, opts) -> _Ctx:
    if u == v:
        raise ValueError("need two distinct vertices")
    for x in (u, v):
        g._check_vertex(x)
    ctx = _Ctx(g, str(kind), u, v, opts)
    comps = g.components()
    cu = next(c for c in comps if u in c)
    sub = g
    if len(comps) > 1:
        ctx.notes.append(f"graph has {len(comps)} components; analysed the component of {u}")
        if v not in cu:
            ctx.same_component = False
        sub, labels = g.subgraph(cu)
        index = {x: i for i, x in enumerate(labels)}
        ctx.cu, ctx.cv = index[u], index.get(v, -1)
    else:
        ctx.cu, ctx.cv = u, v
    ctx.sd = decompose(build_hamiltonian(sub, kind), opts.group_tol)
    ctx.supp = support(ctx.sd, ctx.cu, opts.support_tol).support
    ctx.exact = bool(ctx.sd.exact_consistent) and all(
        not isinstance(ctx.sd.exact_values[j], Unrecognized) for j in ctx.supp
    )
    if not ctx.same_component:
        return ctx
    ctx.twins = are_twins(sub, ctx.cu, ctx.cv)
    if ctx.twins:
        ctx.ts = twin_set_of(sub, ctx.cu)
        ctx.theta = theta_of(ctx.ts, sub, kind)
        ctx.j_theta = ctx.sd.index_of(float(ctx.theta))
        if ctx.exact and isinstance(ctx.theta, Fraction):
            if ctx.sd.exact_values[ctx.j_theta] != QuadraticValue.rational(ctx.theta):
                ctx.exact = False
                ctx.notes.append("twin eigenvalue does not match its exact recognition")
        elif not isinstance(ctx.theta, Fraction):
            ctx.exact = False
        ok, plus, minus = strong_cospectrality_of_twins(ctx.sd, ctx.cu, ctx.cv, float(ctx.theta), opts.support_tol)
    else:
        ok, plus, minus = strongly_cospectral(ctx.sd, ctx.cu, ctx.cv, opts.support_tol)
    ctx.sc, ctx.plus, ctx.minus = ok, plus, minus
    return ctx


def _require_twins(ctx: _Ctx):
    if not ctx.same_component:
        return
    if not ctx.twins:
        raise ValueError(f"vertices {ctx.u} and {ctx.v} are not twins")


def _gate(ctx: _Ctx, phenomenon: str) -> TransferVerdict | None:
    """Negative verdicts shared by PST, PGST and proper FR."""
    if not ctx.same_component:
        return TransferVerdict(phenomenon, False, EXACT, certificate={"reason": "different components"})
    if len(ctx.ts) >= 3:
        return TransferVerdict(
            phenomenon,
            False,
            EXACT,
            certificate={"reason": "twin set of size >= 3 is not strongly cospectral", "twin_set_size": len(ctx.ts)},
        )
    if not ctx.sc:
        return TransferVerdict(phenomenon, False, ctx.base_conf, certificate={"reason": "not strongly cospectral"})
    return None


def _coords_plus_theta(ctx: _Ctx):
    """Exact coordinates of ``lambda_j - theta`` over sigma-plus, or None."""
    if not ctx.exact:
        return None
    vals = [ctx.value(j) for j in ctx.plus] + [QuadraticValue.rational(ctx.theta)]
    coords = coordinates(vals)
    if coords is None:
        return None
    th = coords[-1]
    return [sub_coords(c, th) for c in coords[:-1]]


# ---------------------------------------------------------------------------
# periodicity
# ---------------------------------------------------------------------------


def _periodic_from_ctx(ctx: _Ctx) -> TransferVerdict:
    sd, u = ctx.sd, ctx.cu
    vals = ctx.values(ctx.supp)
    rc = ratio_condition(vals, ctx.opts.qmax)
    if rc.status == "fails":
        return TransferVerdict("periodic", False, EXACT, certificate={"witness": rc.witness})
    if rc.status == "inconclusive":
        return TransferVerdict("periodic", None, INCONCLUSIVE, certificate={"probe": rc.witness})
    per = min_period(vals, ctx.opts.qmax)
    chk = check_periodic_at(evolve(sd, per.time), u, ctx.opts.tol)
    conf = _min_conf(rc.confidence, ctx.base_conf)
    holds = True if conf == EXACT else chk.holds
    return TransferVerdict("periodic", holds, conf, time=per.time, exact_time=per.exact, certificate=per.certificate, verified=chk.holds)


def periodicity(g: WeightedGraph, kind, u: int, opts: AnalysisOptions | None = None) -> TransferVerdict:
    """Is vertex ``u`` periodic, and with what minimum period."""
    opts = opts or AnalysisOptions()
    g._check_vertex(u)
    v = 1 if u == 0 else 0
    if g.n == 1:
        return TransferVerdict("periodic", True, EXACT, time=None, note="single vertex: periodic at every time")
    return _periodic_from_ctx(_context(g, kind, u, v, opts))


# ---------------------------------------------------------------------------
# perfect state transfer
# ---------------------------------------------------------------------------


def pst_between_twins(g: WeightedGraph, kind, u: int, v: int, opts: AnalysisOptions | None = None) -> TransferVerdict:
    """PST between a twin pair via the 2-adic valuation test.

    With ``lambda_j - theta = b_j * w`` for a common unit ``w``, PST holds iff
    all ``nu2(b_j)`` agree (``= q``); the minimum time is
    ``pi / (2**q * g' * |w|)`` with ``g'`` the gcd of ``b_j / 2**q``.  At that
    time each ``tau * (lambda_j - theta) = m_j * pi`` with ``m_j`` odd.
    """
    ctx = _context(g, kind, u, v, opts)
    _require_twins(ctx)
    gate = _gate(ctx, "pst")
    if gate is not None:
        return gate
    o = ctx.opts
    diffs = _coords_plus_theta(ctx)
    if diffs is not None:
        w = diffs[0]
        rs = [proportional(d, w) for d in diffs]
        if any(r is None for r in rs):
            j = rs.index(None)
            q = exact_ratio(diffs[j], w)
            cert = {
                "reason": "not periodic",
                "witness": {"pair": [_fmt(ctx.value(ctx.plus[0])), _fmt(ctx.value(ctx.plus[j]))], "ratio": str(q) if q is not None else "irrational"},
            }
            return TransferVerdict("pst", False, EXACT, certificate=cert)
        return _pst_from_ratios(ctx, rs, w, EXACT)
    fl = [float(ctx.sd.eigenvalues[j]) - float(ctx.theta) for j in ctx.plus]
    rs = []
    for x in fl:
        pq = is_rational_ratio(x, fl[0], o.qmax)
        if pq is None:
            t, p = scan_max(ctx.sd, ctx.cu, ctx.cv, o.horizon)
            return TransferVerdict("pst", None, INCONCLUSIVE, certificate={"scan_max": p, "scan_t": t, "horizon": o.horizon})
        rs.append(Fraction(*pq))
    return _pst_from_ratios(ctx, rs, None, NUMERIC)


def _pst_from_ratios(ctx: _Ctx, rs: list[Fraction], w, conf: str) -> TransferVerdict:
    cert: dict = {}
    unit = Fraction(1)
    if w is not None:
        sm = _surd_multiple(w)
        if sm is not None:
            unit, delta = sm
            cert["delta"] = delta
    b = [r * unit for r in rs]
    cert["b_list"] = [str(x) for x in b]
    vals = [nu2(x) for x in b]
    cert["nu2"] = vals
    if len(set(vals)) > 1:
        cert["reason"] = "2-adic valuations differ"
        return TransferVerdict("pst", False, conf, certificate=cert)
    q = vals[0]
    ells = [x / Fraction(2) ** q for x in b]
    gp = rational_gcd(ells)
    cert.update(q=q, g_prime=str(gp), odd_multipliers=[str(l / gp) for l in ells])
    if w is not None:
        exact = ExactTime.from_square(abs(1 / (Fraction(2) ** q * gp / unit)), _square(w))
        tau = float(exact)
    else:
        exact = None
        w_f = float(ctx.sd.eigenvalues[ctx.plus[0]]) - float(ctx.theta)
        tau = math.pi / (2.0**q * float(gp) * abs(w_f))
    chk = check_pst_at(evolve(ctx.sd, tau), ctx.cu, ctx.cv, ctx.opts.tol)
    holds = True if conf == EXACT else chk.holds
    return TransferVerdict("pst", holds, conf, time=tau, exact_time=exact, certificate=cert, verified=chk.holds)


# ---------------------------------------------------------------------------
# pretty good state transfer
# ---------------------------------------------------------------------------


def pgst_between_twins(g: WeightedGraph, kind, u: int, v: int, opts: AnalysisOptions | None = None) -> TransferVerdict:
    """PGST between a strongly cospectral twin pair.

    PGST fails exactly when some integers ``l_j`` over sigma-plus satisfy
    ``sum l_j (lambda_j - theta) = 0`` with ``sum l_j`` odd.  Such vectors
    form a lattice, and parity is linear, so it is enough to test a Z-basis
    of the integer kernel: that makes the recognised case an exact decision.
    Otherwise a bounded search over ``[-B, B]^r`` is run and a clean result
    is reported as consistent with PGST up to that bound.
    """
    ctx = _context(g, kind, u, v, opts)
    _require_twins(ctx)
    gate = _gate(ctx, "pgst")
    if gate is not None:
        return gate
    diffs = _coords_plus_theta(ctx)
    if diffs is not None:
        keys = sorted({k for d in diffs for k in d}, key=repr)
        rows = [[d.get(k, Fraction(0)) for d in diffs] for k in keys]
        basis = integer_kernel(rows)
        odd = [l for l in basis if sum(l) % 2]
        if odd:
            l = odd[0]
            cert = {"relation": l, "relation_sum": sum(l), "theta_coefficient": -sum(l)}
            return TransferVerdict("pgst", False, EXACT, certificate=cert)
        cert = {"kernel_basis": basis}
        if not basis:
            cert["independent"] = True
        return TransferVerdict("pgst", True, EXACT, certificate=cert)
    return _pgst_search(ctx)


def _pgst_search(ctx: _Ctx, budget: int = 2 * 10**7) -> TransferVerdict:
    x = np.array([float(ctx.sd.eigenvalues[j]) - float(ctx.theta) for j in ctx.plus])
    r = len(x)
    bound = ctx.opts.bound
    if r == 1:
        return TransferVerdict("pgst", True, NUMERIC, status=f"consistent (bound {bound})", certificate={"bound": bound})
    if (2 * bound + 1) ** (r - 1) > budget:
        bound = max(1, int((budget ** (1 / (r - 1)) - 1) // 2))
    rng = np.arange(-bound, bound + 1)
    scale = float(np.max(np.abs(x)))
    head = x[:-1]
    for block in itertools.product(rng, repeat=max(0, r - 3)):
        grids = np.meshgrid(*([rng] * min(2, r - 1)), indexing="ij")
        ls = np.stack([gr.ravel() for gr in grids], axis=1)
        if block:
            ls = np.hstack([np.tile(block, (len(ls), 1)), ls])
        partial = ls @ head
        last = -partial / x[-1]
        lr = np.round(last)
        resid = np.abs(partial + lr * x[-1])
        ok = (np.abs(lr) <= bound) & (resid < 1e-9 * scale * (1 + np.abs(ls).sum(axis=1) + np.abs(lr)))
        ok &= ((ls.sum(axis=1) + lr) % 2 != 0)
        hit = np.flatnonzero(ok)
        if hit.size:
            l = [int(a) for a in ls[hit[0]]] + [int(lr[hit[0]])]
            k = math.gcd(*l)  # odd, since the sum is odd
            l = [a // k for a in l]
            cert = {"relation": l, "bound": bound}
            return TransferVerdict("pgst", False, NUMERIC, certificate=cert)
    return TransferVerdict("pgst", True, NUMERIC, status=f"consistent (bound {bound})", certificate={"bound": bound})


# ---------------------------------------------------------------------------
# fractional revival
# ---------------------------------------------------------------------------


def _fr_params(ctx: _Ctx, tau: float, gamma_over_pi, gamma_rational: bool | None) -> FRParams:
    l1 = float(ctx.sd.eigenvalues[ctx.plus[0]])
    th = float(ctx.theta)
    gamma = (tau * (l1 - th) / 2) % (2 * math.pi)
    zeta = (tau * (l1 + th) / 2) % (2 * math.pi)
    alpha = np.exp(1j * zeta) * math.cos(gamma)
    beta = 1j * np.exp(1j * zeta) * math.sin(gamma)
    if isinstance(gamma_over_pi, Fraction):
        red = gamma_over_pi % 2
        proper = red.denominator != 1
        balanced = (4 * red).denominator == 1 and (4 * red).numerator % 2 == 1
        qq = red.denominator
        downstream = f"periodic at {qq}*tau" + (f"; PST at {qq // 2}*tau" if qq % 2 == 0 else "")
        text = str(red)
    else:
        tol = math.sqrt(ctx.opts.tol)
        proper = abs(math.sin(gamma)) > tol
        balanced = abs(abs(math.cos(gamma)) - abs(math.sin(gamma))) < tol
        downstream = "PGST (gamma is an irrational multiple of pi)" if gamma_rational is False else "unknown"
        text = str(gamma_over_pi) if gamma_over_pi is not None else None
    return FRParams(tau, gamma, zeta, complex(alpha), complex(beta), proper, balanced, text, gamma_rational, downstream)


def fr_between_twins(g: WeightedGraph, kind, u: int, v: int, opts: AnalysisOptions | None = None) -> TransferVerdict:
    """Minimum-time FR between a strongly cospectral twin pair.

    FR at ``tau`` needs ``exp(i tau lambda_j)`` equal across sigma-plus, so
    all ``(lambda_1 - lambda_j)/(lambda_1 - lambda_2)`` must be rational.
    Then ``tau = 2*pi*q/(lambda_1 - lambda_2)`` with ``q`` the lcm of their
    denominators, ``gamma = tau*(lambda_1 - theta)/2`` and
    ``zeta = tau*(lambda_1 + theta)/2``.
    """
    ctx = _context(g, kind, u, v, opts)
    _require_twins(ctx)
    gate = _gate(ctx, "fr")
    if gate is not None:
        gate.certificate["note"] = "no proper FR; non-proper FR is periodicity"
        return gate
    o = ctx.opts
    if len(ctx.plus) == 1:
        return TransferVerdict("fr", True, ctx.base_conf, note="FR at every time: U(t)e_u stays in span{e_u, e_v}")
    diffs = _coords_plus_theta(ctx)
    if diffs is not None:
        # lambda_1 - lambda_j = (lambda_1 - theta) - (lambda_j - theta)
        d = [sub_coords(diffs[0], x) for x in diffs]
        rs = [Fraction(1)]
        for j in range(2, len(d)):
            r = proportional(d[j], d[1])
            if r is None:
                q = exact_ratio(d[j], d[1])
                cert = {
                    "reason": "irrational ratio in sigma-plus",
                    "witness": {
                        "ratio": str(q) if q is not None else "irrational",
                        "ratio_value": float(q) if q is not None else None,
                        "quadruple": [_fmt(ctx.value(ctx.plus[i])) for i in (0, j, 0, 1)],
                    },
                }
                return TransferVerdict("fr", False, EXACT, certificate=cert)
            rs.append(r)
        q = lcm(*(r.denominator for r in rs))
        exact = ExactTime.from_square(2 * q, _square(d[1]))
        tau = float(exact)
        r_theta = proportional(diffs[0], d[1])
        cert: dict = {"q": q, "ratios": [str(r) for r in rs]}
        if r_theta is not None:
            gp = q * r_theta
            cert.update(p_theta=r_theta.numerator, q_theta=r_theta.denominator)
            fr = _fr_params(ctx, tau, gp, True)
        else:
            gq = exact_ratio(diffs[0], d[1])
            fr = _fr_params(ctx, tau, gq * q if gq is not None else None, False)
        if ctx.sd.integral:
            cert["sigma_plus_integral"] = all(
                isinstance(ctx.value(j), QuadraticValue) and ctx.value(j).is_integer for j in ctx.plus
            )
        conf = EXACT
    else:
        fl = [float(ctx.sd.eigenvalues[j]) for j in ctx.plus]
        rs = [Fraction(1)]
        for j in range(2, len(fl)):
            pq = is_rational_ratio(fl[0] - fl[j], fl[0] - fl[1], o.qmax)
            if pq is None:
                return TransferVerdict("fr", None, INCONCLUSIVE, certificate={"probe_index": j})
            rs.append(Fraction(*pq))
        q = lcm(*(r.denominator for r in rs))
        tau = 2 * math.pi * q / (fl[0] - fl[1])
        exact = None
        pq = is_rational_ratio(fl[0] - float(ctx.theta), fl[0] - fl[1], o.qmax)
        cert = {"q": q}
        fr = _fr_params(ctx, tau, q * Fraction(*pq) if pq else None, None if pq is None else True)
        conf = NUMERIC
    U = evolve(ctx.sd, tau)
    chk = check_fr_at(U, ctx.cu, ctx.cv, o.tol)
    match = abs(U.matrix[ctx.cu, ctx.cu] - fr.alpha) < 1e-8 and abs(U.matrix[ctx.cu, ctx.cv] - fr.beta) < 1e-8
    holds = True if conf == EXACT else (chk.holds and match)
    return TransferVerdict("fr", holds, conf, time=tau, exact_time=exact, certificate=cert, fr=fr, verified=chk.holds and match)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairReport:
    pair: tuple[int, int]
    kind: str
    twin: dict | None
    strongly_cospectral: bool
    sigma_plus: tuple[str, ...]
    sigma_minus: tuple[str, ...]
    delta: int | None
    b_list: tuple[str, ...] | None
    verdicts: dict
    confidence: str
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        def vd(v: TransferVerdict) -> dict:
            out = {"status": v.status, "holds": v.holds, "confidence": v.confidence}
            if v.time is not None:
                out["time"] = v.time
            if v.exact_time is not None:
                out["time_exact"] = str(v.exact_time)
            if v.verified is not None:
                out["verified"] = v.verified
            return out

        per, pst, pgst, fr = (self.verdicts[k] for k in ("periodic", "pst", "pgst", "fr"))
        d_per = vd(per)
        d_per["rho"] = per.time
        d_pst = vd(pst)
        d_pst["tau"] = pst.time
        d_pgst = vd(pgst)
        d_pgst["bound"] = pgst.certificate.get("bound")
        d_fr = vd(fr)
        d_fr["tau"] = fr.time
        if fr.fr is not None:
            p = fr.fr
            d_fr.update(
                gamma=p.gamma,
                zeta=p.zeta,
                proper=p.proper,
                balanced=p.balanced,
                gamma_over_pi=p.gamma_over_pi,
                gamma_rational=p.gamma_rational,
                downstream=p.downstream,
            )
        for name, v, d in (("periodic", per, d_per), ("pst", pst, d_pst), ("pgst", pgst, d_pgst), ("fr", fr, d_fr)):
            d["certificate"] = _jsonable(v.certificate)
            if v.note:
                d["note"] = v.note
        return _jsonable({
            "pair": list(self.pair),
            "kind": self.kind,
            "twin": self.twin,
            "strongly_cospectral": self.strongly_cospectral,
            "sigma_plus": list(self.sigma_plus),
            "sigma_minus": list(self.sigma_minus),
            "delta": self.delta,
            "b_list": None if self.b_list is None else list(self.b_list),
            "verdicts": {"periodic": d_per, "pst": d_pst, "pgst": d_pgst, "fr": d_fr},
            "confidence": self.confidence,
            "notes": list(self.notes),
        })


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return str(x)


def _screen_non_twins(ctx: _Ctx) -> dict:
    """Numeric screening for pairs outside twin theory."""
    o = ctx.opts
    per = _periodic_from_ctx(ctx)
    if not ctx.same_component:
        no = {k: TransferVerdict(k, False, EXACT, certificate={"reason": "different components"}) for k in ("pst", "pgst", "fr")}
        return {"periodic": per, **no}
    if not ctx.sc:
        base = {"reason": "not strongly cospectral (numeric screen)"}
        pst = TransferVerdict("pst", False, NUMERIC, certificate=dict(base))
        pgst = TransferVerdict("pgst", False, NUMERIC, certificate=dict(base))
    else:
        if per.holds and per.time is not None:
            tau = per.time / 2
            chk = check_pst_at(evolve(ctx.sd, tau), ctx.cu, ctx.cv, o.tol)
            pst = TransferVerdict("pst", chk.holds, NUMERIC, time=tau if chk.holds else None, verified=chk.holds, certificate={"checked_at": tau})
        elif per.holds is False:
            pst = TransferVerdict("pst", False, per.confidence, certificate={"reason": "not periodic"})
        else:
            pst = TransferVerdict("pst", None, INCONCLUSIVE)
        t, p = scan_max(ctx.sd, ctx.cu, ctx.cv, o.horizon)
        pgst = TransferVerdict("pgst", None, NUMERIC, status="screened", certificate={"scan_max": p, "scan_t": t, "horizon": o.horizon})
    fr = TransferVerdict("fr", None, INCONCLUSIVE, note="outside twin theory")
    return {"periodic": per, "pst": pst, "pgst": pgst, "fr": fr}


def analyze_pair(g: WeightedGraph, kind, u: int, v: int, opts: AnalysisOptions | None = None) -> PairReport:
    """Full bundle of verdicts for the pair ``(u, v)`` under ``kind``."""
    opts = opts or AnalysisOptions()
    ctx = _context(g, kind, u, v, opts)
    notes = list(ctx.notes)
    twin = None
    if ctx.twins:
        ts = ctx.ts
        twin = {
            "omega": str(ts.omega),
            "eta": str(ts.eta),
            "theta": str(ctx.theta),
            "type": ts.kind,
            "set_size": len(ts),
        }
        verdicts = {
            "periodic": _periodic_from_ctx(ctx),
            "pst": pst_between_twins(g, kind, u, v, opts),
            "pgst": pgst_between_twins(g, kind, u, v, opts),
            "fr": fr_between_twins(g, kind, u, v, opts),
        }
    else:
        notes.append("outside twin theory: numeric screening only")
        verdicts = _screen_non_twins(ctx)
    sp = tuple(_fmt(ctx.value(j)) for j in ctx.plus)
    sm = tuple(_fmt(ctx.value(j)) for j in ctx.minus)
    delta = b_list = None
    for key in ("pst", "periodic"):
        c = verdicts[key].certificate
        if "delta" in c and "b_list" in c:
            delta, b_list = c["delta"], tuple(c["b_list"])
            break
    conf = _min_conf(*(vv.confidence for vv in verdicts.values()))
    kind_name = build_hamiltonian(WeightedGraph(1), kind).kind.value
    return PairReport((u, v), kind_name, twin, ctx.sc, sp, sm, delta, b_list, verdicts, conf, tuple(notes))


def twin_pairs(g: WeightedGraph) -> list[tuple[int, int]]:
    """All pairs ``(u, v)``, ``u < v``, inside some twin set."""
    from .graph import twin_sets

    return [p for ts in twin_sets(g) for p in itertools.combinations(ts.vertices, 2)]
