"""Small graphs shared across the test modules, plus independent oracles."""

import math
from fractions import Fraction

import numpy as np

from twinwalk import families as F
from twinwalk.graph import WeightedGraph


def _corpus():
    g = {
        "K2": F.complete(2),
        "P3": F.path(3),
        "C4": F.cycle(4),
        "K4-e": F.complete_minus_edge(4),
        "K5-e": F.complete_minus_edge(5),
        "CP2": F.cocktail_party(2),
        "CP3": F.cocktail_party(3),
        "CP4": F.cocktail_party(4),
        "K2,3": F.complete_bipartite(2, 3),
        "K1,4": F.star(4),
        "K3(-1,1/2)": F.complete(3, omega=-1, eta=Fraction(1, 2)),
        "K4(2,3)": F.complete(4, omega=2, eta=3),
        "figure2": F.figure2(),
        "P4": F.path(4),
        "C5": F.cycle(5),
        "K2vP3": F.join(F.complete(2), F.path(3)),
        "K2,2,2": F.complete_multipartite([2, 2, 2]),
        "loops": WeightedGraph.from_edges(
            4, [(0, 2, Fraction(1, 2)), (1, 2, Fraction(1, 2)), (2, 3, 2), (0, 1, 3)], loops={0: 1, 1: 1, 3: -2}
        ),
    }
    return g


CORPUS = _corpus()


def taylor_expm(m: np.ndarray, t: float, terms: int = 40) -> np.ndarray:
    """exp(i t M) by scaling and squaring a truncated Taylor series."""
    x = 1j * t * np.asarray(m, dtype=complex)
    norm = np.max(np.sum(np.abs(x), axis=1)) if x.size else 0.0
    s = max(0, math.ceil(math.log2(norm)) + 1) if norm > 0 else 0
    x = x / 2**s
    out = np.eye(len(m), dtype=complex)
    term = np.eye(len(m), dtype=complex)
    for k in range(1, terms):
        term = term @ x / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out
