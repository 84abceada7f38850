"""Search for singular points of V(f) outside Z(Sigma) over a prime field.

Finding one is strong evidence that the hypersurface is not quasi-smooth.
Finding none proves nothing over C; reports say so.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cox import CoxPolynomial
from .fan import Fan, checked, is_relevant, relevance_table

DEFAULT_PRIME = 7
DEFAULT_BUDGET = 10**7
_CHUNK = 1 << 16

NONE_FOUND_NOTE = (
    "no singular point found over the prime field; this is evidence for, "
    "not a proof of, quasi-smoothness over C"
)
FOUND_NOTE = "singular point of V(f) outside Z(Sigma) found over the prime field"


@dataclass(frozen=True)
class WitnessReport:
    found: bool
    witness: tuple[int, ...] | None
    mode: str
    fell_back: bool
    prime: int
    points_examined: int

    @property
    def verdict(self) -> str:
        return "found" if self.found else "none_found"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness is not None else None,
            "mode": self.mode,
            "fell_back_to_randomized": self.fell_back,
            "prime": self.prime,
            "points_examined": self.points_examined,
            "note": FOUND_NOTE if self.found else NONE_FOUND_NOTE,
        }


def thread_count() -> int:
    """Worker cap from TORIC_NL_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("TORIC_NL_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else (os.cpu_count() or 1)


class _Evaluator:
    """Evaluates f and all its partials mod p on batches of points."""

    def __init__(self, fan: Fan, f: CoxPolynomial, p: int):
        den = 1
        for c in f.terms.values():
            den = math.lcm(den, c.denominator)
        if den % p == 0:
            raise ValueError(f"prime {p} divides a coefficient denominator of f")
        n = fan.n
        ints = {m: int(c * den) % p for m, c in f.terms.items()}
        self.p = p
        self.n = n
        self.polys = [ints]
        for i in range(n):
            d = {}
            for m, c in ints.items():
                if m[i]:
                    dm = m[:i] + (m[i] - 1,) + m[i + 1 :]
                    d[dm] = (d.get(dm, 0) + c * m[i]) % p
            self.polys.append({m: c for m, c in d.items() if c})
        self.maxexp = [max((m[i] for poly in self.polys for m in poly), default=0) for i in range(n)]
        self.relevant = np.array(relevance_table(fan), dtype=bool)

    def qualifying(self, X: np.ndarray) -> np.ndarray:
        """Boolean mask of rows that are singular points off Z(Sigma)."""
        p = self.p
        powers = []
        for i in range(self.n):
            col = X[:, i]
            pw = [np.ones_like(col)]
            for _ in range(self.maxexp[i]):
                pw.append(pw[-1] * col % p)
            powers.append(pw)
        alive = np.ones(len(X), dtype=bool)
        # partials first: they rule out most points quickly
        for poly in self.polys[1:] + self.polys[:1]:
            idx = np.nonzero(alive)[0]
            if idx.size == 0:
                break
            acc = np.zeros(idx.size, dtype=np.int64)
            for m, c in poly.items():
                term = np.full(idx.size, c, dtype=np.int64)
                for i, e in enumerate(m):
                    if e:
                        term = term * powers[i][e][idx] % p
                acc = (acc + term) % p
            alive[idx[acc != 0]] = False
        zero_mask = ((X == 0).astype(np.int64) << np.arange(self.n, dtype=np.int64)).sum(axis=1)
        return alive & self.relevant[zero_mask]


def _points(start: int, stop: int, p: int, n: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    X = np.empty((idx.size, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        X[:, i] = idx % p
        idx //= p
    return X


def singular_witness_search(fan: Fan, f: CoxPolynomial, prime: int = DEFAULT_PRIME,
                            mode: str = "exhaustive", budget: int = DEFAULT_BUDGET,
                            seed: int = 0) -> WitnessReport:
    """Look for x over GF(prime) with f(x) = 0, all df/dz_i(x) = 0 and x off Z(Sigma).

    Exhaustive mode scans all ``prime**n`` points in lexicographic order
    (first coordinate slowest) and returns the first witness in that order;
    if that exceeds ``budget`` it falls back to ``budget`` random points
    drawn from ``seed``.
    """
    checked(fan)
    if mode not in ("exhaustive", "randomized"):
        raise ValueError(f"unknown search mode {mode!r}")
    ev = _Evaluator(fan, f, prime)
    n = fan.n
    total = prime**n
    fell_back = False
    if mode == "exhaustive" and total > budget:
        mode, fell_back = "randomized", True

    if mode == "exhaustive":
        bounds = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]

        def scan(b):
            X = _points(b[0], b[1], prime, n)
            hits = np.nonzero(ev.qualifying(X))[0]
            if hits.size:
                return tuple(int(v) for v in X[hits[0]]), int(hits[0]) + 1
            return None, b[1] - b[0]

        examined = 0
        workers = min(thread_count(), len(bounds))
        if workers > 1:
            pool = ThreadPoolExecutor(max_workers=workers)
            try:
                for fut in [pool.submit(scan, b) for b in bounds]:
                    witness, count = fut.result()
                    examined += count
                    if witness is not None:
                        return WitnessReport(True, witness, mode, fell_back, prime, examined)
            finally:
                pool.shutdown(wait=True, cancel_futures=True)
        else:
            for b in bounds:
                witness, count = scan(b)
                examined += count
                if witness is not None:
                    return WitnessReport(True, witness, mode, fell_back, prime, examined)
        return WitnessReport(False, None, mode, fell_back, prime, examined)

    rng = np.random.default_rng(seed)
    examined = 0
    while examined < budget:
        size = min(_CHUNK, budget - examined)
        X = rng.integers(0, prime, size=(size, n), dtype=np.int64)
        hits = np.nonzero(ev.qualifying(X))[0]
        if hits.size:
            examined += int(hits[0]) + 1
            return WitnessReport(True, tuple(int(v) for v in X[hits[0]]), mode, fell_back,
                                 prime, examined)
        examined += size
    return WitnessReport(False, None, mode, fell_back, prime, examined)


def verify_witness(fan: Fan, f: CoxPolynomial, x, prime: int) -> bool:
    """Independent re-check of a witness with plain integer arithmetic."""
    den = 1
    for c in f.terms.values():
        den = math.lcm(den, c.denominator)

    def ev(terms):
        s = 0
        for m, c in terms:
            t = c
            for xi, e in zip(x, m):
                t *= xi**e
            s += t
        return s % prime

    base = [(m, int(c * den)) for m, c in f.terms.items()]
    if ev(base):
        return False
    for i in range(fan.n):
        part = [(m[:i] + (m[i] - 1,) + m[i + 1 :], c * m[i]) for m, c in base if m[i]]
        if ev(part):
            return False
    return is_relevant(fan, [i for i, xi in enumerate(x) if xi % prime == 0])
