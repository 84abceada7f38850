"""Exact integer and rational linear algebra.

Everything here works on plain Python ints and ``fractions.Fraction`` so
there is no overflow anywhere. Matrices are passed around as sequences of
rows; results are returned as tuples of tuples so they can be hashed and
shared freely between threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple[Fraction, ...], ...]


def as_int_matrix(rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    """Freeze ``rows`` into an IntMatrix, checking the shape is rectangular."""
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if ncols is None:
        ncols = len(out[0]) if out else 0
    for row in out:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
    return out


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], inner: int | None = None) -> list[list]:
    if inner is None:
        inner = len(b)
    ncols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(ncols)] for row in a]


def det(a: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign, prev = 1, 1
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * (m[n - 1][n - 1] if n else 1)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``U * A * V == S`` with U, V unimodular and S diagonal."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    rows: int
    cols: int

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i][i] for i in range(min(self.rows, self.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]], ncols: int | None = None) -> SmithDecomposition:
    """Smith normal form by elementary row/column operations.

    The pivot is the entry of least absolute value in the remaining block
    (lowest row, then lowest column on ties), so the decomposition is a
    deterministic function of the input. ``ncols`` is only needed for
    matrices with zero rows.
    """
    S = [list(row) for row in as_int_matrix(A, ncols)]
    m = len(S)
    n = ncols if ncols is not None else (len(S[0]) if S else 0)
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = S[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
                    clean = clean and S[t][j] == 0
            if not clean:
                # a remainder is now smaller than the pivot; move it in
                best = None
                for i in range(t, m):
                    x = S[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, t)
                for j in range(t, n):
                    x = S[t][j]
                    if x and abs(x) < best[0]:
                        best = (abs(x), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]

    return SmithDecomposition(
        U=as_int_matrix(U, m), S=as_int_matrix(S, n), V=as_int_matrix(V, n), rows=m, cols=n
    )


def is_smith_form(S: Sequence[Sequence[int]]) -> bool:
    m = len(S)
    n = len(S[0]) if S else 0
    for i in range(m):
        for j in range(n):
            if i != j and S[i][j]:
                return False
    diag = [S[i][i] for i in range(min(m, n))]
    if any(d < 0 for d in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return True


def hermite_rows(Q: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """Row-style Hermite normal form of a full row rank integer matrix."""
    H = [list(r) for r in Q]
    r = 0
    for c in range(ncols):
        if r == len(H):
            break
        while True:
            nz = [i for i in range(r, len(H)) if H[i][c]]
            if not nz:
                break
            i = min(nz, key=lambda k: (abs(H[k][c]), k))
            H[r], H[i] = H[i], H[r]
            done = True
            for k in range(r + 1, len(H)):
                if H[k][c]:
                    q = H[k][c] // H[r][c]
                    H[k] = [x - q * y for x, y in zip(H[k], H[r])]
                    done = done and H[k][c] == 0
            if done:
                break
        if r < len(H) and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
            for k in range(r):
                q = H[k][c] // H[r][c]
                if q:
                    H[k] = [x - q * y for x, y in zip(H[k], H[r])]
            r += 1
    return as_int_matrix(H, ncols)


@dataclass(frozen=True)
class Cokernel:
    """Structure of ``Z^rows / im(A)``.

    ``projection`` has one row per free coordinate followed by one row per
    torsion factor; torsion rows are to be read modulo the matching entry
    of ``torsion``.
    """

    free_rank: int
    torsion: tuple[int, ...]
    projection: IntMatrix

    def project(self, x: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        vals = [sum(p * v for p, v in zip(row, x)) for row in self.projection]
        free = tuple(vals[: self.free_rank])
        tors = tuple(v % d for v, d in zip(vals[self.free_rank :], self.torsion))
        return free, tors


def cokernel(A: Sequence[Sequence[int]], ncols: int | None = None) -> Cokernel:
    """Cokernel of the integer map given by ``A`` (columns are images)."""
    snf = smith_normal_form(A, ncols)
    m = snf.rows
    diag = list(snf.diagonal) + [0] * (m - len(snf.diagonal))
    free_idx = [i for i in range(m) if diag[i] == 0]
    tors_idx = [i for i in range(m) if diag[i] > 1]
    free_rows = hermite_rows([snf.U[i] for i in free_idx], m) if free_idx else ()
    tors_rows = tuple(tuple(x % diag[i] for x in snf.U[i]) for i in tors_idx)
    return Cokernel(
        free_rank=len(free_idx),
        torsion=tuple(diag[i] for i in tors_idx),
        projection=tuple(free_rows) + tors_rows,
    )


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int], ncols: int | None = None) -> tuple[int, ...] | None:
    """An integer solution of ``A x = b``, or None if there is none over Z."""
    snf = smith_normal_form(A, ncols)
    if len(b) != snf.rows:
        raise ValueError("right-hand side has the wrong length")
    c = [sum(u * x for u, x in zip(row, b)) for row in snf.U]
    y = [0] * snf.cols
    diag = snf.diagonal
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci:
                return None
        elif ci % d:
            return None
        else:
            y[i] = ci // d
    return tuple(sum(v * yj for v, yj in zip(row, y)) for row in snf.V)


# ---------------------------------------------------------------------------
# Rank over Q
# ---------------------------------------------------------------------------


def _integer_rows(A: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in A:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = math.lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination.

    Pivots are taken column by column from the lowest-index remaining row.
    The input lists are consumed.
    """
    M = [r for r in rows if any(r)]
    if not M:
        return 0
    ncols = len(M[0])
    rank, prev = 0, 1
    for c in range(ncols):
        piv_i = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if piv_i is None:
            continue
        M[rank], M[piv_i] = M[piv_i], M[rank]
        prow = M[rank]
        piv = prow[c]
        tail = prow[c + 1 :]
        keep = M[: rank + 1]
        for row in M[rank + 1 :]:
            a = row[c]
            if a:
                new = [(piv * x - a * y) // prev for x, y in zip(row[c + 1 :], tail)]
            elif prev == 1:
                new = [piv * x for x in row[c + 1 :]]
            else:
                new = [piv * x // prev for x in row[c + 1 :]]
            if any(new):
                keep.append(row[: c + 1] + new)
        M = keep
        prev = piv
        rank += 1
        if rank == len(M):
            break
    return rank


def rank_mod_p(A: Sequence[Sequence[int]], p: int) -> int:
    """Rank of an integer matrix over GF(p), p < 2**31."""
    if not A or not len(A[0]):
        return 0
    M = np.array([[int(x) % p for x in row] for row in A], dtype=np.int64)
    return _rank_mod_p_array(M, p)


def _rank_mod_p_array(M: np.ndarray, p: int) -> int:
    M = M.copy()
    nrows, ncols = M.shape
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(M[rank:, c])[0]
        if nz.size == 0:
            continue
        i = rank + nz[0]
        if i != rank:
            M[[rank, i]] = M[[i, rank]]
        inv = pow(int(M[rank, c]), -1, p)
        M[rank] = (M[rank] * inv) % p
        below = M[rank + 1 :, c].copy()
        if below.any():
            M[rank + 1 :] = (M[rank + 1 :] - np.outer(below, M[rank]) % p) % p
        rank += 1
    return rank


_PRIMES_31 = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563)


def random_prime(rng: random.Random, bits: int = 30) -> int:
    """A random prime with exactly ``bits`` bits (Miller-Rabin, deterministic bases)."""
    while True:
        n = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_prime(n):
            return n


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def rank_rational(A: Sequence[Sequence], method: str = "exact", ncols: int | None = None) -> int:
    """Exact rank of a rational matrix.

    ``method="exact"`` runs fraction-free elimination. ``method="modular"``
    first computes the rank modulo two large primes; that number is only
    trusted when it equals ``min(rows, cols)`` (the rank over GF(p) never
    exceeds the rank over Q), otherwise the exact path decides.
    """
    rows = _integer_rows(A)
    if not rows:
        return 0
    width = len(rows[0]) if ncols is None else ncols
    if width == 0:
        return 0
    if method == "modular":
        full = min(len(rows), width)
        if any(rank_mod_p(rows, p) == full for p in _PRIMES_31[:2]):
            return full
    elif method != "exact":
        raise ValueError(f"unknown rank method {method!r}")
    if len(rows) > width:
        rows = [list(col) for col in zip(*rows)]
    return bareiss_rank(rows)


def rank_of_vectors(vectors, dim: int, method: str = "exact") -> int:
    """Rank of sparse vectors given as ``{index: value}`` dicts in Q^dim.

    Unit-vector-like vectors (a single nonzero) are split off first: each
    distinct support index contributes one to the rank and that coordinate
    is then projected away from the rest, which is exact and keeps the
    dense elimination small. Identical vectors (up to a scalar) are
    dropped.
    """
    singles: set[int] = set()
    dense: dict[tuple, None] = {}
    for vec in vectors:
        items = [(k, v) for k, v in vec.items() if v]
        if not items:
            continue
        if len(items) == 1:
            singles.add(items[0][0])
            continue
        dense[_normalized(items)] = None
    left = sorted({k for key in dense for k, _ in key} - singles)
    if not left:
        return len(singles)
    pos = {k: i for i, k in enumerate(left)}
    rows = []
    seen = set()
    for key in dense:
        proj = tuple((k, v) for k, v in key if k in pos)
        if not proj:
            continue
        proj = _normalized(proj)
        if proj in seen:
            continue
        seen.add(proj)
        row = [0] * len(left)
        for k, v in proj:
            row[pos[k]] = v
        rows.append(row)
    return len(singles) + rank_rational(rows, method=method, ncols=len(left))


def _normalized(items) -> tuple:
    """Sorted integer coefficients with content 1 and positive leading term."""
    items = sorted(items)
    den = 1
    for _, v in items:
        if isinstance(v, Fraction):
            den = math.lcm(den, v.denominator)
    ints = [(k, int(v * den)) for k, v in items]
    g = 0
    for _, v in ints:
        g = math.gcd(g, v)
    if ints[0][1] < 0:
        g = -g
    return tuple((k, v // g) for k, v in ints)


# ---------------------------------------------------------------------------
# Exact linear feasibility
# ---------------------------------------------------------------------------


def nonnegative_solution(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Some x >= 0 with ``A x = b`` over Q, or None if infeasible.

    Phase one of the simplex method in exact arithmetic with Bland's rule,
    so it always terminates.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    T = []
    for row, bi in zip(A, b):
        row = [Fraction(x) for x in row]
        bi = Fraction(bi)
        if bi < 0:
            row = [-x for x in row]
            bi = -bi
        T.append(row + [Fraction(int(i == len(T))) for i in range(m)] + [bi])
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimise the sum of artificials -> reduced costs
    obj = [Fraction(0)] * (width + 1)
    for row in T:
        for j in range(width + 1):
            obj[j] -= row[j]
    for j in range(n, width):
        obj[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # unbounded cannot happen for phase one
            break
        _pivot(T, obj, best[1], enter)
        basis[best[1]] = enter
    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][-1]
    return tuple(x)


def _pivot(T, obj, r, c):
    pr = T[r]
    pv = pr[c]
    T[r] = pr = [x / pv for x in pr]
    for i, row in enumerate(T):
        if i != r and row[c]:
            f = row[c]
            T[i] = [x - f * y for x, y in zip(row, pr)]
    if obj[c]:
        f = obj[c]
        obj[:] = [x - f * y for x, y in zip(obj, pr)]


def solve_rational(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...]:
    """Unique solution of a square nonsingular rational system."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[c], M[piv] = M[piv], M[c]
        pr = M[c]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c] / pr[c]
                M[i] = [x - f * y for x, y in zip(M[i], pr)]
    return tuple(M[i][n] / M[i][i] for i in range(n))
