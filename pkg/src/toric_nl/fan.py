"""Complete simplicial fans and their class groups."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .exact_linalg import Cokernel, IntMatrix, cokernel, det, nonnegative_solution


class FanStructureError(ValueError):
    """The fan data is malformed (bad indices, wrong vector lengths, ...)."""


class FanValidationError(ValueError):
    """The fan is well formed but fails one of the fan axioms."""

    def __init__(self, report: "ValidationReport"):
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class Fan:
    """Rays plus maximal cones. Cone entries are 0-based ray indices.

    Rays keep the order they were given in; variable ``z_{i+1}`` of the Cox
    ring belongs to ``rays[i]``.
    """

    dim: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    @classmethod
    def from_data(cls, dim: int, rays: Iterable[Sequence[int]], cones: Iterable[Iterable[int]],
                  name: str | None = None, one_based: bool = False) -> "Fan":
        if not isinstance(dim, int) or dim < 1:
            raise FanStructureError(f"dim must be a positive integer, got {dim!r}")
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        for i, r in enumerate(rays):
            if len(r) != dim:
                raise FanStructureError(f"ray {i + 1} has {len(r)} coordinates, expected {dim}")
        shift = 1 if one_based else 0
        out = []
        for k, cone in enumerate(cones):
            idx = []
            for i in cone:
                j = int(i) - shift
                if not 0 <= j < len(rays):
                    raise FanStructureError(f"cone {k + 1} refers to ray {i}, which does not exist")
                idx.append(j)
            if len(set(idx)) != len(idx):
                raise FanStructureError(f"cone {k + 1} repeats a ray")
            out.append(tuple(sorted(idx)))
        if not out:
            raise FanStructureError("fan has no cones")
        return cls(dim=dim, rays=rays, cones=tuple(out), name=name)

    @property
    def n(self) -> int:
        return len(self.rays)

    def relabel(self, perm: Sequence[int]) -> "Fan":
        """Fan with ray ``i`` moved to position ``perm[i]``."""
        rays = [None] * self.n
        for i, j in enumerate(perm):
            rays[j] = self.rays[i]
        cones = tuple(tuple(sorted(perm[i] for i in c)) for c in self.cones)
        return Fan(self.dim, tuple(rays), cones, self.name)


@dataclass(frozen=True)
class ValidationReport:
    primitive: bool
    simplicial: bool
    facet_pairing: bool
    proper_intersection: bool
    rays_used: bool
    non_primitive_rays: tuple[int, ...] = ()
    duplicate_rays: tuple[int, ...] = ()
    bad_cones: tuple[int, ...] = ()
    unmatched_facets: tuple[tuple[int, ...], ...] = ()
    overlapping_cones: tuple[tuple[int, int], ...] = ()
    unused_rays: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return (self.primitive and self.simplicial and self.facet_pairing
                and self.proper_intersection and self.rays_used)

    def summary(self) -> str:
        if self.ok:
            return "fan is valid"
        parts = []
        if not self.primitive:
            parts.append(f"non-primitive or repeated rays {list(self.non_primitive_rays + self.duplicate_rays)}")
        if not self.simplicial:
            parts.append(f"non-simplicial cones {list(self.bad_cones)}")
        if not self.facet_pairing:
            parts.append(f"{len(self.unmatched_facets)} facets not shared by exactly two cones")
        if not self.proper_intersection:
            parts.append(f"improperly intersecting cone pairs {list(self.overlapping_cones)}")
        if not self.rays_used:
            parts.append(f"rays in no cone {list(self.unused_rays)}")
        return "; ".join(parts)

    def to_dict(self) -> dict:
        """JSON-ready form with 1-based indices."""
        return {
            "ok": self.ok,
            "primitive": self.primitive,
            "simplicial": self.simplicial,
            "facet_pairing": self.facet_pairing,
            "proper_intersection": self.proper_intersection,
            "rays_used": self.rays_used,
            "non_primitive_rays": [i + 1 for i in self.non_primitive_rays],
            "duplicate_rays": [i + 1 for i in self.duplicate_rays],
            "bad_cones": [i + 1 for i in self.bad_cones],
            "unmatched_facets": [[i + 1 for i in f] for f in self.unmatched_facets],
            "overlapping_cones": [[a + 1, b + 1] for a, b in self.overlapping_cones],
            "unused_rays": [i + 1 for i in self.unused_rays],
        }


def _cones_overlap(fan: Fan, a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True if the two simplicial cones meet outside the cone on their common rays.

    Searches for lambda, mu >= 0 with sum(lambda_i v_i) = sum(mu_j w_j) and
    unit total weight on the non-shared rays. Because the cones are
    simplicial the coordinates of a point are unique, so any such solution
    is a point of the intersection outside the shared face.
    """
    common = set(a) & set(b)
    a_only = [i for i in a if i not in common]
    b_only = [i for i in b if i not in common]
    cols = [(i, 1) for i in a] + [(j, -1) for j in b]
    rows = [[s * fan.rays[i][k] for i, s in cols] for k in range(fan.dim)]
    rows.append([int(i in a_only and s == 1) + int(i in b_only and s == -1) for i, s in cols])
    rhs = [0] * fan.dim + [1]
    return nonnegative_solution(rows, rhs) is not None


def validate_fan(fan: Fan) -> ValidationReport:
    """Check the axioms of a complete simplicial fan.

    Completeness is certified by facet pairing (each codimension-one face of
    a maximal cone lies in exactly two maximal cones) together with proper
    pairwise intersections, checked with exact linear programs.
    """
    d = fan.dim
    non_prim = tuple(i for i, r in enumerate(fan.rays) if math.gcd(*r) != 1)
    seen: dict[tuple[int, ...], int] = {}
    dup = []
    for i, r in enumerate(fan.rays):
        if r in seen:
            dup.append(i)
        else:
            seen[r] = i
    bad = tuple(
        k for k, c in enumerate(fan.cones)
        if len(c) != d or det([fan.rays[i] for i in c]) == 0
    )
    cone_set = set(fan.cones)
    repeated = tuple(k for k, c in enumerate(fan.cones) if fan.cones.index(c) != k)
    bad = tuple(sorted(set(bad) | set(repeated)))

    facet_count: dict[tuple[int, ...], int] = {}
    for c in cone_set:
        if len(c) != d:
            continue
        for f in combinations(c, d - 1):
            facet_count[f] = facet_count.get(f, 0) + 1
    unmatched = tuple(sorted(f for f, k in facet_count.items() if k != 2))

    overlapping = []
    if not bad:
        for (ka, a), (kb, b) in combinations(enumerate(fan.cones), 2):
            if _cones_overlap(fan, a, b):
                overlapping.append((ka, kb))
    used = set(i for c in fan.cones for i in c)
    unused = tuple(i for i in range(fan.n) if i not in used)
    return ValidationReport(
        primitive=not non_prim and not dup,
        simplicial=not bad,
        facet_pairing=not unmatched and bool(cone_set),
        proper_intersection=not overlapping and not bad,
        rays_used=not unused,
        non_primitive_rays=non_prim,
        duplicate_rays=tuple(dup),
        bad_cones=bad,
        unmatched_facets=unmatched,
        overlapping_cones=tuple(overlapping),
        unused_rays=unused,
    )


@lru_cache(maxsize=256)
def _cached_report(fan: Fan) -> ValidationReport:
    return validate_fan(fan)


def checked(fan: Fan) -> Fan:
    """Return ``fan`` if it validates, else raise FanValidationError."""
    report = _cached_report(fan)
    if not report.ok:
        raise FanValidationError(report)
    return fan


# ---------------------------------------------------------------------------
# Class group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassGroupInfo:
    """``Cl = Z^free_rank + sum Z/t`` and the degree map from ``Z^n``.

    Row ``k`` of ``degree_map`` gives the ``k``-th coordinate of the class
    of a divisor; the rows after ``free_rank`` are read modulo ``torsion``.
    """

    free_rank: int
    torsion: tuple[int, ...]
    degree_map: IntMatrix
    ray_matrix: IntMatrix

    def degree(self, a: Sequence[int]) -> "DivisorClass":
        vals = [sum(p * x for p, x in zip(row, a)) for row in self.degree_map]
        return DivisorClass(
            tuple(vals[: self.free_rank]),
            tuple(v % t for v, t in zip(vals[self.free_rank :], self.torsion)),
            self.torsion,
        )

    def variable_degrees(self) -> tuple["DivisorClass", ...]:
        n = len(self.ray_matrix)
        return tuple(self.degree([int(i == j) for j in range(n)]) for i in range(n))

    def zero(self) -> "DivisorClass":
        return DivisorClass((0,) * self.free_rank, (0,) * len(self.torsion), self.torsion)

    def make(self, free: Sequence[int], torsion: Sequence[int] = ()) -> "DivisorClass":
        free = tuple(int(x) for x in free)
        torsion = tuple(int(x) for x in torsion) or (0,) * len(self.torsion)
        if len(free) != self.free_rank or len(torsion) != len(self.torsion):
            raise ValueError(
                f"class needs {self.free_rank} free and {len(self.torsion)} torsion entries"
            )
        return DivisorClass(free, tuple(t % m for t, m in zip(torsion, self.torsion)), self.torsion)


@dataclass(frozen=True)
class DivisorClass:
    """An element of Cl: free coordinates plus torsion residues."""

    free_part: tuple[int, ...]
    torsion_part: tuple[int, ...] = ()
    moduli: tuple[int, ...] = ()

    def _check(self, other):
        if self.moduli != other.moduli or len(self.free_part) != len(other.free_part):
            raise ValueError("classes live in different groups")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(
            tuple(a + b for a, b in zip(self.free_part, other.free_part)),
            tuple((a + b) % m for a, b, m in zip(self.torsion_part, other.torsion_part, self.moduli)),
            self.moduli,
        )

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(
            tuple(-a for a in self.free_part),
            tuple(-a % m for a, m in zip(self.torsion_part, self.moduli)),
            self.moduli,
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(
            tuple(k * a for a in self.free_part),
            tuple(k * a % m for a, m in zip(self.torsion_part, self.moduli)),
            self.moduli,
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.free_part) and not any(self.torsion_part)

    def to_list(self) -> list[int]:
        return list(self.free_part) + list(self.torsion_part)

    def __str__(self) -> str:
        s = ",".join(map(str, self.free_part))
        if self.moduli:
            s += ":" + ",".join(map(str, self.torsion_part))
        return s


@lru_cache(maxsize=256)
def class_group(fan: Fan) -> ClassGroupInfo:
    """Cl as the cokernel of ``M -> Z^n``, ``m -> (<m, v_i>)_i``."""
    checked(fan)
    ray_matrix = fan.rays
    ck: Cokernel = cokernel(ray_matrix, fan.dim)
    return ClassGroupInfo(ck.free_rank, ck.torsion, ck.projection, ray_matrix)


def picard_number(fan: Fan) -> int:
    return class_group(fan).free_rank


def is_relevant(fan: Fan, zero_pattern: Iterable[int]) -> bool:
    """Whether a point whose vanishing coordinates are ``zero_pattern`` avoids Z(Sigma).

    That happens exactly when some cone contains all those rays.
    """
    pattern = set(zero_pattern)
    for i in pattern:
        if not 0 <= i < fan.n:
            raise IndexError(f"ray index {i} out of range")
    return any(pattern.issubset(c) for c in fan.cones)


def relevance_table(fan: Fan) -> list[bool]:
    """``table[mask]`` is is_relevant for the zero pattern encoded by ``mask``."""
    n = fan.n
    table = [False] * (1 << n)
    for c in fan.cones:
        cmask = sum(1 << i for i in c)
        sub = cmask
        while True:
            table[sub] = True
            if sub == 0:
                break
            sub = (sub - 1) & cmask
    return table
