"""Exact rational linear algebra and convex-geometry primitives.

Everything here works over `fractions.Fraction`, so results are exact and
independent of evaluation order.  The algorithms are combinatorial
(subset enumeration, Fourier-Motzkin, recursive triangulation) and meant
for desk-scale inputs: a handful of points or constraints in dimension
up to four.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Constraint = tuple[Vec, Fraction]  # (a, b) encodes <a, x> <= b

_FM_ROW_LIMIT = 200_000


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4' and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def vec(xs: Iterable) -> Vec:
    return tuple(frac(x) for x in xs)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def solve_square(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vec | None:
    """Solve an n x n rational system; None if singular."""
    n = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[r][n] for r in range(n))


def _normalize_constraint(a: Vec, b: Fraction) -> Constraint:
    lead = next((x for x in a if x != 0), None)
    if lead is None:
        return a, (Fraction(0) if b >= 0 else Fraction(-1))
    s = abs(lead)
    return tuple(x / s for x in a), b / s


def fm_feasible(constraints: Sequence[Constraint], n: int) -> bool:
    """Feasibility of {x : <a_i, x> <= b_i} by Fourier-Motzkin elimination."""
    rows = {_normalize_constraint(vec(a), frac(b)) for a, b in constraints}
    for var in range(n):
        pos, neg, rest = [], [], []
        for a, b in rows:
            if a[var] > 0:
                pos.append((a, b))
            elif a[var] < 0:
                neg.append((a, b))
            else:
                rest.append((a, b))
        new = set(_normalize_constraint(a, b) for a, b in rest)
        for ap, bp in pos:
            for an, bn in neg:
                # eliminate: combine with weights 1/ap[var], -1/an[var]
                wp = Fraction(1) / ap[var]
                wn = Fraction(-1) / an[var]
                a = tuple(x * wp + y * wn for x, y in zip(ap, an))
                b = bp * wp + bn * wn
                new.add(_normalize_constraint(a, b))
        if len(new) > _FM_ROW_LIMIT:
            raise RuntimeError("Fourier-Motzkin blow-up beyond desk scale")
        rows = new
    return all(b >= 0 for a, b in rows)


def enumerate_vertices(constraints: Sequence[Constraint], n: int) -> list[Vec]:
    """All vertices of {x : <a_i, x> <= b_i}, by n-subset enumeration.

    Each returned point satisfies n linearly independent active
    constraints and all remaining ones, which makes it an extreme point.
    """
    cons = [(vec(a), frac(b)) for a, b in constraints]
    found: set[Vec] = set()
    for subset in combinations(range(len(cons)), n):
        rows = [cons[i][0] for i in subset]
        rhs = [cons[i][1] for i in subset]
        x = solve_square(rows, rhs)
        if x is None:
            continue
        if all(dot(a, x) <= b for a, b in cons):
            found.add(x)
    return sorted(found)


def _affine_coordinates(points: Sequence[Vec]) -> tuple[list[Vec], int]:
    """Coordinates of `points` in a rational basis of their affine hull.

    Returns (coords, d) with d the affine dimension; coords are d-tuples.
    """
    p0 = points[0]
    diffs = [tuple(x - y for x, y in zip(p, p0)) for p in points[1:]]
    # row-reduce to pick an independent spanning subset
    basis: list[Vec] = []
    reduced: list[Vec] = []
    for dvec in diffs:
        r = list(dvec)
        for bpivot, bred in zip(basis, reduced):
            # bred has a leading 1 at its pivot position
            piv = next(i for i, x in enumerate(bred) if x != 0)
            if r[piv] != 0:
                f = r[piv]
                r = [x - f * y for x, y in zip(r, bred)]
        if any(x != 0 for x in r):
            lead = next(x for x in r if x != 0)
            reduced.append(tuple(x / lead for x in r))
            basis.append(dvec)
    d = len(basis)
    if d == 0:
        return [() for _ in points], 0
    # solve coords: p - p0 = sum c_i basis_i  (consistent by construction)
    # build a square solvable system using d independent coordinate rows
    rows_idx: list[int] = []
    mat: list[list[Fraction]] = []
    for i in range(len(p0)):
        cand = mat + [[basis[j][i] for j in range(d)]]
        if _rank(cand) > len(mat):
            mat.append(cand[-1])
            rows_idx.append(i)
        if len(mat) == d:
            break
    coords = []
    for p in points:
        rhs = [p[i] - p0[i] for i in rows_idx]
        c = solve_square(mat, rhs)
        assert c is not None
        coords.append(c)
    return coords, d


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = Fraction(1) / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = Fraction(1) / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def triangulate(points: Sequence[Vec]) -> list[tuple[Vec, ...]]:
    """Triangulate conv(points) into simplices of its affine dimension.

    Fans from the lexicographically smallest vertex at every recursion
    level, so the decomposition is deterministic.
    """
    pts = sorted(set(points))
    if not pts:
        return []
    coords, d = _affine_coordinates(pts)
    return _triangulate_full(pts, [list(c) for c in coords], d)


def _triangulate_full(pts: list[Vec], coords: list[list[Fraction]], d: int) -> list[tuple[Vec, ...]]:
    if d == 0:
        return [(pts[0],)]
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    apex = order[0]
    simplices: list[tuple[Vec, ...]] = []
    for facet_idx in _facets(coords, d):
        if apex in facet_idx:
            continue
        fpts = [pts[i] for i in facet_idx]
        fcoords_full = [coords[i] for i in facet_idx]
        fcoords, fd = _affine_coordinates([tuple(c) for c in fcoords_full])
        if fd != d - 1:
            continue
        for simplex in _triangulate_full(fpts, [list(c) for c in fcoords], fd):
            simplices.append((pts[apex],) + simplex)
    return simplices


def _facets(coords: list[list[Fraction]], d: int) -> list[tuple[int, ...]]:
    """Index sets of the facets of a full-dimensional point configuration."""
    npts = len(coords)
    seen: dict[tuple, tuple[int, ...]] = {}
    for subset in combinations(range(npts), d):
        base = coords[subset[0]]
        mat = [[coords[i][j] - base[j] for j in range(d)] for i in subset[1:]]
        if _rank(mat) != d - 1:
            continue
        # hyperplane through the subset: normal via cofactor expansion
        normal = _hyperplane_normal(mat, d)
        offset = dot(normal, base)
        pos = any(dot(normal, c) > offset for c in coords)
        neg = any(dot(normal, c) < offset for c in coords)
        if pos and neg:
            continue
        if neg:
            normal = tuple(-x for x in normal)
            offset = -offset
        on = tuple(i for i in range(npts) if dot(normal, coords[i]) == offset)
        key = _normalize_constraint(normal, offset)
        seen[key] = on
    return list(seen.values())


def _hyperplane_normal(mat: list[list[Fraction]], d: int) -> Vec:
    # normal to the span of d-1 row vectors in R^d by signed minors
    normal = []
    for j in range(d):
        minor = [[row[k] for k in range(d) if k != j] for row in mat]
        s = Fraction(-1) ** j
        normal.append(s * (_det(minor) if minor else Fraction(1)))
    return tuple(normal)


def simplex_volume(simplex: Sequence[Vec], n: int) -> Fraction:
    rows = [[x - y for x, y in zip(p, simplex[0])] for p in simplex[1:]]
    if len(rows) != n:
        return Fraction(0)
    det = _det(rows)
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    return abs(det) / fact


def polytope_volume(points: Sequence[Vec], n: int) -> Fraction:
    """Exact n-volume of conv(points); 0 when the hull is lower-dimensional."""
    pts = sorted(set(tuple(vec(p)) for p in points))
    if not pts:
        return Fraction(0)
    coords, d = _affine_coordinates(pts)
    if d < n:
        return Fraction(0)
    total = Fraction(0)
    for simplex in _triangulate_full(pts, [list(c) for c in coords], d):
        total += simplex_volume(simplex, n)
    return total


def hpolytope_volume(constraints: Sequence[Constraint], n: int) -> Fraction:
    """Exact volume of a bounded {x : Ax <= b} by Lasserre's recursion.

    Each facet term is b_i / |a_ik| times the volume of the facet
    projected along coordinate k; the norm factors cancel, so every
    intermediate quantity stays rational.  Signed terms make the choice
    of origin irrelevant.
    """
    rows = {_normalize_constraint(vec(a), frac(b)) for a, b in constraints}
    return _lasserre(sorted(rows), n)


def _lasserre(rows: list[Constraint], n: int) -> Fraction:
    trivial = [b for a, b in rows if all(x == 0 for x in a)]
    if any(b < 0 for b in trivial):
        return Fraction(0)
    rows = [(a, b) for a, b in rows if any(x != 0 for x in a)]
    if n == 1:
        upper = [b / a[0] for a, b in rows if a[0] > 0]
        lower = [b / a[0] for a, b in rows if a[0] < 0]
        if not upper or not lower:
            raise ValueError("unbounded polyhedron")
        length = min(upper) - max(lower)
        return length if length > 0 else Fraction(0)
    total = Fraction(0)
    for i, (a, b) in enumerate(rows):
        k = next(j for j, x in enumerate(a) if x != 0)
        sub: list[Constraint] = []
        for j, (c, d) in enumerate(rows):
            if j == i:
                continue
            f = c[k] / a[k]
            nc = tuple(c[t] - f * a[t] for t in range(n) if t != k)
            sub.append(_normalize_constraint(nc, d - f * b))
        total += (b / abs(a[k])) * _lasserre(sorted(set(sub)), n - 1)
    return total / n
