"""Exact covering of point sets in F_p^M by affine subspaces avoiding excluded points.

Candidate pools are finite and complete: either all affine hyperplanes that
miss the excluded points, or the affine spans of subsets of the target set
(generated as a closure lattice, which enumerates every distinct span without
walking all subsets).  Minimum covers are found by branch and bound and are
exact; a node guard aborts instead of returning an unproven answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .field import Prime, Vector, rref, span_basis, vec, vec_sub


class SearchGuardExceeded(RuntimeError):
    """The exact search exceeded its node budget; the result is unknown, not infeasible."""


@dataclass(frozen=True)
class AffineSubspace:
    """basepoint + span(directions) in canonical form.

    Directions are the RREF basis of the direction space and the basepoint
    has zero coordinates at the pivot columns, so equal subspaces compare
    equal as dataclasses.
    """

    p: int
    ambient_dim: int
    basepoint: Vector
    directions: tuple[Vector, ...]

    @staticmethod
    def make(p: int, basepoint, directions) -> "AffineSubspace":
        dim = len(basepoint)
        reduced, rnk, pivots = rref(directions, p) if directions else ((), 0, [])
        rows = reduced[:rnk]
        base = list(vec(basepoint, p))
        for row, piv in zip(rows, pivots):
            c = base[piv]
            if c:
                for j in range(dim):
                    base[j] = (base[j] - c * row[j]) % p
        return AffineSubspace(p, dim, tuple(base), rows)

    @staticmethod
    def from_points(points, p: int) -> "AffineSubspace":
        """Affine span of a nonempty point set."""
        base = points[0]
        dirs = [vec_sub(q, base, p) for q in points[1:]]
        return AffineSubspace.make(p, base, dirs)

    @staticmethod
    def from_hyperplane(normal, const: int, p: int) -> "AffineSubspace":
        """Solution set of normal·x = const as a subspace object."""
        dim = len(normal)
        piv = next(j for j, c in enumerate(normal) if c % p)
        inv = pow(normal[piv] % p, -1, p)
        base = [0] * dim
        base[piv] = (const * inv) % p
        dirs = []
        for t in range(dim):
            if t == piv:
                continue
            d = [0] * dim
            d[t] = 1
            d[piv] = (-normal[t] * inv) % p
            dirs.append(d)
        return AffineSubspace.make(p, base, dirs)

    @property
    def dim(self) -> int:
        return len(self.directions)

    def contains(self, point) -> bool:
        diff = vec_sub(point, self.basepoint, self.p)
        return span_basis(self.directions, self.p, self.ambient_dim).contains(diff)

    def to_json(self) -> dict:
        return {"basepoint": list(self.basepoint), "directions": [list(d) for d in self.directions]}


@dataclass(frozen=True)
class AffineCover:
    p: int
    M: int
    subspaces: tuple[AffineSubspace, ...]
    covered: tuple[Vector, ...]
    excluded: tuple[Vector, ...]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "M": self.M,
            "subspaces": [s.to_json() for s in self.subspaces],
            "covered": [list(t) for t in self.covered],
            "excluded": [list(a) for a in self.excluded],
        }


def hyperplane_normals(p: int, M: int):
    """Canonical normal vectors: first nonzero entry 1, lexicographic order."""
    for v in product(range(p), repeat=M):
        piv = next((j for j, c in enumerate(v) if c), None)
        if piv is not None and v[piv] == 1:
            yield v


def enumerate_hyperplanes(p: int, M: int, excluding=()) -> list[AffineSubspace]:
    """All affine hyperplanes of F_p^M containing none of the excluded points."""
    if M < 1:
        raise ValueError("ambient dimension must be >= 1")
    excluded = [vec(z, p) for z in excluding]
    out = []
    for normal in hyperplane_normals(p, M):
        for const in range(p):
            if any(sum(n * z for n, z in zip(normal, pt)) % p == const for pt in excluded):
                continue
            out.append(AffineSubspace.from_hyperplane(normal, const, p))
    return out


def exact_set_cover(
    n_elements: int,
    candidates: list[frozenset[int]],
    max_parts: int | None = None,
    node_guard: int = 10**8,
) -> list[int] | None:
    """Minimum cover of {0..n_elements-1} by candidate sets; exact and deterministic.

    Returns candidate indices of a minimum cover (lexicographically least by
    candidate index among all minimum covers), or None when no cover of size
    <= max_parts exists.  Raises SearchGuardExceeded past the node budget.
    """
    universe = frozenset(range(n_elements))
    if not universe:
        return []
    per_element: list[list[int]] = [[] for _ in range(n_elements)]
    for ci, cand in enumerate(candidates):
        for e in cand:
            per_element[e].append(ci)
    if any(not holders for holders in per_element):
        return None
    budget_cap = len(candidates) if max_parts is None else min(max_parts, len(candidates))
    nodes = 0
    best_size: int | None = None

    def search(remaining: frozenset[int], depth: int) -> None:
        nonlocal nodes, best_size
        nodes += 1
        if nodes > node_guard:
            raise SearchGuardExceeded(f"set-cover search passed {node_guard} nodes")
        if not remaining:
            best_size = depth if best_size is None else min(best_size, depth)
            return
        bound = budget_cap if best_size is None else min(budget_cap, best_size - 1)
        if depth >= bound:
            return
        e = min(remaining, key=lambda x: len(per_element[x]))
        for ci in per_element[e]:
            search(remaining - candidates[ci], depth + 1)

    search(universe, 0)
    if best_size is None:
        return None

    def completable(remaining: frozenset[int], budget: int, floor_index: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_guard:
            raise SearchGuardExceeded(f"set-cover search passed {node_guard} nodes")
        if not remaining:
            return True
        if budget == 0:
            return False
        e = min(remaining, key=lambda x: len(per_element[x]))
        for ci in per_element[e]:
            if ci < floor_index:
                continue
            if completable(remaining - candidates[ci], budget - 1, floor_index):
                return True
        return False

    chosen: list[int] = []
    remaining = universe
    floor = 0
    for slot in range(best_size):
        budget_left = best_size - slot - 1
        for ci in range(floor, len(candidates)):
            if not candidates[ci] & remaining:
                continue
            if completable(remaining - candidates[ci], budget_left, ci + 1):
                chosen.append(ci)
                remaining = remaining - candidates[ci]
                floor = ci + 1
                break
        else:
            raise AssertionError("extraction failed after feasibility was established")
        if not remaining:
            break
    return chosen


def _span_candidates(points: list[Vector], excluded: list[Vector], p: int, M: int, node_guard: int):
    """Maximal admissible affine spans of subsets of `points`, as index sets.

    Closure lattice walk: every affine span of a subset shows up as the
    closure of some chain of single-point extensions, so the pool is complete
    while only distinct spans are visited.
    """
    def closure_of(subspace: AffineSubspace) -> frozenset[int]:
        return frozenset(i for i, t in enumerate(points) if subspace.contains(t))

    def admissible(subspace: AffineSubspace) -> bool:
        return not any(subspace.contains(a) for a in excluded)

    seen: dict[frozenset[int], AffineSubspace] = {}
    queue: list[frozenset[int]] = []
    for i, t in enumerate(points):
        sub = AffineSubspace.from_points([t], p)
        if not admissible(sub):
            continue
        cl = closure_of(sub)
        if cl not in seen:
            seen[cl] = sub
            queue.append(cl)
    maximal: dict[frozenset[int], AffineSubspace] = {}
    visited = 0
    while queue:
        cl = queue.pop()
        visited += 1
        if visited > node_guard:
            raise SearchGuardExceeded("affine-span pool generation passed the node budget")
        sub = seen[cl]
        extendable = False
        for j in range(len(points)):
            if j in cl:
                continue
            grown = AffineSubspace.make(
                p,
                sub.basepoint,
                list(sub.directions) + [vec_sub(points[j], sub.basepoint, p)],
            )
            if not admissible(grown):
                continue
            extendable = True
            ncl = closure_of(grown)
            if ncl not in seen:
                seen[ncl] = grown
                queue.append(ncl)
        if not extendable:
            maximal[cl] = sub
    items = sorted(maximal.items(), key=lambda kv: sorted(kv[0]))
    return [kv[0] for kv in items], [kv[1] for kv in items]


def min_cover_excluding(
    p: int,
    M: int,
    points,
    excluded,
    mode: str = "affine-spans",
    max_count: int | None = None,
    node_guard: int = 10**8,
) -> tuple[int, AffineCover] | None:
    """Exact minimum cover of `points` by affine subspaces missing every excluded point.

    mode "hyperplanes-only" draws candidates from enumerate_hyperplanes;
    mode "affine-spans" from affine spans of subsets of `points`.  Returns
    (count, cover) or None when no finite cover exists.
    """
    prime = Prime(p)
    pts = [vec(t, prime) for t in points]
    exc = [vec(a, prime) for a in excluded]
    overlap = set(pts) & set(exc)
    if overlap:
        raise ValueError(f"points and excluded overlap: {sorted(overlap)}")
    if not pts:
        cover = AffineCover(prime, M, (), (), tuple(exc))
        return 0, cover
    if mode == "hyperplanes-only":
        pool = enumerate_hyperplanes(prime, M, exc)
        member_sets = [frozenset(i for i, t in enumerate(pts) if h.contains(t)) for h in pool]
        keep = [i for i, s in enumerate(member_sets) if s]
        pool = [pool[i] for i in keep]
        member_sets = [member_sets[i] for i in keep]
        order = sorted(range(len(pool)), key=lambda i: sorted(member_sets[i]))
        pool = [pool[i] for i in order]
        member_sets = [member_sets[i] for i in order]
    elif mode == "affine-spans":
        member_sets, pool = _span_candidates(pts, exc, prime, M, node_guard)
    else:
        raise ValueError(f"unknown mode: {mode}")
    picked = exact_set_cover(len(pts), list(member_sets), max_count, node_guard)
    if picked is None:
        return None
    cover = AffineCover(prime, M, tuple(pool[i] for i in picked), tuple(pts), tuple(exc))
    return len(picked), cover


def verify_cover(cover: AffineCover) -> dict:
    """Re-check both cover invariants by membership tests; lists every violation."""
    failures = []
    for t in cover.covered:
        if not any(s.contains(t) for s in cover.subspaces):
            failures.append({"kind": "uncovered", "point": list(t)})
    for a in cover.excluded:
        for si, s in enumerate(cover.subspaces):
            if s.contains(a):
                failures.append({"kind": "excluded-point-covered", "point": list(a), "subspace": si})
    return {"passed": not failures, "failures": failures}
