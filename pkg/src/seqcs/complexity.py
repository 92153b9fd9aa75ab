"""Cover-based complexity of linear-form systems, with machine-checkable certificates.

A cover certificate splits the forms outside a target prefix into parts whose
linear spans avoid every prefix form.  A witness certificate chains such
covers along an ordered sequence of forms.  Searches are exact: candidate
parts are the maximal admissible closures (a part can always be grown to the
full intersection of its span with the allowed forms, so restricting to
maximal closures loses no covers), and the set-cover step is branch and bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .covering import SearchGuardExceeded, exact_set_cover
from .field import SpanBasis, rank, span_basis, tensor_power
from .systems import LinearSystem


@dataclass(frozen=True)
class CoverCertificate:
    targets: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    k: int

    def to_json(self) -> dict:
        return {"targets": list(self.targets), "parts": [list(c) for c in self.parts]}


@dataclass(frozen=True)
class WitnessCertificate:
    system_hash: str
    i: int
    k: int
    sequence: tuple[int, ...]
    covers: tuple[CoverCertificate, ...]

    @property
    def length(self) -> int:
        return len(self.sequence)

    def to_json(self) -> dict:
        return {
            "system_hash": self.system_hash,
            "i": self.i,
            "k": self.k,
            "sequence": list(self.sequence),
            "covers": [c.to_json() for c in self.covers],
        }

    @staticmethod
    def from_json(raw: dict) -> "WitnessCertificate":
        seq = tuple(raw["sequence"])
        covers = tuple(
            CoverCertificate(tuple(c["targets"]), tuple(tuple(x) for x in c["parts"]), raw["k"])
            for c in raw["covers"]
        )
        return WitnessCertificate(raw["system_hash"], raw["i"], raw["k"], seq, covers)

    @staticmethod
    def load(path: str) -> "WitnessCertificate":
        with open(path, "r", encoding="utf-8") as fh:
            return WitnessCertificate.from_json(json.load(fh))


def _admissible_pool(system: LinearSystem, excluded: tuple[int, ...], node_guard: int):
    """All maximal admissible closed parts, sorted by content.

    Returns None when no admissible part can exist (an excluded form is zero,
    hence inside every span).  A part is the set of allowed indices whose form
    lies in some subspace avoiding all excluded forms; maximal parts suffice.
    """
    p, d = system.p, system.d
    forms = system.forms
    excluded_vectors = [forms[t] for t in excluded]
    if any(not any(v) for v in excluded_vectors):
        return None
    excluded_set = set(excluded)
    allowed = [j for j in range(system.r) if j not in excluded_set]

    def admissible(basis: SpanBasis) -> bool:
        return not any(basis.contains(v) for v in excluded_vectors)

    def closure_of(basis: SpanBasis) -> frozenset[int]:
        return frozenset(j for j in allowed if basis.contains(forms[j]))

    seen: dict[frozenset[int], SpanBasis] = {}
    queue: list[frozenset[int]] = []
    for j in allowed:
        basis = SpanBasis(p, d).extended(forms[j])
        if not admissible(basis):
            continue
        cl = closure_of(basis)
        if cl not in seen:
            seen[cl] = basis
            queue.append(cl)
    maximal: list[frozenset[int]] = []
    visited = 0
    while queue:
        cl = queue.pop()
        visited += 1
        if visited > node_guard:
            raise SearchGuardExceeded("admissible-part enumeration passed the node budget")
        basis = seen[cl]
        extendable = False
        for j in allowed:
            if j in cl:
                continue
            grown = basis.extended(forms[j])
            if not admissible(grown):
                continue
            extendable = True
            ncl = closure_of(grown)
            if ncl not in seen:
                seen[ncl] = grown
                queue.append(ncl)
        if not extendable:
            maximal.append(cl)
    return sorted(maximal, key=sorted)


def admissible_cover(
    system: LinearSystem,
    to_cover,
    excluded,
    max_parts: int,
    node_guard: int = 10**8,
) -> CoverCertificate | None:
    """Cover of `to_cover` by <= max_parts admissible parts, or None if impossible.

    Exact: None is returned only when no such cover exists.  Deterministic:
    the lexicographically least minimum-size cover under the sorted part order.
    """
    targets = tuple(excluded)
    goal = tuple(dict.fromkeys(to_cover))
    if set(goal) & set(targets):
        raise ValueError("to_cover and excluded overlap")
    if not goal:
        return CoverCertificate(targets, (), max(max_parts - 1, -1))
    pool = _admissible_pool(system, targets, node_guard)
    if pool is None:
        return None
    position = {j: pos for pos, j in enumerate(goal)}
    restricted = [frozenset(position[j] for j in part if j in position) for part in pool]
    picked = exact_set_cover(len(goal), restricted, max_parts, node_guard)
    if picked is None:
        return None
    parts = tuple(tuple(sorted(pool[ci])) for ci in picked)
    return CoverCertificate(targets, parts, max_parts - 1)


def cs_complexity_at(
    system: LinearSystem, i: int, node_guard: int = 10**8
) -> tuple[int | None, CoverCertificate | None]:
    """Least k admitting a (k+1)-part admissible cover of the other forms at i.

    Returns (None, None) when no finite value exists (for instance when some
    other form is a scalar multiple of form i, so every part holding it is
    inadmissible).
    """
    goal = tuple(j for j in range(system.r) if j != i)
    if not goal:
        return 0, CoverCertificate((i,), (), 0)
    pool = _admissible_pool(system, (i,), node_guard)
    if pool is None:
        return None, None
    position = {j: pos for pos, j in enumerate(goal)}
    restricted = [frozenset(position[j] for j in part if j in position) for part in pool]
    picked = exact_set_cover(len(goal), restricted, None, node_guard)
    if picked is None:
        return None, None
    s = max(len(picked) - 1, 0)
    parts = tuple(tuple(sorted(pool[ci])) for ci in picked)
    return s, CoverCertificate((i,), parts, s)


def sequential_witness(
    system: LinearSystem,
    i: int,
    k: int,
    max_len: int,
    node_guard: int = 10**8,
) -> WitnessCertificate | None:
    """Shortest witness sequence of distinct forms ending at i, each prefix
    admitting a (k+1)-part admissible cover; None when none exists with
    length <= max_len.

    Complete over sequences of distinct indices (repeating a form never
    helps: only the prefix set matters).  Deterministic: iterative deepening
    with depth-first search in ascending index order.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    r = system.r
    everything = frozenset(range(r))
    cache: dict[frozenset[int], tuple[tuple[int, ...], ...] | None] = {}

    def prefix_parts(prefix: tuple[int, ...]):
        key = frozenset(prefix)
        if key not in cache:
            cert = admissible_cover(
                system, sorted(everything - key), prefix, k + 1, node_guard
            )
            cache[key] = cert.parts if cert is not None else None
        return cache[key]

    def dfs(prefix: list[int], ell: int):
        depth = len(prefix)
        if depth == ell:
            return list(prefix)
        candidates = (i,) if depth == ell - 1 else tuple(
            j for j in range(r) if j != i and j not in prefix
        )
        for j in candidates:
            if j in prefix:
                continue
            prefix.append(j)
            if prefix_parts(tuple(prefix)) is not None:
                found = dfs(prefix, ell)
                if found is not None:
                    return found
            prefix.pop()
        return None

    for ell in range(1, max_len + 1):
        seq = dfs([], ell)
        if seq is not None:
            covers = tuple(
                CoverCertificate(tuple(seq[:j]), cache[frozenset(seq[:j])], k)
                for j in range(1, ell + 1)
            )
            return WitnessCertificate(system.digest(), i, k, tuple(seq), covers)
    return None


@dataclass
class WitnessReport:
    passed: bool
    failures: list[dict] = field(default_factory=list)

    @property
    def first_violation(self) -> dict | None:
        return self.failures[0] if self.failures else None

    def to_json(self) -> dict:
        return {"passed": self.passed, "failures": self.failures}


def verify_witness(system: LinearSystem, cert: WitnessCertificate) -> WitnessReport:
    """Re-check every certificate invariant by span membership tests."""
    failures: list[dict] = []
    r = system.r
    if cert.system_hash and cert.system_hash != system.digest():
        failures.append({"kind": "system-hash-mismatch"})
    seq = cert.sequence
    if not seq:
        failures.append({"kind": "empty-sequence"})
        return WitnessReport(False, failures)
    if any(j < 0 or j >= r for j in seq):
        failures.append({"kind": "index-out-of-range", "sequence": list(seq)})
        return WitnessReport(False, failures)
    if len(set(seq)) != len(seq):
        failures.append({"kind": "repeated-form-in-sequence"})
    if seq[-1] != cert.i:
        failures.append({"kind": "sequence-does-not-end-at-target", "i": cert.i})
    if len(cert.covers) != len(seq):
        failures.append({"kind": "cover-count-mismatch", "covers": len(cert.covers)})
        return WitnessReport(False, failures)
    for j in range(1, len(seq) + 1):
        cover = cert.covers[j - 1]
        prefix = seq[:j]
        if tuple(cover.targets) != prefix:
            failures.append({"kind": "target-mismatch", "prefix": j})
            continue
        if len(cover.parts) > cert.k + 1:
            failures.append({"kind": "too-many-parts", "prefix": j, "parts": len(cover.parts)})
        uncovered = set(range(r)) - set(prefix)
        for part in cover.parts:
            uncovered -= set(part)
        for missing in sorted(uncovered):
            failures.append({"kind": "uncovered-form", "prefix": j, "form": missing})
        for t, part in enumerate(cover.parts):
            if any(x < 0 or x >= r for x in part):
                failures.append({"kind": "part-index-out-of-range", "prefix": j, "part": t})
                continue
            basis = span_basis([system.forms[x] for x in part], system.p, system.d)
            for target in prefix:
                if basis.contains(system.forms[target]):
                    failures.append(
                        {"kind": "span-contains-target", "prefix": j, "part": t, "target": target}
                    )
    return WitnessReport(not failures, failures)


@dataclass(frozen=True)
class TensorCriterionResult:
    value: int | None
    reason: str
    ranks: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"value": self.value, "reason": self.reason, "ranks": [list(kv) for kv in self.ranks]}


def tensor_criterion(
    system: LinearSystem, k_max: int, entry_guard: int = 10**7
) -> TensorCriterionResult:
    """Least k <= k_max making the (k+1)-fold tensor powers of the forms
    linearly independent; duplicates or zero forms can never become independent."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    forms = system.forms
    if len(set(forms)) != len(forms):
        return TensorCriterionResult(None, "never independent (duplicate forms)", ())
    if any(not any(f) for f in forms):
        return TensorCriterionResult(None, "never independent (zero form)", ())
    ranks: list[tuple[int, int]] = []
    for k in range(k_max + 1):
        if system.r * system.d ** (k + 1) > entry_guard:
            raise SearchGuardExceeded(f"tensor powers at k={k} exceed the entry budget")
        powers = [tensor_power(f, k + 1, system.p) for f in forms]
        rk = rank(powers, system.p)
        ranks.append((k, rk))
        if rk == system.r:
            return TensorCriterionResult(k, "independent", tuple(ranks))
    return TensorCriterionResult(None, f"none <= {k_max}", tuple(ranks))


@dataclass
class ComplexityReport:
    per_index: list[tuple[int | None, CoverCertificate | None]]
    s_cs: int | None
    tensor: TensorCriterionResult

    def to_json(self) -> dict:
        return {
            "per_index": [
                {"i": i, "s_cs": s, "certificate": c.to_json() if c else None}
                for i, (s, c) in enumerate(self.per_index)
            ],
            "s_cs": self.s_cs,
            "tensor_criterion": self.tensor.to_json(),
        }


def complexity_report(system: LinearSystem, k_max: int = 6, node_guard: int = 10**8) -> ComplexityReport:
    per_index = [cs_complexity_at(system, i, node_guard) for i in range(system.r)]
    values = [s for s, _ in per_index]
    s_cs = None if any(v is None for v in values) else max(values)
    return ComplexityReport(per_index, s_cs, tensor_criterion(system, k_max))
