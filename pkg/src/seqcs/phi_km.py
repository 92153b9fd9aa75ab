"""Multidimensional arithmetic-progression systems x + z·t and their witnesses.

The point set is the simplex of exponent vectors z in [0,p-1]^M with integer
digit sum below k; the system has one form per point, in M+1 variables, with
leading column all ones.  This module builds the full witness sequence
through the simplex (slice by slice in the last coordinate, descending),
converts its geometric covers into form-level certificates, and constructs
the unimodular product-of-binomials function family whose average over the
system is exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

import numpy as np

from .analysis import FunctionTable, encode_point, phase_table, tensor_product_table
from .complexity import CoverCertificate, WitnessCertificate
from .covering import AffineSubspace
from .field import Prime
from .systems import LinearSystem


@dataclass(frozen=True)
class PhiDescriptor:
    p: Prime
    k: int
    M: int

    @staticmethod
    def make(p: int, k: int, M: int) -> "PhiDescriptor":
        if M < 1 or k < 1:
            raise ValueError("need M >= 1 and k >= 1")
        prime = Prime(p)
        return PhiDescriptor(prime, min(k, M * (prime - 1) + 1), M)

    @property
    def size(self) -> int:
        return len(s_km_points(self.p, self.k, self.M))


def s_km_points(p: int, k: int, M: int) -> list[tuple[int, ...]]:
    """Points z in [0,p-1]^M with z_1+...+z_M < k (sum in Z), lexicographic."""
    return [z for z in product(range(p), repeat=M) if sum(z) < k]


def phi_system(p: int, k: int, M: int) -> LinearSystem:
    """One form x + z_1·t_1 + ... + z_M·t_M per simplex point, in point order."""
    desc = PhiDescriptor.make(p, k, M)
    forms = tuple((1,) + z for z in s_km_points(desc.p, desc.k, desc.M))
    return LinearSystem(desc.p, forms)


def _slice_hyperplane(p: int, M: int, level: int) -> AffineSubspace:
    normal = (0,) * (M - 1) + (1,)
    return AffineSubspace.from_hyperplane(normal, level, p)


def _embed_in_slice(sub: AffineSubspace, level: int, p: int, M: int) -> AffineSubspace:
    base = sub.basepoint + (level,)
    dirs = [d + (0,) for d in sub.directions]
    return AffineSubspace.make(p, base, dirs)


def _witness_rec(p: int, k: int, M: int):
    if M == 1:
        top = min(k, p) - 1
        seq = [(v,) for v in range(top, -1, -1)]
        covers = []
        for i in range(1, len(seq) + 1):
            covers.append([AffineSubspace.make(p, (v,), []) for v in range(top - i + 1)])
        return seq, covers
    seq: list[tuple[int, ...]] = []
    covers: list[list[AffineSubspace]] = []
    for level in range(p - 1, -1, -1):
        sub_k = k - level
        if sub_k < 1:
            continue
        sub_seq, sub_covers = _witness_rec(p, sub_k, M - 1)
        below = [_slice_hyperplane(p, M, m) for m in range(level)]
        for point, cover in zip(sub_seq, sub_covers):
            seq.append(point + (level,))
            covers.append([_embed_in_slice(s, level, p, M) for s in cover] + below)
    return seq, covers


def phi_witness(p: int, k: int, M: int):
    """Ordering of the whole simplex ending at the origin, with per-prefix covers.

    Every prefix of the sequence leaves a remainder coverable by at most k-1
    affine subspaces, none containing any prefix point, so truncating at any
    point yields a witness sequence ending there.  Slices in the last
    coordinate are consumed from p-1 down to 0; within a slice the order is
    the (M-1)-dimensional construction.
    """
    desc = PhiDescriptor.make(p, k, M)
    return _witness_rec(int(desc.p), desc.k, desc.M)


def phi_witness_certificate(p: int, k: int, M: int, at=None) -> WitnessCertificate:
    """Form-level witness for the progression system, truncated to end at `at`.

    Geometric covers become index parts by collecting, for each subspace, the
    remaining points it contains; a subspace avoiding the prefix points yields
    a part whose span avoids the prefix forms (the systems are normalized with
    a leading ones column, so span membership is affine-span membership of
    the points).  The certified complexity parameter is k-2.
    """
    if k < 2:
        raise ValueError("certificates need k >= 2 (cover size k-1 >= 1 part)")
    desc = PhiDescriptor.make(p, k, M)
    p, k, M = int(desc.p), desc.k, desc.M
    system = phi_system(p, k, M)
    points = s_km_points(p, k, M)
    index_of = {z: i for i, z in enumerate(points)}
    seq_pts, covers_geo = phi_witness(p, k, M)
    target = tuple(at) if at is not None else (0,) * M
    if target not in index_of:
        raise ValueError(f"{target} is not a simplex point")
    ell = seq_pts.index(target) + 1
    sequence = tuple(index_of[z] for z in seq_pts[:ell])
    covers = []
    for j in range(1, ell + 1):
        prefix_pts = set(seq_pts[:j])
        remaining = [z for z in points if z not in prefix_pts]
        parts = tuple(
            tuple(sorted(index_of[z] for z in remaining if sub.contains(z)))
            for sub in covers_geo[j - 1]
        )
        covers.append(CoverCertificate(tuple(sequence[:j]), parts, k - 2))
    return WitnessCertificate(system.digest(), sequence[-1], k - 2, sequence, tuple(covers))


def default_weight(p: int, k: int, M: int) -> tuple[int, ...]:
    """Lexicographically largest valid weight: greedy digits summing to k-1."""
    if k < 2:
        raise ValueError("weights need k >= 2")
    rem = k - 1
    w = []
    for _ in range(M):
        take = min(p - 1, rem)
        w.append(take)
        rem -= take
    if rem > 0:
        raise ValueError(f"k-1={k - 1} exceeds M(p-1)={M * (p - 1)}")
    return tuple(w)


def _validate_weight(p: int, k: int, M: int, w) -> tuple[int, ...]:
    w = tuple(w)
    if len(w) != M:
        raise ValueError(f"weight must have length M={M}")
    if any(not 0 <= wi <= p - 1 for wi in w):
        raise ValueError("weight entries must lie in [0, p-1]")
    if sum(w) != k - 1:
        raise ValueError(f"weight digits must sum to k-1={k - 1}")
    if w[0] <= 0:
        raise ValueError("first weight entry must be positive")
    return w


def binomial_product_table(p: int, M: int, exponents) -> np.ndarray:
    """Residue table x ↦ Π_i C(x_i, e_i) mod p on F_p^M (binomials over Z)."""
    cols = [np.array([comb(v, e) % p for v in range(p)], dtype=np.int64) for e in exponents]
    idx = np.arange(p**M)
    out = np.ones(p**M, dtype=np.int64)
    rem = idx
    for i in range(M):
        out = out * cols[i][rem % p] % p
        rem = rem // p
    return out


def phase_polynomial_table(p: int, k: int, M: int, w) -> np.ndarray:
    """The degree-(k-2) product of binomials: exponents (w_1 - 1, w_2, ..., w_M)."""
    w = _validate_weight(p, k, M, w)
    return binomial_product_table(p, M, (w[0] - 1,) + w[1:])


def counterexample_family(p: int, k: int, M: int, w=None, ell: int = 1) -> list[FunctionTable]:
    """Unimodular tuple (f_z) with Λ over the progression system exactly 1.

    f_z = e_p((-1)^{|z|}·C(w_1,z_1)···C(w_M,z_M)·P) at ell=1; higher ell takes
    coordinatewise products on F_p^{ell·M}.  Ordered like s_km_points.
    """
    desc = PhiDescriptor.make(p, k, M)
    p, k, M = int(desc.p), desc.k, desc.M
    w = _validate_weight(p, k, M, w if w is not None else default_weight(p, k, M))
    poly = phase_polynomial_table(p, k, M, w)
    tables = []
    for z in s_km_points(p, k, M):
        coef = (-1) ** sum(z)
        for wi, zi in zip(w, z):
            coef *= comb(wi, zi)
        base = phase_table(p, M, (coef % p) * poly % p)
        tables.append(base if ell == 1 else tensor_product_table(base, ell))
    return tables


def gray_code_check(
    p: int, k: int, M: int, w=None, trials: int = 1000, seed: int = 0, polynomial=None
) -> int:
    """Max canonical residue of the alternating binomial-weighted sum of the
    phase polynomial over sampled combinatorial cubes; 0 when the polynomial
    degree stays below the cube dimension.

    `polynomial` overrides the table (used to confirm that bumping the degree
    breaks the vanishing).
    """
    desc = PhiDescriptor.make(p, k, M)
    p, k, M = int(desc.p), desc.k, desc.M
    w = _validate_weight(p, k, M, w if w is not None else default_weight(p, k, M))
    poly = polynomial if polynomial is not None else phase_polynomial_table(p, k, M, w)
    rng = np.random.default_rng(seed)
    signed_coef = {}
    for z in product(*(range(wi + 1) for wi in w)):
        coef = (-1) ** sum(z)
        for wi, zi in zip(w, z):
            coef *= comb(wi, zi)
        signed_coef[z] = coef % p
    worst = 0
    for _ in range(trials):
        x = rng.integers(0, p, M)
        steps = rng.integers(0, p, (M, M))
        sigma = 0
        for z, coef in signed_coef.items():
            pt = x.copy()
            for i in range(M):
                pt = pt + z[i] * steps[i]
            sigma += coef * int(poly[encode_point(tuple(int(c) % p for c in pt), p)])
        worst = max(worst, sigma % p)
    return worst
