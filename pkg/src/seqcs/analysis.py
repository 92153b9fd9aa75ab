"""Exact enumeration of form averages and Gowers uniformity norms on F_p^n.

Group elements of F_p^n are encoded as integers in [0, p^n): digit t of the
index (base p, digit 0 least significant) is coordinate t of the point.
Averages enumerate every assignment; there is no sampling and no Fourier
shortcut.  Sums use numpy's fixed-order pairwise reduction per chunk and an
exact compensated sum of the chunk totals, so results are bit-stable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .systems import LinearSystem

log = logging.getLogger(__name__)

DEFAULT_POINT_GUARD = 10**8
DEFAULT_UK_CAP = 8
_CHUNK = 1 << 18
_BATCH_BUDGET = 1 << 24


class EnumerationGuardExceeded(RuntimeError):
    """The requested enumeration exceeds the configured size guard."""


@dataclass(frozen=True)
class FunctionTable:
    """Dense table of a complex function on F_p^n."""

    p: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.p**self.n,):
            raise ValueError(f"expected {self.p ** self.n} values, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.p**self.n

    def is_one_bounded(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values)) <= 1 + tol)

    def conjugate(self) -> "FunctionTable":
        return FunctionTable(self.p, self.n, self.values.conj())

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @staticmethod
    def from_json(raw: dict) -> "FunctionTable":
        vals = np.array([complex(re, im) for re, im in raw["values"]])
        return FunctionTable(raw["p"], raw["n"], vals)

    @staticmethod
    def constant(p: int, n: int, value: complex = 1.0) -> "FunctionTable":
        return FunctionTable(p, n, np.full(p**n, value, dtype=np.complex128))

    @staticmethod
    def indicator(p: int, n: int, points) -> "FunctionTable":
        vals = np.zeros(p**n, dtype=np.complex128)
        for pt in points:
            vals[encode_point(pt, p)] = 1.0
        return FunctionTable(p, n, vals)


def encode_point(point, p: int) -> int:
    idx = 0
    for t in reversed(range(len(point))):
        idx = idx * p + (point[t] % p)
    return idx


def digit_matrix(indices: np.ndarray, p: int, n: int) -> list[np.ndarray]:
    """Digit arrays [coordinate 0, ..., coordinate n-1] of encoded group elements."""
    digits = []
    rem = np.asarray(indices).copy()
    for _ in range(n):
        digits.append(rem % p)
        rem //= p
    return digits


def phase_table(p: int, n: int, residues: np.ndarray) -> FunctionTable:
    """e_p of an array of residues: exp(2πi·residues/p)."""
    vals = np.exp(2j * np.pi * (np.asarray(residues) % p) / p)
    return FunctionTable(p, n, vals)


def character_table(p: int, n: int, frequency) -> FunctionTable:
    """x ↦ e_p(<frequency, x>)."""
    idx = np.arange(p**n)
    digits = digit_matrix(idx, p, n)
    acc = np.zeros(p**n, dtype=np.int64)
    for t in range(n):
        acc += (frequency[t] % p) * digits[t]
    return phase_table(p, n, acc)


def quadratic_table(p: int, n: int, quad, linear=None) -> FunctionTable:
    """x ↦ e_p(Σ_{s<=t} quad[s][t]·x_s·x_t + <linear, x>)."""
    idx = np.arange(p**n)
    digits = digit_matrix(idx, p, n)
    acc = np.zeros(p**n, dtype=np.int64)
    for s in range(n):
        for t in range(s, n):
            c = quad[s][t] % p
            if c:
                acc += c * digits[s] * digits[t]
    if linear is not None:
        for t in range(n):
            acc += (linear[t] % p) * digits[t]
    return phase_table(p, n, acc)


def tensor_product_table(f: FunctionTable, ell: int) -> FunctionTable:
    """ell-fold product function on F_p^{ell·n}: (y_1,..,y_ell) ↦ Π f(y_j)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    vals = f.values
    for _ in range(ell - 1):
        vals = np.kron(f.values, vals)
    return FunctionTable(f.p, f.n * ell, vals)


def random_one_bounded(p: int, n: int, seed, family: str = "phases") -> FunctionTable:
    """Deterministic-from-seed 1-bounded random table."""
    rng = np.random.default_rng(seed)
    size = p**n
    if family == "phases":
        vals = np.exp(2j * np.pi * rng.random(size))
    elif family == "disk":
        radius = np.sqrt(rng.random(size))
        vals = radius * np.exp(2j * np.pi * rng.random(size))
    elif family == "signs":
        vals = (rng.integers(0, 2, size) * 2 - 1).astype(np.complex128)
    elif family == "sparse":
        vals = (rng.random(size) < 1.0 / p).astype(np.complex128)
    else:
        raise ValueError(f"unknown family: {family}")
    return FunctionTable(p, n, vals)


# ---------------------------------------------------------------------------
# form averages


class LambdaEvaluator:
    """Average of Π f_i(ψ_i(x)) over all assignments, with precomputed form actions.

    The per-form index arrays (form applied to the digit-encoded assignment
    grid) are the hot path; they are cached whenever the grid is small enough
    and recomputed per chunk otherwise.
    """

    def __init__(self, system: LinearSystem, n: int, point_guard: int = DEFAULT_POINT_GUARD):
        self.system = system
        self.n = n
        self.group_size = int(system.p) ** n
        self.total = self.group_size**system.d
        if self.total > point_guard:
            raise EnumerationGuardExceeded(
                f"{self.group_size}^{system.d} assignment points exceed the guard {point_guard}"
            )
        self._cached_actions = None
        if self.total * system.r <= 1 << 23:
            self._cached_actions = self._actions(0, self.total)

    def _actions(self, start: int, stop: int) -> list[np.ndarray]:
        p, d, n = int(self.system.p), self.system.d, self.n
        flat = np.arange(start, stop, dtype=np.int64)
        var_digits = []
        rem = flat
        for _ in range(d):
            var_digits.append(digit_matrix(rem % self.group_size, p, n))
            rem = rem // self.group_size
        actions = []
        for form in self.system.forms:
            out = np.zeros(stop - start, dtype=np.int64)
            mult = 1
            for t in range(n):
                acc = np.zeros(stop - start, dtype=np.int64)
                for j in range(d):
                    if form[j]:
                        acc += form[j] * var_digits[j][t]
                out += (acc % p) * mult
                mult *= p
            actions.append(out)
        return actions

    def value(self, tables, conjugated=None) -> complex:
        if len(tables) != self.system.r:
            raise ValueError(f"expected {self.system.r} tables, got {len(tables)}")
        for f in tables:
            if f.p != int(self.system.p) or f.n != self.n:
                raise ValueError("table group mismatch")
        flags = conjugated if conjugated is not None else [False] * len(tables)
        reals: list[float] = []
        imags: list[float] = []
        for start in range(0, self.total, _CHUNK):
            stop = min(start + _CHUNK, self.total)
            acts = (
                [a[start:stop] for a in self._cached_actions]
                if self._cached_actions is not None
                else self._actions(start, stop)
            )
            prod = np.ones(stop - start, dtype=np.complex128)
            for i, f in enumerate(tables):
                gathered = f.values[acts[i]]
                prod *= gathered.conj() if flags[i] else gathered
            s = prod.sum()
            reals.append(float(s.real))
            imags.append(float(s.imag))
        return complex(math.fsum(reals), math.fsum(imags)) / self.total


_evaluators: dict = {}


def get_evaluator(system: LinearSystem, n: int, point_guard: int = DEFAULT_POINT_GUARD) -> LambdaEvaluator:
    key = (int(system.p), system.forms, n)
    if key not in _evaluators:
        if len(_evaluators) > 32:
            _evaluators.clear()
        _evaluators[key] = LambdaEvaluator(system, n, point_guard)
    evaluator = _evaluators[key]
    if evaluator.total > point_guard:
        raise EnumerationGuardExceeded(
            f"{evaluator.total} assignment points exceed the guard {point_guard}"
        )
    return evaluator


def lambda_average(
    system: LinearSystem,
    tables,
    conjugated=None,
    point_guard: int = DEFAULT_POINT_GUARD,
) -> complex:
    """Exact mean of Π f_i(ψ_i(x_1..x_d)) over all assignments in (F_p^n)^d."""
    return get_evaluator(system, tables[0].n, point_guard).value(tables, conjugated)


# ---------------------------------------------------------------------------
# uniformity norms

_shift_cache: dict = {}


def shift_matrix(p: int, n: int) -> np.ndarray:
    """SHIFT[h, x] = index of x + h; cached per group."""
    key = (p, n)
    if key not in _shift_cache:
        size = p**n
        if size * size > 1 << 24:
            raise EnumerationGuardExceeded(f"shift matrix for group of size {size} too large")
        idx = np.arange(size, dtype=np.int64)
        xd = digit_matrix(idx[None, :], p, n)
        hd = digit_matrix(idx[:, None], p, n)
        out = np.zeros((size, size), dtype=np.int64)
        mult = 1
        for t in range(n):
            out += ((xd[t] + hd[t]) % p) * mult
            mult *= p
        if len(_shift_cache) > 16:
            _shift_cache.clear()
        _shift_cache[key] = out
    return _shift_cache[key]


def _u_power_batch(batch: np.ndarray, k: int, shift: np.ndarray) -> np.ndarray:
    """‖g‖_{U^k}^{2^k} for each row g of `batch` via the derivative recursion."""
    if k == 1:
        m = batch.mean(axis=1)
        return (m * m.conj()).real
    nrows, size = batch.shape
    if nrows * size * size <= _BATCH_BUDGET:
        derived = batch[:, shift] * batch.conj()[:, None, :]
        vals = _u_power_batch(derived.reshape(nrows * size, size), k - 1, shift)
        return vals.reshape(nrows, size).mean(axis=1)
    acc = np.zeros(nrows)
    for h in range(size):
        acc += _u_power_batch(batch[:, shift[h]] * batch.conj(), k - 1, shift)
    return acc / size


def gowers_norm(
    f: FunctionTable,
    k: int,
    point_guard: int = DEFAULT_POINT_GUARD,
    k_cap: int = DEFAULT_UK_CAP,
) -> float:
    """U^k norm (k >= 2) via the multiplicative-derivative recursion.

    The 2^k-power average is real and nonnegative in exact arithmetic;
    negative roundoff is clamped to zero before taking the root.
    """
    if k < 2:
        raise ValueError("uniformity norm defined here for k >= 2")
    if k > k_cap:
        raise EnumerationGuardExceeded(f"k={k} above cap {k_cap}")
    if f.size > point_guard:
        raise EnumerationGuardExceeded("group too large for norm enumeration")
    shift = shift_matrix(f.p, f.n)
    raw = float(_u_power_batch(f.values[None, :], k, shift)[0])
    if raw < 0:
        log.debug("clamping negative U^%d power average %.3e to 0", k, raw)
        raw = 0.0
    return raw ** (1.0 / (1 << k))


def gowers_norm_direct(f: FunctionTable, k: int, point_guard: int = DEFAULT_POINT_GUARD) -> float:
    """Independent oracle: the full 2^k-fold corner sum over x, h_1, ..., h_k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    size = f.size
    if size ** (k + 1) > point_guard:
        raise EnumerationGuardExceeded("direct norm enumeration exceeds the guard")
    p, n = f.p, f.n
    perms: dict[int, np.ndarray] = {}

    def perm_for(shift_elt: int) -> np.ndarray:
        if shift_elt not in perms:
            idx = np.arange(size, dtype=np.int64)
            digits = digit_matrix(idx, p, n)
            sdig = digit_matrix(np.array([shift_elt]), p, n)
            out = np.zeros(size, dtype=np.int64)
            mult = 1
            for t in range(n):
                out += ((digits[t] + sdig[t][0]) % p) * mult
                mult *= p
            perms[shift_elt] = out
        return perms[shift_elt]

    def add_elt(a: int, b: int) -> int:
        out = 0
        mult = 1
        for _ in range(n):
            out += ((a % p) + (b % p)) % p * mult
            a //= p
            b //= p
            mult *= p
        return out

    reals: list[float] = []
    for hs in product(range(size), repeat=k):
        prod = np.ones(size, dtype=np.complex128)
        for bits in range(1 << k):
            corner = 0
            for t in range(k):
                if bits >> t & 1:
                    corner = add_elt(corner, hs[t])
            gathered = f.values[perm_for(corner)]
            if bin(bits).count("1") % 2:
                gathered = gathered.conj()
            prod *= gathered
        reals.append(float(prod.sum().real))
    raw = math.fsum(reals) / size ** (k + 1)
    if raw < 0:
        log.debug("clamping negative direct U^%d power average %.3e to 0", k, raw)
        raw = 0.0
    return raw ** (1.0 / (1 << k))


# ---------------------------------------------------------------------------
# generalized von Neumann harness

_GVN_FAMILIES = ("phases", "disk", "signs", "sparse")


@dataclass
class GvnReport:
    system_hash: str
    i: int
    k: int
    ell: int
    n: int
    exponent: float
    family: str
    trials: int
    seed: int
    tol: float
    records: list[dict]
    max_violation: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "system_hash": self.system_hash,
            "i": self.i,
            "k": self.k,
            "ell": self.ell,
            "n": self.n,
            "exponent": self.exponent,
            "family": self.family,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tol,
            "records": self.records,
            "max_violation": self.max_violation,
            "passed": self.passed,
        }


def _draw_tuple(system: LinearSystem, n: int, family: str, seed: int, trial: int):
    p = int(system.p)
    tables = []
    for j in range(system.r):
        sub_seed = [seed, trial, j]
        if family == "random":
            tables.append(random_one_bounded(p, n, sub_seed, _GVN_FAMILIES[j % len(_GVN_FAMILIES)]))
        elif family in _GVN_FAMILIES:
            tables.append(random_one_bounded(p, n, sub_seed, family))
        elif family == "character":
            rng = np.random.default_rng(sub_seed)
            freq = [int(rng.integers(0, p)) for _ in range(n)]
            tables.append(character_table(p, n, freq))
        elif family == "quadratic-phase":
            rng = np.random.default_rng(sub_seed)
            quad = [[int(rng.integers(0, p)) for _ in range(n)] for _ in range(n)]
            lin = [int(rng.integers(0, p)) for _ in range(n)]
            tables.append(quadratic_table(p, n, quad, lin))
        else:
            raise ValueError(f"unknown family: {family}")
    return tables


def gvn_check(
    system: LinearSystem,
    i: int,
    k: int,
    ell: int,
    n: int,
    family: str = "random",
    trials: int = 100,
    seed: int = 0,
    tables=None,
    tol: float = 1e-9,
    point_guard: int = DEFAULT_POINT_GUARD,
) -> GvnReport:
    """Check |Λ(f_1..f_r)| <= ‖f_i‖_{U^{k+1}}^{2^{1-ell}} over drawn tuples.

    With `tables` given (family "counterexample"/"fixed"), the supplied tuple
    is evaluated once instead of sampling.
    """
    exponent = 2.0 ** (1 - ell)
    evaluator = get_evaluator(system, n, point_guard)
    fixed = tables is not None
    n_trials = 1 if fixed else trials
    records = []
    for t in range(n_trials):
        tup = tables if fixed else _draw_tuple(system, n, family, seed, t)
        lam = abs(evaluator.value(tup))
        norm = gowers_norm(tup[i], k + 1, point_guard)
        slack = norm**exponent - lam
        records.append({"abs_lambda": lam, "norm": norm, "slack": slack})
    max_violation = max(0.0, -min(rec["slack"] for rec in records))
    return GvnReport(
        system_hash=system.digest(),
        i=i,
        k=k,
        ell=ell,
        n=n,
        exponent=exponent,
        family="fixed" if fixed else family,
        trials=n_trials,
        seed=seed,
        tol=tol,
        records=records,
        max_violation=max_violation,
        passed=max_violation <= tol,
    )
