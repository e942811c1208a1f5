"""Closed-loop system construction and eigenstructure classification.

A closed loop is built from plant matrices (A, b) and a state-feedback gain
k as A_cl = A - b k^T, with an additive disturbance entering through the
columns of E.  Everything downstream (modal decomposition, analytic bounds,
the numerical oracle) operates on the resulting pair (A_cl, E).

Eigenvalues are classified into three categories before any bound can be
formed: distinct real, double real (algebraic multiplicity 2) and complex
conjugate pairs.  Higher multiplicities are rejected.  Classification uses
a relative clustering tolerance so that nearly defective spectra computed
in floating point are treated as exact double eigenvalues.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputFormatError, UnstableSystemError, UnsupportedMultiplicityError

__all__ = [
    "ClosedLoopSystem",
    "DisturbanceBounds",
    "EigenClass",
    "EigenEntry",
    "Eigenstructure",
    "build_closed_loop",
    "check_hurwitz",
    "eigendecompose_and_classify",
]

#: Default relative tolerance (w.r.t. spectral radius) below which two
#: eigenvalues are merged into a double eigenvalue and below which a tiny
#: imaginary part is flushed to zero.
DEFAULT_EPS_MULTIPLICITY = 1e-7


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputFormatError(f"{name} must be a matrix, got ndim={arr.ndim}")
    return arr


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.ndim != 1:
        raise InputFormatError(f"{name} must be a vector")
    return arr


@dataclass(frozen=True)
class ClosedLoopSystem:
    """Stable closed loop  x' = A_cl x + E z  with n_x states and n_z
    disturbance channels."""

    a_cl: np.ndarray
    e_mat: np.ndarray

    def __post_init__(self):
        a = _as_matrix(self.a_cl, "a_cl")
        e = _as_matrix(self.e_mat, "e_mat")
        if a.shape[0] != a.shape[1]:
            raise InputFormatError(f"a_cl must be square, got shape {a.shape}")
        if e.shape[0] != a.shape[0]:
            raise InputFormatError(
                f"e_mat must have {a.shape[0]} rows, got {e.shape[0]}"
            )
        a.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "a_cl", a)
        object.__setattr__(self, "e_mat", e)

    @property
    def n_x(self) -> int:
        return self.a_cl.shape[0]

    @property
    def n_z(self) -> int:
        return self.e_mat.shape[1]

    def disturbance_column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.n_z:
            raise InputFormatError(f"disturbance index {j} out of range [0, {self.n_z})")
        return self.e_mat[:, j]


@dataclass(frozen=True)
class DisturbanceBounds:
    """Per-channel amplitude bounds: each z_j(t) stays in [-z_max[j], z_max[j]]."""

    z_max: np.ndarray

    def __post_init__(self):
        z = _as_vector(self.z_max, "z_max")
        if np.any(z < 0):
            raise InputFormatError("z_max entries must be nonnegative")
        z.setflags(write=False)
        object.__setattr__(self, "z_max", z)

    @property
    def n_z(self) -> int:
        return self.z_max.shape[0]


class EigenClass(enum.Enum):
    DISTINCT_REAL = "distinct_real"
    DOUBLE_REAL = "double_real"
    COMPLEX_PAIR = "complex_pair"


@dataclass(frozen=True)
class EigenEntry:
    value: complex
    klass: EigenClass
    partner_index: Optional[int] = None


@dataclass(frozen=True)
class Eigenstructure:
    """Classified, sorted spectrum of a Hurwitz closed loop.

    Ordering convention: double-real partners first (adjacent), then complex
    conjugate pairs (value with positive imaginary part first), then the
    distinct real eigenvalues in ascending order.
    """

    entries: tuple[EigenEntry, ...]
    n_r: int = field(default=0)
    n_d: int = field(default=0)
    n_c: int = field(default=0)

    @property
    def n_x(self) -> int:
        return len(self.entries)

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries])


def build_closed_loop(a, b, k_gain, e_mat) -> ClosedLoopSystem:
    """Form the closed loop A_cl = A - b k^T and attach the disturbance map E.

    Parameters
    ----------
    a : (n, n) array_like
        Open-loop dynamics.
    b : (n,) array_like
        Scalar-input injection vector.
    k_gain : (n,) array_like
        State-feedback gain (u = -k^T x convention folded into the sign).
    e_mat : (n, n_z) array_like
        Disturbance input map; a 1-D array is treated as a single column.
    """
    a = _as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise InputFormatError(f"a must be square, got shape {a.shape}")
    n = a.shape[0]
    bv = _as_vector(b, "b")
    kv = _as_vector(k_gain, "k_gain")
    if bv.shape[0] != n:
        raise InputFormatError(f"b must have length {n}, got {bv.shape[0]}")
    if kv.shape[0] != n:
        raise InputFormatError(f"k_gain must have length {n}, got {kv.shape[0]}")
    e = _as_matrix(e_mat, "e_mat")
    if e.shape[0] != n:
        raise InputFormatError(f"e_mat must have {n} rows, got {e.shape[0]}")
    a_cl = a - np.outer(bv, kv)
    return ClosedLoopSystem(a_cl=a_cl, e_mat=e)


def _eigenvalues(a_cl: np.ndarray) -> np.ndarray:
    """Eigenvalues of a_cl; a closed-form quadratic path for n = 2 keeps
    two-state results bit-stable across platforms."""
    n = a_cl.shape[0]
    if n == 1:
        return np.array([complex(a_cl[0, 0])])
    if n == 2:
        tr = a_cl[0, 0] + a_cl[1, 1]
        det = a_cl[0, 0] * a_cl[1, 1] - a_cl[0, 1] * a_cl[1, 0]
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            r = np.sqrt(disc)
            return np.array([complex((tr + r) / 2.0), complex((tr - r) / 2.0)])
        w = np.sqrt(-disc) / 2.0
        return np.array([complex(tr / 2.0, w), complex(tr / 2.0, -w)])
    return np.linalg.eigvals(a_cl)


def check_hurwitz(sys: ClosedLoopSystem, tol: float = 0.0) -> bool:
    """True iff every eigenvalue of a_cl has real part < -tol."""
    ev = _eigenvalues(sys.a_cl)
    return bool(np.max(ev.real) < -tol)


def _pair_conjugates(cplx: list[complex], tol: float) -> list[complex]:
    """Match complex eigenvalues into conjugate pairs; returns canonical
    values (one per pair, positive imaginary part)."""
    plus = sorted([z for z in cplx if z.imag > 0], key=lambda z: (z.real, z.imag))
    minus = sorted([z for z in cplx if z.imag < 0], key=lambda z: (z.real, -z.imag))
    if len(plus) != len(minus):
        raise UnsupportedMultiplicityError(
            "complex eigenvalues do not pair into conjugates"
        )
    canon = []
    used = [False] * len(minus)
    for zp in plus:
        best, best_d = None, np.inf
        for i, zm in enumerate(minus):
            if used[i]:
                continue
            d = abs(zp - np.conj(zm))
            if d < best_d:
                best, best_d = i, d
        if best is None or best_d > 10 * tol + 1e-9 * abs(zp):
            raise UnsupportedMultiplicityError(
                f"no conjugate partner found for eigenvalue {zp}"
            )
        used[best] = True
        zm = minus[best]
        canon.append((zp + np.conj(zm)) / 2.0)  # symmetrize the pair
    return canon


def eigendecompose_and_classify(
    sys: ClosedLoopSystem,
    eps_multiplicity: float = DEFAULT_EPS_MULTIPLICITY,
) -> Eigenstructure:
    """Compute and classify the spectrum of a Hurwitz closed loop.

    Eigenvalues within ``eps_multiplicity * spectral_radius`` of each other
    are merged into a double eigenvalue; imaginary parts below the same
    threshold are flushed to zero.  Real clusters of size 3 or more, and any
    repeated complex pair, raise :class:`UnsupportedMultiplicityError`.

    Raises
    ------
    UnstableSystemError
        If any eigenvalue real part is >= 0.
    UnsupportedMultiplicityError
        If a multiplicity above 2 is detected.
    """
    ev = _eigenvalues(sys.a_cl)
    scale = float(np.max(np.abs(ev)))
    if scale == 0.0:
        raise UnstableSystemError("all eigenvalues are zero; system is not Hurwitz")
    tol = eps_multiplicity * scale

    # realify near-real eigenvalues
    vals = [complex(z.real, 0.0) if abs(z.imag) <= tol else z for z in ev]
    if max(z.real for z in vals) >= 0.0:
        worst = max(vals, key=lambda z: z.real)
        raise UnstableSystemError(
            f"system is not Hurwitz: eigenvalue {worst} has nonnegative real part"
        )

    reals = sorted(z.real for z in vals if z.imag == 0.0)
    cplx = [z for z in vals if z.imag != 0.0]

    # cluster real eigenvalues
    real_clusters: list[list[float]] = []
    for x in reals:
        if real_clusters and abs(x - real_clusters[-1][-1]) <= tol:
            real_clusters[-1].append(x)
        else:
            real_clusters.append([x])
    for cl in real_clusters:
        if len(cl) > 2:
            raise UnsupportedMultiplicityError(
                f"real eigenvalue {np.mean(cl):g} has multiplicity {len(cl)} > 2"
            )

    pairs = _pair_conjugates(cplx, tol)
    pairs.sort(key=lambda z: (z.real, z.imag))
    for i in range(1, len(pairs)):
        if abs(pairs[i] - pairs[i - 1]) <= tol:
            raise UnsupportedMultiplicityError(
                f"complex pair {pairs[i]} repeats; complex multiplicity above 1 "
                "is not supported"
            )

    entries: list[EigenEntry] = []
    n_d = n_c = n_r = 0
    doubles = sorted(float(np.mean(cl)) for cl in real_clusters if len(cl) == 2)
    singles = sorted(cl[0] for cl in real_clusters if len(cl) == 1)
    for lam in doubles:
        i = len(entries)
        entries.append(EigenEntry(complex(lam), EigenClass.DOUBLE_REAL, i + 1))
        entries.append(EigenEntry(complex(lam), EigenClass.DOUBLE_REAL, i))
        n_d += 2
    for lam in pairs:
        i = len(entries)
        entries.append(EigenEntry(lam, EigenClass.COMPLEX_PAIR, i + 1))
        entries.append(EigenEntry(np.conj(lam), EigenClass.COMPLEX_PAIR, i))
        n_c += 2
    for lam in singles:
        entries.append(EigenEntry(complex(lam), EigenClass.DISTINCT_REAL, None))
        n_r += 1

    return Eigenstructure(entries=tuple(entries), n_r=n_r, n_d=n_d, n_c=n_c)
