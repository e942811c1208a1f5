"""Modal decomposition of a single impulse-response channel.

The scalar channel h(tau) = [exp(A_cl tau) e_j]_k is expanded into a sum of
modal terms

    h(tau) = sum_i g_i(tau),

where each g_i is one of three shapes:

* ``c tau exp(lam tau)``  with c, lam real (double real eigenvalue),
* ``c exp(lam tau)``      with c, lam real (plain real mode),
* ``c exp(lam tau)``      with lam complex (one half of a conjugate pair).

Coefficients are obtained from the residues of the strictly proper rational
function H(s) = [(s I - A_cl)^{-1} e_j]_k.  The resolvent numerator
polynomial is produced by the Leverrier-Faddeev recursion, and residues are
evaluated against the classified (clustered) pole set, so that a double
eigenvalue yields the coefficient of (s - lam)^{-2} and of (s - lam)^{-1}
exactly once.  This is numerically better behaved near defective matrices
than forming an explicit Jordan transformation.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InputFormatError
from .systems import (
    ClosedLoopSystem,
    EigenClass,
    Eigenstructure,
    eigendecompose_and_classify,
)

__all__ = [
    "TermKind",
    "ModalTerm",
    "ModalExpansion",
    "RealPair",
    "DoubleRealPair",
    "ComplexPairGroup",
    "Singleton",
    "PairedExpansion",
    "PairingStrategy",
    "modal_coefficients",
    "evaluate_impulse_channel",
    "pair_terms",
]

#: Relative ceiling on the imaginary residue left after summing a
#: conjugate-symmetric expansion.
IMAG_RESIDUE_RTOL = 1e-10


class TermKind(enum.Enum):
    POLY_REAL = "poly_real"      # c * tau * exp(lam tau), c and lam real
    PLAIN_REAL = "plain_real"    # c * exp(lam tau), c and lam real
    COMPLEX_HALF = "complex_half"  # c * exp(lam tau), lam not real


@dataclass(frozen=True)
class ModalTerm:
    kind: TermKind
    coeff: complex
    lam: complex

    def __post_init__(self):
        if self.kind is not TermKind.COMPLEX_HALF:
            if self.coeff.imag != 0.0 or self.lam.imag != 0.0:
                raise InputFormatError(
                    "real-kind modal terms must carry exactly real coeff and lam"
                )


@dataclass(frozen=True)
class ModalExpansion:
    """Ordered modal terms of one (state k, disturbance j) channel."""

    terms: tuple[ModalTerm, ...]
    output_index: int
    disturbance_index: int

    @property
    def coeff_scale(self) -> float:
        """Magnitude scale of the channel, used for relative tolerances."""
        return float(sum(abs(t.coeff) for t in self.terms)) or 1.0


class PairingStrategy(enum.Enum):
    DEFAULT = "default"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class RealPair:
    c_i: float
    c_j: float
    lam_i: float
    lam_j: float


@dataclass(frozen=True)
class DoubleRealPair:
    c_i: float      # coefficient of tau * exp(lam tau)
    c_ip1: float    # coefficient of exp(lam tau)
    lam: float


@dataclass(frozen=True)
class ComplexPairGroup:
    c: complex      # coefficient attached to lam = sigma + i omega (omega > 0)
    sigma: float
    omega: float


@dataclass(frozen=True)
class Singleton:
    c: float
    lam: float


PairGroup = Union[RealPair, DoubleRealPair, ComplexPairGroup, Singleton]


@dataclass(frozen=True)
class PairedExpansion:
    groups: tuple[PairGroup, ...]
    output_index: int
    disturbance_index: int


def _resolvent_numerator(a: np.ndarray, ej: np.ndarray, k: int) -> np.ndarray:
    """Coefficients (highest power first) of N(s) = [adj(sI - A) e_j]_k.

    Leverrier-Faddeev: B_0 = I, B_m = A B_{m-1} - (tr(A B_{m-1})/m) I.
    Then adj(sI - A) = sum_m B_m s^{n-1-m}.
    """
    n = a.shape[0]
    b = np.eye(n)
    coeffs = np.empty(n)
    coeffs[0] = float((b @ ej)[k])
    for m in range(1, n):
        mmat = a @ b
        b = mmat - (np.trace(mmat) / m) * np.eye(n)
        coeffs[m] = float((b @ ej)[k])
    return coeffs


def _clustered_poles(eig: Eigenstructure) -> list[tuple[complex, int]]:
    """Distinct (value, multiplicity) pairs in the eigenstructure ordering,
    with complex pairs contributing both conjugate values separately."""
    poles: list[tuple[complex, int]] = []
    seen: set[int] = set()
    for i, e in enumerate(eig.entries):
        if i in seen:
            continue
        if e.klass is EigenClass.DOUBLE_REAL:
            poles.append((e.value, 2))
            seen.add(e.partner_index)
        else:
            poles.append((e.value, 1))
    return poles


def _realified(z: complex, scale: float, what: str) -> float:
    if abs(z.imag) > IMAG_RESIDUE_RTOL * max(scale, abs(z)):
        raise InputFormatError(
            f"{what} expected real but has imaginary part {z.imag:g}"
        )
    return float(z.real)


def modal_coefficients(
    sys: ClosedLoopSystem,
    k: int,
    j: int,
    eig: Optional[Eigenstructure] = None,
    eps_multiplicity: float = 1e-7,
) -> ModalExpansion:
    """Expand channel (k, j) into modal terms via residues of the resolvent.

    A simple pole lam contributes one term ``residue * exp(lam tau)``; a
    double pole contributes the (s - lam)^{-2} coefficient on
    ``tau exp(lam tau)`` plus the (s - lam)^{-1} coefficient on
    ``exp(lam tau)``.  Conjugate poles get conjugate coefficients.

    Pass a precomputed ``eig`` to skip reclassification.
    """
    if not 0 <= k < sys.n_x:
        raise InputFormatError(f"output index {k} out of range [0, {sys.n_x})")
    ej = sys.disturbance_column(j)
    if eig is None:
        eig = eigendecompose_and_classify(sys, eps_multiplicity)

    num = _resolvent_numerator(sys.a_cl, ej, k)
    dnum = np.polyder(num) if len(num) > 1 else np.zeros(1)
    poles = _clustered_poles(eig)
    scale = float(np.sum(np.abs(ej))) or 1.0

    # residues per distinct pole, keyed by position in `poles`
    res: dict[int, tuple[complex, ...]] = {}
    for p, (lam, mult) in enumerate(poles):
        if lam.imag < 0.0:
            continue  # filled in by conjugation below
        denom = complex(1.0)
        dsum = complex(0.0)
        for q, (lq, mq) in enumerate(poles):
            if q == p:
                continue
            denom *= (lam - lq) ** mq
            dsum += mq / (lam - lq)
        n_at = complex(np.polyval(num, lam))
        if mult == 1:
            res[p] = (n_at / denom,)
        else:
            nd_at = complex(np.polyval(dnum, lam))
            c_poly = n_at / denom
            c_plain = (nd_at - n_at * dsum) / denom
            res[p] = (c_poly, c_plain)

    # assemble terms following the eigenstructure ordering
    terms: list[ModalTerm] = []
    p = 0
    i = 0
    entries = eig.entries
    while i < len(entries):
        e = entries[i]
        lam, mult = poles[p]
        if e.klass is EigenClass.DOUBLE_REAL:
            c_poly, c_plain = res[p]
            lam_r = _realified(lam, 1.0, "double real eigenvalue")
            terms.append(
                ModalTerm(TermKind.POLY_REAL, _realified(c_poly, scale, "coefficient"), lam_r)
            )
            terms.append(
                ModalTerm(TermKind.PLAIN_REAL, _realified(c_plain, scale, "coefficient"), lam_r)
            )
            i += 2
        elif e.klass is EigenClass.COMPLEX_PAIR:
            (c,) = res[p]
            terms.append(ModalTerm(TermKind.COMPLEX_HALF, c, lam))
            terms.append(ModalTerm(TermKind.COMPLEX_HALF, np.conj(c), np.conj(lam)))
            i += 2
            p += 1  # conjugate value is its own pole entry
        else:
            (c,) = res[p]
            terms.append(
                ModalTerm(
                    TermKind.PLAIN_REAL,
                    _realified(c, scale, "coefficient"),
                    _realified(lam, 1.0, "real eigenvalue"),
                )
            )
            i += 1
        p += 1

    return ModalExpansion(terms=tuple(terms), output_index=k, disturbance_index=j)


def evaluate_impulse_channel(exp: ModalExpansion, tau):
    """Evaluate sum_i g_i(tau) and return its real part.

    Accepts a scalar or an array of tau >= 0.  Raises if the imaginary
    residue of the (conjugate-symmetric) sum exceeds the relative ceiling.
    """
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0):
        raise InputFormatError("tau must be nonnegative")
    acc = np.zeros(t.shape, dtype=complex)
    for term in exp.terms:
        if term.kind is TermKind.POLY_REAL:
            acc += term.coeff.real * t * np.exp(term.lam.real * t)
        elif term.kind is TermKind.PLAIN_REAL:
            acc += term.coeff.real * np.exp(term.lam.real * t)
        else:
            acc += term.coeff * np.exp(term.lam * t)
    imag_max = float(np.max(np.abs(acc.imag))) if acc.size else 0.0
    if imag_max > IMAG_RESIDUE_RTOL * exp.coeff_scale:
        raise InputFormatError(
            f"imaginary residue {imag_max:g} exceeds tolerance; "
            "expansion is not conjugate symmetric"
        )
    out = acc.real
    return float(out) if np.isscalar(tau) or out.ndim == 0 else out


def _default_real_pairs(reals: list[ModalTerm]) -> list[PairGroup]:
    ordered = sorted(reals, key=lambda tm: (tm.lam.real, tm.coeff.real))
    groups: list[PairGroup] = []
    for a, b in itertools.zip_longest(ordered[::2], ordered[1::2]):
        if b is None:
            groups.append(Singleton(a.coeff.real, a.lam.real))
        else:
            groups.append(RealPair(a.coeff.real, b.coeff.real, a.lam.real, b.lam.real))
    return groups


def _optimal_real_pairs(reals: list[ModalTerm]) -> list[PairGroup]:
    """Exhaustive minimum-bound perfect matching of the distinct real terms.

    Minimizes the summed time-independent pair integrals; an odd count also
    enumerates which term is left as the singleton.  Intended for small
    n_r (<= 10); the matching count grows as (n_r - 1)!!.
    """
    from .bounds import bound_distinct_real_pair, bound_singleton, make_real_pair_work

    n = len(reals)
    if n > 10:
        raise InputFormatError(
            f"optimal pairing supports at most 10 distinct real terms, got {n}"
        )

    def pair_cost(a: ModalTerm, b: ModalTerm) -> float:
        if a.lam.real == b.lam.real:
            # equal realified values cannot occur for distinct reals, but
            # guard against degenerate input
            return bound_singleton(a.coeff.real + b.coeff.real, a.lam.real, None)
        w = make_real_pair_work(a.coeff.real, b.coeff.real, a.lam.real, b.lam.real)
        return bound_distinct_real_pair(w, None)

    best_groups: Optional[list[PairGroup]] = None
    best_cost = np.inf

    def matchings(items: tuple[int, ...]):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for pos in range(len(rest)):
            partner = rest[pos]
            remaining = rest[:pos] + rest[pos + 1 :]
            for tail in matchings(remaining):
                yield [(first, partner)] + tail

    idx = tuple(range(n))
    single_choices = [None] if n % 2 == 0 else list(idx)
    for single in single_choices:
        left = tuple(i for i in idx if i != single)
        for match in matchings(left):
            cost = 0.0
            groups: list[PairGroup] = []
            for ia, ib in match:
                a, b = reals[ia], reals[ib]
                cost += pair_cost(a, b)
                groups.append(
                    RealPair(a.coeff.real, b.coeff.real, a.lam.real, b.lam.real)
                )
            if single is not None:
                s = reals[single]
                cost += bound_singleton(s.coeff.real, s.lam.real, None)
                groups.append(Singleton(s.coeff.real, s.lam.real))
            if cost < best_cost:
                best_cost, best_groups = cost, groups
    assert best_groups is not None
    return best_groups


def pair_terms(
    exp: ModalExpansion,
    strategy: PairingStrategy = PairingStrategy.DEFAULT,
) -> PairedExpansion:
    """Group modal terms into analytically solvable pairs.

    Double-real partners always stay together, as do conjugate halves.
    Distinct real terms are paired consecutively in ascending eigenvalue
    order (DEFAULT) or by exhaustive minimum-bound matching (OPTIMAL); an
    odd leftover becomes a singleton.
    """
    groups: list[PairGroup] = []
    reals: list[ModalTerm] = []
    i = 0
    terms = exp.terms
    while i < len(terms):
        t = terms[i]
        if t.kind is TermKind.POLY_REAL:
            nxt = terms[i + 1]
            groups.append(DoubleRealPair(t.coeff.real, nxt.coeff.real, t.lam.real))
            i += 2
        elif t.kind is TermKind.COMPLEX_HALF:
            hi = t if t.lam.imag > 0 else terms[i + 1]
            groups.append(ComplexPairGroup(hi.coeff, hi.lam.real, hi.lam.imag))
            i += 2
        else:
            reals.append(t)
            i += 1

    if strategy is PairingStrategy.OPTIMAL and len(reals) > 1:
        groups.extend(_optimal_real_pairs(reals))
    else:
        groups.extend(_default_real_pairs(reals))

    return PairedExpansion(
        groups=tuple(groups),
        output_index=exp.output_index,
        disturbance_index=exp.disturbance_index,
    )
