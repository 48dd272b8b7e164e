"""State algebra in the Dicke basis.

A permutation-symmetric pure state of ``n`` qubits is stored as its ``n+1``
Dicke coefficients.  This module covers construction (Dicke states,
spin-coherent states, symmetrized products of arbitrary single-qubit
states), Husimi evaluation, the embedding into the full ``2**n`` amplitude
space with its inverse projection, and the permutation-symmetry check.

Conventions fixed here and relied on everywhere else:

* a single-qubit state is ``cos(theta/2)|0> + exp(i*phi) sin(theta/2)|1>``;
* qubit 0 is the most significant bit of a full-space amplitude index;
* every constructed state is normalized and the first non-negligible Dicke
  coefficient is made real positive, so equal states compare bitwise equal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import comb

from .errors import DomainError, ResourceError, SymmetryViolationError

__all__ = [
    "QubitState",
    "SymmetricState",
    "FullState",
    "SymmetryReport",
    "dicke_state",
    "coherent_state",
    "symmetrize",
    "symmetrization_constant",
    "husimi",
    "embed_full",
    "project_sym",
    "is_permutation_symmetric",
    "overlap",
    "fidelity",
    "jm_to_nk",
    "nk_to_jm",
    "state_to_json",
    "state_from_json",
]

_PHASE_TOL = 1e-12
_TWO_PI = 2.0 * math.pi


def _sqrt_binom(n: int) -> np.ndarray:
    """sqrt(C(n, k)) for k = 0..n."""
    return np.sqrt(np.array([float(comb(n, k, exact=True)) for k in range(n + 1)]))


def _format_float(x: float) -> str:
    return f"{x + 0.0:.17g}"  # +0.0 folds -0.0 into 0.0


@dataclass(frozen=True)
class QubitState:
    """Single-qubit pure state cos(theta/2)|0> + exp(i*phi) sin(theta/2)|1>.

    theta is clamped to [0, pi], phi is reduced mod 2*pi, and phi is
    canonicalized to 0 at the poles where it is physically meaningless.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        th = float(self.theta)
        ph = float(self.phi)
        if not (math.isfinite(th) and math.isfinite(ph)):
            raise DomainError("qubit angles must be finite")
        if th < -1e-12 or th > math.pi + 1e-12:
            raise DomainError(f"theta must lie in [0, pi], got {th}")
        th = min(max(th, 0.0), math.pi)
        ph = ph % _TWO_PI
        if th == 0.0 or th == math.pi:
            ph = 0.0
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        """(a, b) with the state a|0> + b|1>; exact at the poles."""
        if self.theta == math.pi:
            return 0.0 + 0.0j, 1.0 + 0.0j
        a = math.cos(self.theta / 2.0)
        b = cmath.exp(1j * self.phi) * math.sin(self.theta / 2.0)
        return complex(a), b

    def bloch_vector(self) -> np.ndarray:
        s = math.sin(self.theta)
        return np.array([s * math.cos(self.phi), s * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class SymmetricState:
    """Permutation-symmetric n-qubit pure state as n+1 Dicke coefficients.

    The constructor normalizes and applies the global-phase convention
    (first non-negligible coefficient real positive); the stored array is
    frozen so instances are safe to share.
    """

    n: int
    d: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise DomainError("a symmetric state needs at least one qubit")
        d = np.array(self.d, dtype=np.complex128).reshape(-1)
        if d.shape[0] != n + 1:
            raise DomainError(f"expected {n + 1} Dicke coefficients, got {d.shape[0]}")
        if not np.all(np.isfinite(d.real)) or not np.all(np.isfinite(d.imag)):
            raise DomainError("non-finite Dicke coefficient")
        norm = float(np.linalg.norm(d))
        if norm < 1e-150:
            raise DomainError("zero state has no Dicke representation")
        d = d / norm
        mags = np.abs(d)
        k = int(np.argmax(mags >= _PHASE_TOL * mags.max()))
        d = d * cmath.exp(-1j * cmath.phase(d[k]))
        d[k] = abs(d[k])
        d.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class FullState:
    """Dense n-qubit amplitude vector, qubit 0 = most significant index bit."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise DomainError("a full state needs at least one qubit")
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 2**n:
            raise DomainError(f"expected {2**n} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise DomainError("non-finite amplitude")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-150:
            raise DomainError("zero state")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "amps", amps)


class SymmetryReport(NamedTuple):
    symmetric: bool
    deficit: float


def overlap(a: SymmetricState, b: SymmetricState) -> complex:
    """<a|b> in the Dicke basis."""
    if a.n != b.n:
        raise DomainError("overlap requires equal qubit counts")
    return complex(np.vdot(a.d, b.d))


def fidelity(a: SymmetricState, b: SymmetricState) -> float:
    """|<a|b>|, the absolute overlap."""
    return abs(overlap(a, b))


def dicke_state(n: int, k: int) -> SymmetricState:
    """The Dicke state with k excitations among n qubits."""
    n = int(n)
    k = int(k)
    if n < 1:
        raise DomainError("n must be positive")
    if not 0 <= k <= n:
        raise DomainError(f"excitation number k={k} outside 0..{n}")
    d = np.zeros(n + 1, dtype=np.complex128)
    d[k] = 1.0
    return SymmetricState(n, d)


def coherent_state(n: int, center: QubitState) -> SymmetricState:
    """Spin-coherent state: the symmetric product of n copies of ``center``."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be positive")
    a, b = center.amplitudes
    d = _sqrt_binom(n) * np.array([a ** (n - k) * b**k for k in range(n + 1)])
    return SymmetricState(n, d)


def _pair_product_coeffs(pairs: Sequence[tuple[complex, complex]]) -> np.ndarray:
    """Coefficients e_k of prod_j (a_j + b_j t) = sum_k e_k t^k.

    This homogeneous form of the elementary symmetric polynomials stays
    finite for stars at either pole.
    """
    c = np.array([1.0 + 0.0j])
    for a, b in pairs:
        c = a * np.concatenate([c, [0.0]]) + b * np.concatenate([[0.0], c])
    return c


def _state_from_pairs(pairs: Sequence[tuple[complex, complex]]) -> SymmetricState:
    n = len(pairs)
    e = _pair_product_coeffs(pairs)
    return SymmetricState(n, e / _sqrt_binom(n))


def symmetrize(parts: Sequence[QubitState]) -> SymmetricState:
    """Normalized symmetrization of a product of single-qubit states.

    The Dicke coefficients are d_k proportional to e_k / sqrt(C(n, k))
    where the e_k are the homogeneous elementary symmetric polynomials of
    the qubit amplitude pairs, which is the coefficient pattern the
    permutation sum produces.
    """
    if len(parts) == 0:
        raise DomainError("symmetrize needs at least one qubit state")
    try:
        return _state_from_pairs([q.amplitudes for q in parts])
    except DomainError as exc:  # zero norm cannot occur for qubit products
        raise DomainError(f"symmetrization produced a zero vector: {exc}") from exc


def _ryser_permanent(a: np.ndarray) -> complex:
    """Permanent by Ryser's inclusion-exclusion with Gray-code updates."""
    n = a.shape[0]
    total = 0.0 + 0.0j
    colsum = np.zeros(n, dtype=np.complex128)
    prev_gray = 0
    for subset in range(1, 2**n):
        gray = subset ^ (subset >> 1)
        changed = gray ^ prev_gray
        j = changed.bit_length() - 1
        if gray & changed:
            colsum += a[:, j]
        else:
            colsum -= a[:, j]
        prev_gray = gray
        term = np.prod(colsum)
        total += term if gray.bit_count() % 2 == 0 else -term
    return complex(total if n % 2 == 0 else -total)


def symmetrization_constant(parts: Sequence[QubitState]) -> float:
    """Squared norm K of the raw permutation sum, via n! * perm(Gram)."""
    n = len(parts)
    if n == 0:
        raise DomainError("need at least one qubit state")
    if n > 20:
        raise ResourceError(f"permanent limited to 20 states, got {n}")
    amps = np.array([q.amplitudes for q in parts])
    gram = amps.conj() @ amps.T
    k = math.factorial(n) * _ryser_permanent(gram)
    if abs(k.imag) > 1e-8 * max(abs(k.real), 1.0) or k.real <= 0.0:
        raise DomainError(f"symmetrization constant came out non-positive: {k}")
    return float(k.real)


def husimi(state: SymmetricState, point: QubitState) -> float:
    """Squared overlap with the coherent state at ``point``; lies in [0, 1]."""
    coh = coherent_state(state.n, point)
    value = abs(np.vdot(state.d, coh.d)) ** 2
    return float(min(value, 1.0))


def _weight_index_sets(n: int) -> list[np.ndarray]:
    """Amplitude indices grouped by Hamming weight, increasing within each group."""
    groups: list[list[int]] = [[] for _ in range(n + 1)]
    for i in range(2**n):
        groups[i.bit_count()].append(i)
    return [np.array(g, dtype=np.intp) for g in groups]


def embed_full(state: SymmetricState) -> FullState:
    """Spread each Dicke coefficient uniformly over its weight class."""
    n = state.n
    amps = np.zeros(2**n, dtype=np.complex128)
    sq = _sqrt_binom(n)
    for k, idx in enumerate(_weight_index_sets(n)):
        amps[idx] = state.d[k] / sq[k]
    return FullState(n, amps)


def project_sym(full: FullState, tol: float = 1e-8) -> SymmetricState:
    """Project onto the symmetric subspace; reject states too far outside it."""
    n = full.n
    sq = _sqrt_binom(n)
    d = np.array(
        [full.amps[idx].sum() / sq[k] for k, idx in enumerate(_weight_index_sets(n))]
    )
    deficit = max(0.0, 1.0 - float(np.linalg.norm(d)) ** 2)
    if deficit > tol:
        raise SymmetryViolationError(
            f"project_sym: state lies outside the symmetric subspace "
            f"(overlap deficit {deficit:.3e} > {tol:.1e})",
            deficit,
        )
    return SymmetricState(n, d)


def _transposition_index_maps(n: int) -> Iterable[np.ndarray]:
    """Index permutations of the amplitude array for every qubit transposition."""
    idx = np.arange(2**n)
    for i in range(n):
        for j in range(i + 1, n):
            bi = (idx >> (n - 1 - i)) & 1
            bj = (idx >> (n - 1 - j)) & 1
            differ = bi ^ bj
            mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
            yield idx ^ (differ * mask)


def is_permutation_symmetric(full: FullState, tol: float = 1e-10) -> SymmetryReport:
    """Check invariance of the amplitudes under all qubit transpositions."""
    deficit = 0.0
    for perm in _transposition_index_maps(full.n):
        deficit = max(deficit, float(np.abs(full.amps[perm] - full.amps).max()))
    return SymmetryReport(deficit <= tol, deficit)


def jm_to_nk(j: float, m: float) -> tuple[int, int]:
    """Map an angular-momentum label |j, m> to the Dicke label (n, k)."""
    n = 2.0 * j
    if abs(n - round(n)) > 1e-9 or n < 1:
        raise DomainError(f"j must be a positive half-integer, got {j}")
    n = int(round(n))
    k = n / 2.0 - m
    if abs(k - round(k)) > 1e-9 or not 0 <= round(k) <= n:
        raise DomainError(f"m={m} invalid for j={j}")
    return n, int(round(k))


def nk_to_jm(n: int, k: int) -> tuple[float, float]:
    """Map the Dicke label (n, k) to the angular-momentum label (j, m)."""
    if not 0 <= k <= n or n < 1:
        raise DomainError(f"invalid Dicke label ({n}, {k})")
    return n / 2.0, n / 2.0 - k


def state_to_json(state: SymmetricState) -> str:
    """Serialize as {"n": ..., "dicke": [[re, im], ...]} with 17 significant digits."""
    pairs = ", ".join(
        f"[{_format_float(z.real)}, {_format_float(z.imag)}]" for z in state.d
    )
    return f'{{"n": {state.n}, "dicke": [{pairs}]}}'


def state_from_json(text: str) -> SymmetricState:
    import json

    doc = json.loads(text)
    try:
        n = int(doc["n"])
        d = np.array([complex(re, im) for re, im in doc["dicke"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed state JSON: {exc}") from exc
    return SymmetricState(n, d)
