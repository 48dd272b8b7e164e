"""The two-way Majorana map between symmetric states and star constellations.

A symmetric n-qubit state with Dicke coefficients d_k is encoded by the
polynomial

    A(w) = sum_k (-1)^k sqrt(C(n, k)) d_k w^(n-k),

whose roots, pulled back to the sphere through the stereographic chart
theta = 2*atan|w|, phi = arg w, are the n stars.  Vanishing leading
coefficients are roots at infinity, i.e. stars at the south pole; the
convention is fixed so that the constellation of a product state
|q>^(x n) is n copies of q's own Bloch vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .states import QubitState, SymmetricState, _format_float, _sqrt_binom, _state_from_pairs

__all__ = [
    "Star",
    "Constellation",
    "MajoranaPolynomial",
    "majorana_polynomial",
    "plane_to_sphere",
    "sphere_to_plane",
    "state_to_stars",
    "stars_to_state",
    "geodesic_distance",
    "constellation_to_json",
    "constellation_from_json",
    "constellation_to_csv",
]

# Coefficients below this relative size count as exact zeros, i.e. roots
# pinned to a pole.  The induced state perturbation is ~1e-13, far inside
# every round-trip tolerance.
_STRIP_TOL = 1e-13


@dataclass(frozen=True)
class Star:
    """A point on the unit sphere; (theta, phi) are derived views."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        v = np.array([self.x, self.y, self.z], dtype=float)
        if not np.all(np.isfinite(v)):
            raise DomainError("star coordinates must be finite")
        r = float(np.linalg.norm(v))
        if abs(r - 1.0) > 1e-6:
            raise DomainError(f"star must sit on the unit sphere, |v| = {r}")
        v /= r
        object.__setattr__(self, "x", float(v[0]))
        object.__setattr__(self, "y", float(v[1]))
        object.__setattr__(self, "z", float(v[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Star":
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    @property
    def theta(self) -> float:
        return math.acos(min(1.0, max(-1.0, self.z)))

    @property
    def phi(self) -> float:
        if self.x == 0.0 and self.y == 0.0:
            return 0.0
        return math.atan2(self.y, self.x) % (2.0 * math.pi)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_qubit(self) -> QubitState:
        return QubitState(self.theta, self.phi)

    def antipode(self) -> "Star":
        return Star(-self.x, -self.y, -self.z)


@dataclass(frozen=True)
class Constellation:
    """Multiset of n stars; the stored order carries no meaning."""

    n: int
    stars: tuple[Star, ...]

    def __post_init__(self):
        n = int(self.n)
        stars = tuple(self.stars)
        if n < 1:
            raise DomainError("a constellation needs at least one star")
        if len(stars) != n:
            raise DomainError(f"expected {n} stars, got {len(stars)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "stars", stars)

    def as_array(self) -> np.ndarray:
        return np.array([s.as_array() for s in self.stars])


def geodesic_distance(a: Star, b: Star) -> float:
    """Great-circle distance between two stars, in radians."""
    u, v = a.as_array(), b.as_array()
    return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(u @ v)))


@dataclass(frozen=True)
class MajoranaPolynomial:
    """The star-encoding polynomial of a state.

    ``coefficients[k] = sqrt(C(n, k)) * d_k`` for k = 0..n; the encoded
    polynomial is A(w) = sum_k (-1)^k coefficients[k] w^(n-k), of effective
    degree ``degree``.  The ``infinite_roots = n - degree`` missing roots
    are the stars pinned at the south pole.
    """

    n: int
    coefficients: np.ndarray
    degree: int

    @property
    def infinite_roots(self) -> int:
        return self.n - self.degree


def majorana_polynomial(state: SymmetricState) -> MajoranaPolynomial:
    """Coefficients and effective degree of the state's star polynomial."""
    n = state.n
    coeffs = _sqrt_binom(n) * state.d
    mags = np.abs(coeffs)
    first = int(np.argmax(mags >= _STRIP_TOL * mags.max()))
    coeffs.flags.writeable = False
    return MajoranaPolynomial(n, coeffs, n - first)


def plane_to_sphere(w: complex) -> Star:
    """Inverse stereographic chart: w=0 is the north pole, |w|=1 the equator."""
    w = complex(w)
    theta = 2.0 * math.atan(abs(w))
    # atan2 instead of cmath.phase: the latter overflows on subnormals
    phi = math.atan2(w.imag, w.real)
    return Star.from_angles(theta, phi)


def sphere_to_plane(s: Star) -> complex | None:
    """Stereographic chart; the exact south pole maps to None (infinity).

    The two equivalent formulas are picked per hemisphere so neither pole
    suffers catastrophic cancellation or float overflow.
    """
    if s.z <= 0.0:
        denom = complex(s.x, -s.y)
        if denom == 0.0:
            return None
        return (1.0 - s.z) / denom
    return complex(s.x, s.y) / (1.0 + s.z)


def _aberth_refine(p: np.ndarray, roots: np.ndarray, max_iter: int = 30) -> np.ndarray:
    """Simultaneous Newton (Aberth-Ehrlich) polish of all roots of p.

    Stops when every residual is at the round-off floor of polynomial
    evaluation; roots whose update would not be finite are left at their
    companion-matrix estimate.
    """
    deg = len(p) - 1
    dp = p[:-1] * np.arange(deg, 0, -1)
    eps = np.finfo(float).eps
    roots = roots.astype(np.complex128, copy=True)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            val = np.polyval(p, roots)
            bound = np.polyval(np.abs(p), np.abs(roots))
            done = np.abs(val) <= 64.0 * eps * bound + 1e-300
            if done.all():
                break
            dval = np.polyval(dp, roots)
            newton = np.where(dval != 0.0, val / np.where(dval != 0.0, dval, 1.0), 0.0)
            diff = roots[:, None] - roots[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = (1.0 / diff).sum(axis=1)
            denom = 1.0 - newton * repulsion
            step = np.where(np.abs(denom) > 1e-30, newton / np.where(denom != 0.0, denom, 1.0), newton)
            ok = ~done & np.isfinite(step)
            if not ok.any():
                break
            roots = np.where(ok, roots - step, roots)
    return roots


def _polynomial_roots(c: np.ndarray) -> np.ndarray:
    """All roots of a polynomial (coefficients highest-degree first).

    Both end coefficients must be non-negligible.  Companion-matrix
    eigenvalues seed an Aberth-Ehrlich refinement; when the constant term
    dominates the leading one the work is done on the reversed polynomial
    so large roots are handled as small roots of the reverse.
    """
    if len(c) == 2:
        return np.array([-c[1] / c[0]])
    reverse = abs(c[-1]) > abs(c[0])
    work = c[::-1].copy() if reverse else c.copy()
    work /= np.abs(work).max()
    roots = np.roots(work)
    roots = _aberth_refine(work, roots)
    if reverse:
        roots = np.where(np.abs(roots) < 1e-300, 1e-300, roots)
        roots = 1.0 / roots
    return roots


def _refine_multiple_root(coeffs: np.ndarray, w0: complex | None, m: int) -> Star:
    """Newton-polish an m-fold root: it is a simple root of the (m-1)-th
    derivative, so the cluster centroid converges to machine precision.

    ``coeffs`` is the full polynomial, highest degree first; roots beyond
    the unit circle (or at infinity, w0 None) are handled on the reversed
    polynomial so the pole chart stays regular.
    """
    if w0 is None:
        work, x, inverted = coeffs[::-1], 0.0 + 0.0j, True
    elif abs(w0) > 1.0:
        work, x, inverted = coeffs[::-1], 1.0 / w0, True
    else:
        work, x, inverted = coeffs, complex(w0), False
    q = work
    for _ in range(m - 1):
        q = np.polyder(q)
    dq = np.polyder(q)
    for _ in range(60):
        dqv = np.polyval(dq, x)
        if dqv == 0.0:
            break
        step = np.polyval(q, x) / dqv
        x -= step
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    if inverted:
        if abs(x) < 1e-300:
            return Star(0.0, 0.0, -1.0)
        x = 1.0 / x
    return plane_to_sphere(x)


def _collapse_degenerate_clusters(
    state: SymmetricState, stars: list[Star], coeffs: np.ndarray
) -> list[Star]:
    """Pin clusters of stars that represent one multiple root.

    An m-fold root scatters companion-matrix eigenvalues on a ring of
    radius ~eps**(1/m); whenever m stars sit within that resolution limit
    of each other they are replaced by m copies of the derivative-refined
    root.  Every replacement is verified by reconstruction fidelity
    against the input state and reverted if it measurably changes it.
    """
    n = len(stars)
    if n < 2:
        return stars
    eps = float(np.finfo(float).eps)
    arr = np.array([s.as_array() for s in stars])
    dist = np.arccos(np.clip(arr @ arr.T, -1.0, 1.0))
    np.fill_diagonal(dist, np.inf)
    frozen = np.zeros(n, dtype=bool)  # members of an accepted collapse
    tried: set[frozenset] = set()
    stages = [n] + list(range(min(n - 1, 12), 1, -1))
    for m in stages:
        tau = 12.0 * eps ** (1.0 / m)
        if float(dist.min()) > tau:
            continue
        # a qualifying cluster has diameter <= tau, i.e. it is a clique in
        # the tau-graph, so some member sees all the others as neighbors
        within = dist <= tau
        counts = within.sum(axis=1)
        need = max(m, 2) - 1
        if counts.max() < need:
            continue
        for i in np.nonzero(counts >= need)[0]:
            comp = np.sort(np.append(np.nonzero(within[i])[0], i))
            signature = frozenset(int(j) for j in comp)
            if signature in tried or frozen[comp].any():
                continue
            tried.add(signature)
            sub = dist[np.ix_(comp, comp)]
            diameter = float(sub[np.isfinite(sub)].max())
            if diameter == 0.0 or diameter > tau:
                continue  # coincident already, or not a tight ring
            centroid = arr[comp].mean(axis=0)
            norm = float(np.linalg.norm(centroid))
            if norm < 1e-6:
                continue
            w0 = sphere_to_plane(Star(*(centroid / norm)))
            target = _refine_multiple_root(coeffs, w0, len(comp))
            trial = list(stars)
            for j in comp:
                trial[j] = target
            candidate = _state_from_pairs([q.amplitudes for q in (s.as_qubit() for s in trial)])
            if abs(np.vdot(candidate.d, state.d)) >= 1.0 - 1e-12:
                stars = trial
                frozen[comp] = True
                arr[comp] = target.as_array()
                dist = np.arccos(np.clip(arr @ arr.T, -1.0, 1.0))
                np.fill_diagonal(dist, np.inf)
    return stars


def state_to_stars(state: SymmetricState) -> Constellation:
    """Majorana constellation of a symmetric state.

    Returns exactly n stars including pole multiplicities, sorted by
    (theta, phi) so equal states give identical output.
    """
    n = state.n
    signs = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
    coeffs = signs * _sqrt_binom(n) * state.d  # index k multiplies w^(n-k)
    mags = np.abs(coeffs)
    scale = float(mags.max())
    if scale == 0.0:
        raise DomainError("zero state has no constellation")
    keep = mags >= _STRIP_TOL * scale
    nonzero = np.nonzero(keep)[0]
    first, last = int(nonzero[0]), int(nonzero[-1])
    south, north = first, n - last

    stars: list[Star] = [Star(0.0, 0.0, -1.0)] * south + [Star(0.0, 0.0, 1.0)] * north
    if last > first:
        for w in _polynomial_roots(coeffs[first : last + 1] / scale):
            stars.append(plane_to_sphere(w))
        stars = _collapse_degenerate_clusters(state, stars, coeffs / scale)
    stars.sort(key=lambda s: (s.theta, s.phi))
    return Constellation(n, tuple(stars))


def stars_to_state(c: Constellation) -> SymmetricState:
    """Vieta reconstruction: the unique state whose constellation is c."""
    pairs = [q.amplitudes for q in (s.as_qubit() for s in c.stars)]
    return _state_from_pairs(pairs)


def constellation_to_json(c: Constellation) -> str:
    entries = ", ".join(
        f'{{"theta": {_format_float(s.theta)}, "phi": {_format_float(s.phi)}}}' for s in c.stars
    )
    return f'{{"n": {c.n}, "stars": [{entries}]}}'


def constellation_from_json(text: str) -> Constellation:
    import json

    doc = json.loads(text)
    try:
        n = int(doc["n"])
        stars = tuple(Star.from_angles(float(e["theta"]), float(e["phi"])) for e in doc["stars"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed constellation JSON: {exc}") from exc
    return Constellation(n, stars)


def constellation_to_csv(c: Constellation) -> str:
    lines = ["star_index,theta,phi,x,y,z"]
    for i, s in enumerate(c.stars):
        lines.append(
            ",".join(
                [str(i)]
                + [_format_float(v) for v in (s.theta, s.phi, s.x, s.y, s.z)]
            )
        )
    return "\n".join(lines) + "\n"
