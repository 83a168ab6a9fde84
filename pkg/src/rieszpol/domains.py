"""The four supported compact sets and their geometry.

Points are stored in ambient coordinates as rows of a float array:
the circle lives in R^2, S^d in R^{d+1}, the ball B^d in R^d and the
segment [0, 1] in R^1.  All distances are Euclidean.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional

import numpy as np
from scipy import integrate, spatial
from scipy.stats import qmc

from . import constants
from .constants import RieszDomainError

MEMBERSHIP_TOL = 1e-12
KINDS = ("circle", "sphere", "ball", "segment")


@dataclass(frozen=True)
class Domain:
    kind: str
    d: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if self.kind in ("circle", "segment") and self.d != 1:
            raise ValueError(f"{self.kind} has intrinsic dimension 1, got d={self.d}")

    @classmethod
    def circle(cls) -> "Domain":
        return cls("circle", 1)

    @classmethod
    def sphere(cls, d: int) -> "Domain":
        return cls("sphere", d)

    @classmethod
    def ball(cls, d: int) -> "Domain":
        return cls("ball", d)

    @classmethod
    def segment(cls) -> "Domain":
        return cls("segment", 1)

    @classmethod
    def from_spec(cls, kind: str, d: Optional[int] = None) -> "Domain":
        if kind in ("circle", "segment"):
            return cls(kind, 1)
        if d is None:
            raise ValueError(f"domain {kind!r} needs a dimension")
        return cls(kind, int(d))

    @property
    def spherical(self) -> bool:
        return self.kind in ("circle", "sphere")

    @property
    def ambient_dim(self) -> int:
        if self.spherical:
            return self.d + 1
        if self.kind == "ball":
            return self.d
        return 1

    @property
    def hausdorff_measure(self) -> float:
        if self.spherical:
            return constants.sphere_area(self.d)
        if self.kind == "ball":
            return constants.ball_volume(self.d)
        return 1.0

    @property
    def diameter(self) -> float:
        return 1.0 if self.kind == "segment" else 2.0

    def contains(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.ambient_dim:
            return np.zeros(len(x), dtype=bool)
        if self.spherical:
            return np.abs(np.linalg.norm(x, axis=1) - 1.0) <= tol
        if self.kind == "ball":
            return np.linalg.norm(x, axis=1) <= 1.0 + tol
        return (x[:, 0] >= -tol) & (x[:, 0] <= 1.0 + tol)

    def project(self, points: np.ndarray) -> np.ndarray:
        """Nearest-point map onto the set (normalize, radial clamp or clip)."""
        x = np.array(points, dtype=float, ndmin=2)
        if self.spherical:
            norms = np.linalg.norm(x, axis=1, keepdims=True)
            bad = norms[:, 0] == 0.0
            if np.any(bad):
                x[bad] = 0.0
                x[bad, 0] = 1.0
                norms[bad] = 1.0
            return x / norms
        if self.kind == "ball":
            norms = np.linalg.norm(x, axis=1, keepdims=True)
            return np.where(norms > 1.0, x / np.maximum(norms, 1e-300), x)
        return np.clip(x, 0.0, 1.0)

    def tangent_basis(self, x: np.ndarray) -> np.ndarray:
        """Orthonormal bases of the tangent spaces at points x, shape (k, m, d)."""
        x = np.atleast_2d(x)
        k, m = x.shape
        if not self.spherical:
            return np.broadcast_to(np.eye(m), (k, m, m)).copy()
        # complete each x to an orthonormal frame; drop the normal column
        frames = np.empty((k, m, m))
        eye = np.eye(m)
        for i in range(k):
            j = int(np.argmin(np.abs(x[i])))
            a = np.column_stack([x[i], eye[:, [c for c in range(m) if c != j]]])
            q, _ = np.linalg.qr(a)
            frames[i] = q
        return frames[:, :, 1:]

    def to_json(self) -> dict:
        return {"kind": self.kind, "d": self.d}

    def __str__(self) -> str:
        if self.kind in ("circle", "segment"):
            return self.kind
        return f"{self.kind}({self.d})"


class MembershipError(ValueError):
    pass


@dataclass
class Configuration:
    """An ordered list of (not necessarily distinct) points in a domain."""

    domain: Domain
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2)
        if pts.shape[0] < 1:
            raise ValueError("a configuration needs at least one point")
        if pts.shape[1] != self.domain.ambient_dim:
            raise MembershipError(
                f"points have dimension {pts.shape[1]}, {self.domain} needs {self.domain.ambient_dim}"
            )
        ok = self.domain.contains(pts)
        if not np.all(ok):
            bad = int(np.flatnonzero(~ok)[0])
            raise MembershipError(f"point {bad} = {pts[bad].tolist()} is not in {self.domain}")
        self.points = pts

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_angles(cls, angles: Iterable[float]) -> "Configuration":
        t = np.asarray(list(angles), dtype=float)
        return cls(Domain.circle(), np.column_stack([np.cos(t), np.sin(t)]))

    def angles(self) -> np.ndarray:
        if self.domain.kind != "circle":
            raise ValueError("angles are only defined on the circle")
        return np.mod(np.arctan2(self.points[:, 1], self.points[:, 0]), 2.0 * np.pi)

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(), "points": self.points.tolist()}

    @classmethod
    def from_json(cls, obj: Any) -> "Configuration":
        if isinstance(obj, str):
            obj = json.loads(obj)
        dom = obj["domain"]
        domain = Domain.from_spec(dom["kind"], dom.get("d"))
        return cls(domain, np.asarray(obj["points"], dtype=float).reshape(-1, domain.ambient_dim))


def roots_of_unity(n: int, offset: float = 0.0) -> Configuration:
    return Configuration.from_angles(offset + 2.0 * np.pi * np.arange(n) / n)


# ---------------------------------------------------------------------------
# sampling and meshes


def sample_uniform(domain: Domain, n: int, seed: int) -> Configuration:
    """n independent draws from the normalized Hausdorff measure."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return Configuration(domain, _sample_points(domain, n, rng))


def _sample_points(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    if domain.kind == "circle":
        t = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack([np.cos(t), np.sin(t)])
    if domain.kind == "segment":
        return rng.uniform(0.0, 1.0, (n, 1))
    g = rng.standard_normal((n, domain.ambient_dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    if domain.kind == "sphere":
        return g
    r = rng.uniform(0.0, 1.0, (n, 1)) ** (1.0 / domain.d)
    return g * r


def fibonacci_sphere(n: int) -> np.ndarray:
    """Fibonacci spiral on S^2 with n points."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (3.0 - math.sqrt(5.0)) * k
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def sphere_mesh(d: int, size: int) -> np.ndarray:
    """Near-uniform deterministic points on S^d (d >= 1)."""
    if d == 1:
        t = 2.0 * np.pi * np.arange(size) / size
        return np.column_stack([np.cos(t), np.sin(t)])
    if d == 2:
        return fibonacci_sphere(size)
    from scipy.special import ndtri

    u = qmc.Halton(d + 1, scramble=False).random(size + 1)[1:]
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _ball_mesh(d: int, resolution: int) -> np.ndarray:
    if d == 1:
        return np.linspace(-1.0, 1.0, resolution).reshape(-1, 1)
    shells = max(2, int(round(resolution ** (1.0 / d))))
    per_shell = max(2, resolution // (shells + 1))
    parts = [np.zeros((1, d))]
    # equal-volume shells plus the boundary sphere
    radii = [((k + 0.5) / shells) ** (1.0 / d) for k in range(shells)] + [1.0]
    for r in radii:
        parts.append(r * sphere_mesh(d - 1, per_shell))
    return np.vstack(parts)


def grid(domain: Domain, resolution: int, with_fill: bool = False):
    """Deterministic search mesh.

    Returns the points, or ``(points, fill_distance)`` when ``with_fill``.
    For the circle and segment the fill distance is exact; otherwise it is
    measured against a finer reference mesh.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    if domain.kind == "circle":
        pts = sphere_mesh(1, resolution)
        fill = 2.0 * math.sin(math.pi / (2.0 * resolution))
    elif domain.kind == "segment":
        pts = np.linspace(0.0, 1.0, resolution).reshape(-1, 1)
        fill = 0.5 / (resolution - 1)
    elif domain.kind == "sphere":
        pts = sphere_mesh(domain.d, resolution)
        fill = None
    else:
        pts = _ball_mesh(domain.d, resolution)
        fill = None
    if not with_fill:
        return pts
    if fill is None:
        fill = fill_distance(domain, pts)
    return pts, fill


def fill_distance(domain: Domain, pts: np.ndarray, reference: Optional[np.ndarray] = None) -> float:
    """max over a reference mesh of the distance to the nearest point of pts."""
    if reference is None:
        size = max(20 * len(pts), 20000)
        if domain.kind == "ball":
            reference = _ball_mesh(domain.d, size)
        else:
            reference = grid(domain, size)
    dist, _ = spatial.cKDTree(pts).query(reference)
    return float(np.max(dist))


# ---------------------------------------------------------------------------
# hierarchical cells (for certified minimization and nets)


class Cells:
    """A set of cells covering (part of) a domain.

    Every cell carries a representative point ``centers[i]`` and a radius
    ``radius[i]`` such that each domain point of the cell lies within that
    Euclidean distance of the centre.  Spheres are tiled by the gnomonic
    image of the cube faces, balls by axis-aligned cubes, the segment by
    intervals.  ``inside`` is False for ball cubes whose centre lies outside
    the ball; their centres are then not domain points.
    """

    def __init__(self, kind: str, dim: int, face: np.ndarray, u: np.ndarray, half: np.ndarray):
        self.kind = kind  # "sphere", "cube" or "interval"
        self.dim = dim  # intrinsic dimension of the tiled set
        self.face = face
        self.u = u
        self.half = half
        self._geometry()

    @classmethod
    def sphere(cls, d: int) -> "Cells":
        """Cells of S^d in R^{d+1}, one per cube face to start with."""
        m = d + 1
        face = np.arange(2 * m)
        return cls("sphere", d, face, np.zeros((2 * m, d)), np.ones(2 * m))

    @classmethod
    def cube(cls, d: int) -> "Cells":
        return cls("cube", d, np.zeros(1, dtype=int), np.zeros((1, d)), np.ones(1))

    @classmethod
    def interval(cls, lo: float = 0.0, hi: float = 1.0) -> "Cells":
        c = 0.5 * (lo + hi)
        return cls("interval", 1, np.zeros(1, dtype=int), np.array([[c]]), np.array([0.5 * (hi - lo)]))

    @staticmethod
    def _embed(face: np.ndarray, u: np.ndarray) -> np.ndarray:
        k, d = u.shape
        m = d + 1
        axis = (face // 2)[:, None]
        sign = np.where(face % 2 == 0, 1.0, -1.0)[:, None]
        cols = np.arange(m)[None, :]
        if d:
            src = np.clip(cols - (cols > axis), 0, d - 1)
            out = np.take_along_axis(u, np.broadcast_to(src, (k, m)), axis=1)
        else:
            out = np.zeros((k, m))
        out = np.where(cols == axis, sign, out)
        return out / np.linalg.norm(out, axis=1, keepdims=True)

    def _geometry(self) -> None:
        k = len(self.half)
        d = self.dim
        if self.kind == "sphere":
            self.centers = self._embed(self.face, self.u)
            if d == 0 or k == 0:
                self.radius = np.zeros(k)
            else:
                # chord to each corner from face coordinates: |a - b|^2 = 2 - 2 a.b
                n0 = 1.0 + np.einsum("kd,kd->k", self.u, self.u)
                worst = np.full(k, np.inf)
                for signs in itertools.product((-1.0, 1.0), repeat=d):
                    v = self.u + np.asarray(signs) * self.half[:, None]
                    cos = (np.einsum("kd,kd->k", self.u, v) + 1.0) / np.sqrt(
                        n0 * (1.0 + np.einsum("kd,kd->k", v, v))
                    )
                    worst = np.minimum(worst, cos)
                self.radius = np.sqrt(np.maximum(2.0 - 2.0 * worst, 0.0))
            self.inside = np.ones(k, dtype=bool)
        elif self.kind == "cube":
            self.centers = self.u.copy()
            self.radius = self.half * math.sqrt(d)
            norms = np.linalg.norm(self.u, axis=1)
            self.inside = norms <= 1.0
        else:
            self.centers = self.u.copy()
            self.radius = self.half.copy()
            self.inside = np.ones(k, dtype=bool)

    def __len__(self) -> int:
        return len(self.half)

    def select(self, mask: np.ndarray) -> "Cells":
        out = Cells.__new__(Cells)
        out.kind, out.dim = self.kind, self.dim
        for name in ("face", "u", "half", "centers", "radius", "inside"):
            setattr(out, name, getattr(self, name)[mask])
        return out

    def subdivide(self) -> "Cells":
        d = self.dim
        if d == 0 or len(self) == 0:
            return self
        offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=d)))
        q = len(offsets)
        h = np.repeat(self.half, q) * 0.5
        u = (self.u[:, None, :] + offsets[None, :, :] * self.half[:, None, None]).reshape(-1, d)
        return Cells(self.kind, d, np.repeat(self.face, q), u, h)

    def refine_to(self, count: int) -> "Cells":
        cells = self
        while len(cells) < count and cells.dim > 0:
            cells = cells.subdivide()
        return cells

    def keep_intersecting_ball(self) -> "Cells":
        if self.kind != "cube":
            return self
        near = np.linalg.norm(self.u, axis=1) - self.radius <= 1.0
        return self.select(near)


def domain_cells(domain: Domain) -> Cells:
    if domain.spherical:
        return Cells.sphere(domain.d)
    if domain.kind == "ball":
        return Cells.cube(domain.d)
    return Cells.interval(0.0, 1.0)


# ---------------------------------------------------------------------------
# nets


def _dist_to_set(x: np.ndarray, net: np.ndarray) -> np.ndarray:
    return spatial.cKDTree(net).query(x)[0]


def maximal_delta_net(
    domain: Domain, delta: float, seed: int = 0, min_radius: float = 1e-7
) -> Configuration:
    """Greedy farthest-point delta-net.

    Points are added one at a time, always the domain point farthest from
    the current net, as long as that distance exceeds ``delta``.  So the
    pairwise distances exceed ``delta``, and when the loop stops every domain
    point is within ``delta`` of the net.  The farthest point is located on
    a hierarchy of cells; a cell is discarded once its centre distance plus
    its radius is at most ``delta`` (distance to a set is 1-Lipschitz), so
    covering holds on the whole domain up to ``min_radius``.
    """
    if not 0.0 < delta < domain.diameter:
        raise ValueError(f"delta must lie in (0, {domain.diameter}), got {delta}")
    rng = np.random.default_rng(seed)
    net = [_sample_points(domain, 1, rng)[0]]
    cells = domain_cells(domain)
    if domain.kind == "ball":
        cells = cells.refine_to(64).keep_intersecting_ball()
    else:
        cells = cells.refine_to(64)
    while True:
        reps = domain.project(cells.centers)
        dist = _dist_to_set(reps, np.asarray(net))
        far = int(np.argmax(dist))
        if dist[far] > delta:
            # farthest-point step, ties broken by lowest index
            net.append(reps[far])
            continue
        centre_dist = _dist_to_set(cells.centers, np.asarray(net))
        open_cells = centre_dist + cells.radius > delta
        if not np.any(open_cells):
            break
        cells = cells.select(open_cells)
        if np.max(cells.radius) < min_radius:
            break
        cells = cells.subdivide()
        if cells.kind == "cube":
            cells = cells.keep_intersecting_ball()
    return Configuration(domain, np.asarray(net))


def covering_radius(config: Configuration, mesh: np.ndarray) -> float:
    return float(np.max(_dist_to_set(mesh, config.points)))


def separation(config: Configuration) -> float:
    if config.n < 2:
        return math.inf
    tree = spatial.cKDTree(config.points)
    dist, _ = tree.query(config.points, k=2)
    return float(np.min(dist[:, 1]))


# ---------------------------------------------------------------------------
# measure-theoretic quantities on S^d


def _sphere_density_const(d: int) -> float:
    # sigma_d-density of t = <x, y> is c (1 - t^2)^{d/2 - 1} with c = d tau_d
    return d * constants.tau(d)


def cap_measure(d: int, r: float) -> float:
    """Normalized surface measure of the spherical cap {y in S^d : |x - y| < r}."""
    if not 0.0 < r <= 2.0:
        raise RieszDomainError(f"cap radius must lie in (0, 2], got {r}")
    a = 1.0 - r * r / 2.0
    c = _sphere_density_const(d)
    alpha = d / 2.0 - 1.0
    if a >= 0.0:
        # the algebraic weight carries the endpoint singularity at t = 1 when d = 1
        val, _ = integrate.quad(
            lambda t: (1.0 + t) ** alpha, a, 1.0, weight="alg", wvar=(0.0, alpha),
            epsabs=0.0, epsrel=1e-12, limit=200,
        )
        return min(1.0, c * val)
    if a <= -1.0:
        return 1.0
    # large caps via the complement, with the weight at t = -1
    val, _ = integrate.quad(
        lambda t: (1.0 - t) ** alpha, -1.0, a, weight="alg", wvar=(alpha, 0.0),
        epsabs=0.0, epsrel=1e-12, limit=200,
    )
    return max(0.0, 1.0 - c * val)


def annulus_potential_integral(d: int, p: float, r: float) -> float:
    """Integral of |x - y|^{-p} d sigma_d(y) over S^d outside the ball B(x, r)."""
    if not 0.0 < r < 2.0:
        raise RieszDomainError(f"annulus radius must lie in (0, 2), got {r}")
    if not p > 0:
        raise RieszDomainError(f"p must be positive, got {p}")
    b = 1.0 - r * r / 2.0
    c = _sphere_density_const(d)
    beta = d / 2.0 - 1.0
    expo = -p / 2.0 + d / 2.0 - 1.0
    # u = 1 - t runs over [r^2/2, 2]; log scale on [r^2/2, 1] tames small r
    lo = 1.0 - b
    val, _ = integrate.quad(
        lambda u: u**expo, max(lo, 1.0), 2.0, weight="alg", wvar=(0.0, beta),
        epsabs=0.0, epsrel=1e-12, limit=200,
    )
    if lo < 1.0:
        head, _ = integrate.quad(
            lambda s: math.exp(s * (expo + 1.0)) * (2.0 - math.exp(s)) ** beta, math.log(lo), 0.0,
            epsabs=0.0, epsrel=1e-12, limit=200,
        )
        val += head
    return c * 2.0 ** (-p / 2.0) * val
