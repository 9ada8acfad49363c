"""Triangle meshes and their conversion to two-channel spherical functions.

Rays are cast from the bounding-sphere center along every grid direction.
Each direction records the distance to the farthest intersection (normalized
by the bounding radius, so values lie in [0, 1]) and the sine of the ray's
incidence angle at that face, measured from the tangent plane, i.e.
|cos(ray, normal)|.  Directions that miss the mesh store zeros in both
channels; the representation is faithful for star-shaped objects viewed from
the center and remains defined (if lossy) otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .grid import make_grid
from .sft import SphericalSignal

_EPS = 1e-12


@dataclass
class TriangleMesh:
    """Vertex/face soup; degenerate (zero-area) faces are dropped on build."""

    vertices: np.ndarray
    faces: np.ndarray
    dropped_faces: int = 0

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=np.float64)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (N, 3), got {v.shape}")
        if f.size == 0:
            f = f.reshape(0, 3)
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must be (M, 3), got {f.shape}")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        if f.size:
            cross = np.cross(
                v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]
            )
            area2 = np.linalg.norm(cross, axis=1)
            keep = area2 > _EPS * max(1.0, float(np.abs(v).max()) ** 2)
            dropped = int((~keep).sum())
            if dropped:
                warnings.warn(f"dropped {dropped} degenerate faces", stacklevel=2)
                f = f[keep]
            self.dropped_faces = dropped
        self.vertices = v
        self.faces = f

    def transformed(self, r: np.ndarray) -> "TriangleMesh":
        """Mesh with vertices mapped through the 3x3 matrix ``r``."""
        return TriangleMesh(self.vertices @ np.asarray(r).T, self.faces)


@dataclass
class SphericalRepresentation:
    """Projected mesh: channel 0 = normalized farthest-hit distance,
    channel 1 = sine of the incidence angle from the tangent plane."""

    signal: SphericalSignal
    center: np.ndarray = field(repr=False)
    radius: float = 0.0


# ---------------------------------------------------------------------------
# File loading: ASCII OFF, and the v/f subset of OBJ.  Polygons with more
# than three sides are fan-triangulated.
# ---------------------------------------------------------------------------


def load_off(path: str) -> TriangleMesh:
    with open(path, "r", encoding="utf-8") as fh:
        tokens: list[str] = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise ValueError(f"{path}: missing OFF header")
    pos = 1
    nv, nf = int(tokens[pos]), int(tokens[pos + 1])
    pos += 3  # vertex count, face count, edge count
    verts = np.array(tokens[pos : pos + 3 * nv], dtype=np.float64).reshape(nv, 3)
    pos += 3 * nv
    faces: list[tuple[int, int, int]] = []
    for _ in range(nf):
        k = int(tokens[pos])
        idx = [int(t) for t in tokens[pos + 1 : pos + 1 + k]]
        pos += 1 + k
        for i in range(1, k - 1):
            faces.append((idx[0], idx[i], idx[i + 1]))
    return TriangleMesh(verts, np.array(faces, dtype=np.int64))


def load_obj(path: str) -> TriangleMesh:
    verts: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/", 1)[0]) for p in parts[1:]]
                idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
                for i in range(1, len(idx) - 1):
                    faces.append((idx[0], idx[i], idx[i + 1]))
    if not verts:
        raise ValueError(f"{path}: no vertices found")
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int64))


def load_mesh(path: str) -> TriangleMesh:
    if path.endswith(".off"):
        return load_off(path)
    if path.endswith(".obj"):
        return load_obj(path)
    raise ValueError(f"unsupported mesh format: {path}")


# ---------------------------------------------------------------------------
# Minimum enclosing sphere, computed by support-set pivoting: repeatedly
# solve the exact smallest sphere of the current support (at most 4 points)
# plus the farthest outlier.  Exact up to roundoff, unlike Ritter-style
# constructions.
# ---------------------------------------------------------------------------


def _circumsphere(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest sphere with all of ``pts`` (1..4 points) on its boundary."""
    k = len(pts)
    if k == 1:
        return pts[0], 0.0
    if k == 2:
        c = 0.5 * (pts[0] + pts[1])
        return c, float(np.linalg.norm(pts[0] - c))
    a = 2.0 * (pts[1:] - pts[0])
    rhs = np.einsum("ij,ij->i", pts[1:], pts[1:]) - pts[0] @ pts[0]
    # Solve in the affine hull of the points.
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return sol, float(np.linalg.norm(pts[0] - sol))


def _min_sphere_small(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact minimum sphere of at most 5 points by subset enumeration."""
    best: tuple[np.ndarray, float] | None = None
    n = len(pts)
    for k in range(1, min(n, 4) + 1):
        for sub in combinations(range(n), k):
            c, r = _circumsphere(pts[list(sub)])
            if np.linalg.norm(pts - c, axis=1).max() <= r * (1 + 1e-10) + 1e-12:
                if best is None or r < best[1]:
                    best = (c, r)
    assert best is not None
    return best


def bounding_sphere(mesh: TriangleMesh) -> tuple[np.ndarray, float]:
    """Center and radius of the minimum sphere enclosing all vertices."""
    pts = np.unique(mesh.vertices, axis=0)
    if len(pts) == 0:
        raise ValueError("mesh has no vertices")
    center, radius = pts[0].copy(), 0.0
    support = pts[:1]
    for _ in range(16 * len(pts) + 16):
        d = np.linalg.norm(pts - center, axis=1)
        far = int(np.argmax(d))
        if d[far] <= radius * (1 + 1e-10) + 1e-12:
            break
        cand = np.vstack([support, pts[far]])
        center, radius = _min_sphere_small(cand)
        on = np.linalg.norm(cand - center, axis=1) >= radius * (1 - 1e-9) - 1e-12
        support = cand[on][-4:]
    return center, float(radius)


# ---------------------------------------------------------------------------
# Ray casting.
# ---------------------------------------------------------------------------


def _cast_rows(
    dirs: np.ndarray, origin: np.ndarray, v0: np.ndarray, e1: np.ndarray, e2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Farthest-hit distance and hit-face index for a batch of rays.

    Moller-Trumbore over all (ray, face) pairs; returns (t, face) with
    t = -inf where the ray misses everything.
    """
    p = np.cross(dirs[:, None, :], e2[None, :, :])  # (R, F, 3)
    det = np.einsum("fj,rfj->rf", e1, p)
    ok = np.abs(det) > _EPS
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    s = origin[None, :] - v0  # (F, 3)
    u = np.einsum("fj,rfj->rf", s, p) * inv
    q = np.cross(s, e1)  # (F, 3)
    v = np.einsum("rj,fj->rf", dirs, q) * inv
    t = np.einsum("fj,fj->f", e2, q)[None, :] * inv
    tol = 1e-9
    hit = ok & (u >= -tol) & (v >= -tol) & (u + v <= 1.0 + tol) & (t > _EPS)
    t = np.where(hit, t, -np.inf)
    face = np.argmax(t, axis=1)
    return t[np.arange(len(dirs)), face], face


def mesh_to_sphere(mesh: TriangleMesh, b: int) -> SphericalRepresentation:
    """Project a mesh onto the bandwidth-``b`` grid by center ray casting."""
    return project_mesh(mesh, b)


def project_mesh(
    mesh: TriangleMesh, b: int, center: np.ndarray | None = None
) -> SphericalRepresentation:
    """As ``mesh_to_sphere`` but allowing a shifted projection center.

    An explicit ``center`` wins; otherwise a ``projection_offset`` recorded
    on the mesh (by augmentation) displaces the bounding center.
    """
    if len(mesh.faces) == 0:
        raise ValueError("mesh has no faces to intersect")
    c0, radius = bounding_sphere(mesh)
    offset = getattr(mesh, "projection_offset", None)
    if center is not None:
        origin = np.asarray(center, dtype=np.float64)
    elif offset is not None:
        origin = c0 + np.asarray(offset, dtype=np.float64)
    else:
        origin = c0
    if origin is not c0:
        # keep normalization covering all vertices from the shifted origin
        radius = float(np.linalg.norm(mesh.vertices - origin, axis=1).max())
    grid = make_grid(b)
    dirs = grid.directions().reshape(-1, 3)
    v = mesh.vertices
    f = mesh.faces
    v0 = v[f[:, 0]]
    e1 = v[f[:, 1]] - v0
    e2 = v[f[:, 2]] - v0
    normals = np.cross(e1, e2)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)

    n = grid.n
    dist = np.empty(n * n)
    sina = np.empty(n * n)
    rows = max(1, int(2e6 // max(1, len(f))))  # bound the (ray, face) block size
    for start in range(0, n * n, rows * n):
        stop = min(n * n, start + rows * n)
        t, face = _cast_rows(dirs[start:stop], origin, v0, e1, e2)
        hit = np.isfinite(t)
        dist[start:stop] = np.where(hit, t, 0.0) / radius
        cosang = np.abs(np.einsum("rj,rj->r", dirs[start:stop], normals[face]))
        sina[start:stop] = np.where(hit, np.clip(cosang, 0.0, 1.0), 0.0)
    values = np.stack([dist.reshape(n, n), sina.reshape(n, n)])
    signal = SphericalSignal(grid, values)
    return SphericalRepresentation(signal=signal, center=origin, radius=radius)
