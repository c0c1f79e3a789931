"""Triangulated reference meshes for immersed structures.

Meshes are P1 or P2 (straight-sided, midpoint nodes) triangulations stored as
node coordinates plus connectivity.  Generators cover the benchmark
geometries: solid discs, axis-aligned rectangles (beams, bands, blocks), and
sheared rectangles for slanted channel walls.  The text format

    ifedmesh v1 <order> <n_nodes> <n_elems>
    x y                 (one line per node)
    i0 i1 i2 [i3 i4 i5] (one line per element, 0-based)

round-trips through ``write_mesh``/``read_mesh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ReferenceMesh",
    "MfacReport",
    "disc_mesh",
    "rect_mesh",
    "sheared_rect_mesh",
    "mfac_of",
    "write_mesh",
    "read_mesh",
]


@dataclass
class ReferenceMesh:
    """Reference-configuration triangulation with P1 or P2 connectivity."""

    nodes: np.ndarray       # (m, 2)
    elements: np.ndarray    # (ne, 3) or (ne, 6); P2 midpoints follow vertices
    order: int = 1

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = np.asarray(self.elements, dtype=np.int64)
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        expected = 3 if self.order == 1 else 6
        if self.elements.shape[1] != expected:
            raise ValueError(
                f"P{self.order} elements need {expected} nodes per element"
            )
        if np.any(self.signed_areas() <= 0.0):
            raise ValueError("mesh contains degenerate or inverted elements")

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def e_fac(self) -> int:
        """Element factor: node spacing is edge length / e_fac."""
        return 1 if self.order == 1 else 2

    def signed_areas(self) -> np.ndarray:
        v = self.nodes[self.elements[:, :3]]
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def area(self) -> float:
        return float(self.signed_areas().sum())

    def edge_lengths(self) -> np.ndarray:
        """Vertex-to-vertex edge lengths, one entry per element edge."""
        v = self.nodes[self.elements[:, :3]]
        e = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 1], v[:, 0] - v[:, 2]])
        return np.linalg.norm(e, axis=-1).ravel()

    def edge_use_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for tri in self.elements[:, :3]:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def is_conforming(self) -> bool:
        return all(c <= 2 for c in self.edge_use_counts().values())


@dataclass
class MfacReport:
    value: float
    per_element_min: float
    per_element_max: float


def mfac_of(mesh: ReferenceMesh, h: float) -> MfacReport:
    """Ratio of Lagrangian node spacing to grid spacing, dX / (e_fac * h)."""
    if h <= 0.0:
        raise ValueError("grid spacing must be positive")
    edges = mesh.edge_lengths()
    per_elem = edges.reshape(3, -1).mean(axis=0)
    scale = mesh.e_fac * h
    return MfacReport(
        value=float(np.median(edges)) / scale,
        per_element_min=float(per_elem.min()) / scale,
        per_element_max=float(per_elem.max()) / scale,
    )


def _orient_ccw(nodes, tris):
    v = nodes[tris]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    flip = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] < 0.0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def _to_p2(nodes, tris):
    """Insert midpoint nodes on every edge; midpoints ordered 01, 12, 20."""
    nodes = list(map(tuple, nodes))
    midpoint_of: dict[tuple[int, int], int] = {}
    elems = []
    for tri in tris:
        mids = []
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            if key not in midpoint_of:
                midpoint_of[key] = len(nodes)
                xa, ya = nodes[a]
                xb, yb = nodes[b]
                nodes.append((0.5 * (xa + xb), 0.5 * (ya + yb)))
            mids.append(midpoint_of[key])
        elems.append([tri[0], tri[1], tri[2], *mids])
    return np.array(nodes), np.array(elems, dtype=np.int64)


def _finish(nodes, tris, order):
    tris = _orient_ccw(np.asarray(nodes, dtype=float), np.asarray(tris, np.int64))
    if order == 2:
        nodes, tris = _to_p2(np.asarray(nodes, dtype=float), tris)
    return ReferenceMesh(np.asarray(nodes, dtype=float), tris, order=order)


def disc_mesh(radius: float, target_dx: float, order: int = 1,
              center=(0.0, 0.0)) -> ReferenceMesh:
    """Solid disc built from concentric rings of near-equilateral triangles."""
    if target_dx <= 0.0 or radius <= 0.0:
        raise ValueError("radius and target spacing must be positive")
    n_rings = max(1, round(radius / target_dx))
    dr = radius / n_rings
    cx, cy = center

    ring_start = [0]
    nodes = [(cx, cy)]
    ring_sizes = [1]
    for k in range(1, n_rings + 1):
        n_k = max(6, round(2.0 * math.pi * k * dr / target_dx))
        ring_start.append(len(nodes))
        ring_sizes.append(n_k)
        ang = 2.0 * math.pi * np.arange(n_k) / n_k
        r_k = k * dr
        for a in ang:
            nodes.append((cx + r_k * math.cos(a), cy + r_k * math.sin(a)))

    tris = []
    # innermost fan
    n1 = ring_sizes[1]
    for i in range(n1):
        tris.append([0, ring_start[1] + i, ring_start[1] + (i + 1) % n1])
    # annuli: merge the two rings by advancing whichever pointer trails in angle
    for k in range(1, n_rings):
        si, ni = ring_start[k], ring_sizes[k]
        so, no = ring_start[k + 1], ring_sizes[k + 1]
        i = j = 0
        while i < ni or j < no:
            ang_i = (i + 1) / ni if i < ni else np.inf
            ang_j = (j + 1) / no if j < no else np.inf
            if ang_i <= ang_j:
                tris.append([si + i % ni, so + j % no, si + (i + 1) % ni])
                i += 1
            else:
                tris.append([si + i % ni, so + j % no, so + (j + 1) % no])
                j += 1
    return _finish(nodes, tris, order)


def rect_mesh(width: float, height: float, target_dx: float, order: int = 1,
              origin=(0.0, 0.0)) -> ReferenceMesh:
    """Structured rectangle triangulation with alternating diagonals."""
    if target_dx <= 0.0 or width <= 0.0 or height <= 0.0:
        raise ValueError("dimensions and target spacing must be positive")
    nx = max(1, round(width / target_dx))
    ny = max(1, round(height / target_dx))
    x0, y0 = origin
    xs = x0 + width * np.arange(nx + 1) / nx
    ys = y0 + height * np.arange(ny + 1) / ny
    nodes = [(x, y) for j in range(ny + 1) for x in xs for y in [ys[j]]]

    def nid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b = nid(i, j), nid(i + 1, j)
            c, d = nid(i + 1, j + 1), nid(i, j + 1)
            if (i + j) % 2 == 0:
                tris += [[a, b, c], [a, c, d]]
            else:
                tris += [[a, b, d], [b, c, d]]
    return _finish(nodes, tris, order)


def sheared_rect_mesh(width, height, target_dx, shear_slope, shear_center_x,
                      order: int = 1, origin=(0.0, 0.0)) -> ReferenceMesh:
    """Rectangle mesh sheared by y += (x - center) * slope (area-preserving)."""
    mesh = rect_mesh(width, height, target_dx, order=order, origin=origin)
    nodes = mesh.nodes.copy()
    nodes[:, 1] += (nodes[:, 0] - shear_center_x) * shear_slope
    return ReferenceMesh(nodes, mesh.elements, order=mesh.order)


def write_mesh(mesh: ReferenceMesh, path) -> None:
    with open(path, "w") as f:
        f.write(f"ifedmesh v1 {mesh.order} {mesh.n_nodes} {mesh.n_elements}\n")
        for x, y in mesh.nodes:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        for elem in mesh.elements:
            f.write(" ".join(str(int(i)) for i in elem) + "\n")


def read_mesh(path) -> ReferenceMesh:
    with open(path) as f:
        header = f.readline().split()
        if header[:2] != ["ifedmesh", "v1"]:
            raise ValueError(f"not an ifedmesh v1 file: {path}")
        order, n_nodes, n_elems = map(int, header[2:5])
        nodes = np.array(
            [[float(v) for v in f.readline().split()] for _ in range(n_nodes)]
        )
        elems = np.array(
            [[int(v) for v in f.readline().split()] for _ in range(n_elems)],
            dtype=np.int64,
        )
    return ReferenceMesh(nodes, elems, order=order)
