"""Structured test-mesh generators: annulus and rectangle.

Purpose-built fixtures so the test battery needs no external mesher;
unstructured meshes can still be ingested through the Triangle/TetGen
readers in :mod:`femwarp.io`.
"""

import numpy as np

from .mesh import Mesh


def gen_annulus(r, n_rings, n_sectors):
    """Structured triangular mesh of the annulus r <= rho <= 1.

    Rings are spaced linearly in radius, each quad cell is split into two
    positively oriented triangles; innermost and outermost rings are marked
    boundary.
    """
    if not (0.0 < r < 1.0):
        raise ValueError(f"inner radius must lie in (0,1), got {r}")
    if n_rings < 2:
        raise ValueError("need at least 2 rings")
    if n_sectors < 8:
        raise ValueError("need at least 8 sectors")
    radii = np.linspace(r, 1.0, n_rings)
    angles = 2.0 * np.pi * np.arange(n_sectors) / n_sectors
    coords = np.empty((n_rings * n_sectors, 2))
    for k, rho in enumerate(radii):
        coords[k * n_sectors : (k + 1) * n_sectors, 0] = rho * np.cos(angles)
        coords[k * n_sectors : (k + 1) * n_sectors, 1] = rho * np.sin(angles)

    def nid(ring, sector):
        return ring * n_sectors + (sector % n_sectors)

    elements = []
    for k in range(n_rings - 1):
        for j in range(n_sectors):
            a = nid(k, j)
            b = nid(k, j + 1)
            c = nid(k + 1, j + 1)
            d = nid(k + 1, j)
            # quad (a, d, c, b) is CCW; split along the a-c diagonal
            elements.append((a, d, c))
            elements.append((a, c, b))
    boundary = list(range(n_sectors)) + list(
        range((n_rings - 1) * n_sectors, n_rings * n_sectors)
    )
    return Mesh(coords, np.array(elements), boundary)


def annulus_for_h(r, h):
    """Ring/sector counts so the annulus mesh edge length lands near h."""
    n_rings = max(2, int(np.ceil((1.0 - r) / h)) + 1)
    n_sectors = max(8, int(np.ceil(2.0 * np.pi / h)))
    return gen_annulus(r, n_rings, n_sectors)


def gen_rectangle(width, height, nx, ny):
    """Structured triangular mesh of [0, width] x [0, height].

    nx, ny are node counts per side; each grid cell is split along one
    diagonal.  Perimeter nodes are boundary.
    """
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 nodes per side")
    xs = np.linspace(0.0, width, nx)
    ys = np.linspace(0.0, height, ny)
    coords = np.array([(x, y) for y in ys for x in xs])

    def nid(i, j):
        return j * nx + i

    elements = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a, b = nid(i, j), nid(i + 1, j)
            c, d = nid(i + 1, j + 1), nid(i, j + 1)
            elements.append((a, b, c))
            elements.append((a, c, d))
    boundary = [
        nid(i, j)
        for j in range(ny)
        for i in range(nx)
        if i in (0, nx - 1) or j in (0, ny - 1)
    ]
    return Mesh(coords, np.array(elements), boundary)


def gen_box_tets(nx, ny, nz, size=1.0):
    """Structured tetrahedral mesh of a cube, six tets per grid cell.

    Surface nodes are boundary.  Used to exercise the 3D code paths and to
    produce .node/.ele fixtures.
    """
    if min(nx, ny, nz) < 2:
        raise ValueError("need at least 2 nodes per side")
    xs = np.linspace(0.0, size, nx)
    ys = np.linspace(0.0, size, ny)
    zs = np.linspace(0.0, size, nz)
    coords = np.array([(x, y, z) for z in zs for y in ys for x in xs])

    def nid(i, j, k):
        return (k * ny + j) * nx + i

    # Kuhn split of the unit cube into 6 tets, all positively oriented
    kuhn = [
        (0, 1, 3, 7),
        (0, 1, 7, 5),
        (0, 5, 7, 4),
        (0, 3, 2, 7),
        (0, 2, 6, 7),
        (0, 6, 4, 7),
    ]
    corner_offsets = [
        (0, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (1, 1, 0),
        (0, 0, 1),
        (1, 0, 1),
        (0, 1, 1),
        (1, 1, 1),
    ]
    elements = []
    for k in range(nz - 1):
        for j in range(ny - 1):
            for i in range(nx - 1):
                cell = [nid(i + di, j + dj, k + dk) for di, dj, dk in corner_offsets]
                for tet in kuhn:
                    elements.append(tuple(cell[v] for v in tet))
    boundary = [
        nid(i, j, k)
        for k in range(nz)
        for j in range(ny)
        for i in range(nx)
        if i in (0, nx - 1) or j in (0, ny - 1) or k in (0, nz - 1)
    ]
    return Mesh(coords, np.array(elements), boundary)
