"""Weight-system construction for linearly weighted Laplacian smoothing.

Three schemes are provided:

* ``FEM``: the piecewise-linear Laplace stiffness matrix, kept unscaled so
  the interior block stays symmetric positive definite.
* ``UNIFORM``: classical Laplacian-smoothing weights 1/|N(i)|.
* ``LOG_BARRIER``: strictly positive convex weights per interior node from
  a per-node log-barrier program.

``FEM`` and ``LOG_BARRIER`` satisfy the affine-combination identities on
any mesh: the assembled ``[A_I, A_B]`` annihilates the constant vector
(after scaling) and every coordinate axis of the generating mesh, so
affine boundary motions are reproduced exactly.  ``UNIFORM`` annihilates
only the constant vector in general; it annihilates the coordinate axes
exactly when every interior node is the centroid of its neighbors (true
for uniform grids and structured box tet meshes, false for curved meshes
such as the polar annulus).
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import (
    DegenerateElementError,
    NoInteriorError,
    NodeNotInteriorError,
    NoNeighborsError,
    SingularSystemError,
)
from .mesh import signed_measure, signed_measures

SCHEMES = ("FEM", "UNIFORM", "LOG_BARRIER")


@dataclass(frozen=True)
class WeightSystem:
    """Partitioned weight matrix of one LWLS scheme.

    ``a_ii`` (m x m) acts on interior nodes, ``a_ib`` (m x b) on boundary
    nodes; ``interior_ids`` / ``boundary_ids`` map block rows/columns back
    to mesh node ids (both ascending).
    """

    a_ii: sparse.csr_matrix
    a_ib: sparse.csr_matrix
    interior_ids: np.ndarray
    boundary_ids: np.ndarray
    scheme: str

    @property
    def symmetric(self):
        return self.scheme == "FEM"

    @property
    def m(self):
        return len(self.interior_ids)

    @property
    def b(self):
        return len(self.boundary_ids)

    def residual(self, coords):
        """max-norm of [A_I, A_B] @ coords per axis, for the generating mesh."""
        x_i = coords[self.interior_ids]
        x_b = coords[self.boundary_ids]
        return np.abs(self.a_ii @ x_i + self.a_ib @ x_b).max(axis=0)


def local_stiffness(points):
    """Element stiffness matrix of the Laplace operator with P1 hat functions.

    Symmetric (d+1)x(d+1) with zero row sums.  Requires a nondegenerate,
    positively oriented simplex.
    """
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    vol = signed_measure(points)
    if vol <= 0.0:
        raise DegenerateElementError(
            "local stiffness needs positive signed measure", measure=vol
        )
    # phi_i(x) = inv(M)[i] @ [1, x] with M = [[1...1], [V^T]], so the
    # gradient of phi_i is inv(M)[i, 1:].
    m = np.vstack([np.ones(d + 1), points.T])
    grads = np.linalg.inv(m)[:, 1:]  # (d+1, d)
    return vol * (grads @ grads.T)


def assemble_stiffness(mesh):
    """Global Laplace stiffness matrix in CSR form.

    Element contributions are accumulated in ascending element-id order;
    rows sum to zero and the nonzero pattern is node adjacency.
    """
    d1 = mesh.dim + 1
    meas = signed_measures(mesh)
    bad = np.flatnonzero(meas <= 0.0)
    if len(bad):
        raise DegenerateElementError(
            f"element {bad[0]} has nonpositive measure", element=int(bad[0])
        )
    ne = mesh.n_elements
    pts = mesh.coords[mesh.elements]  # (ne, d+1, d)
    m = np.concatenate([np.ones((ne, 1, d1)), np.transpose(pts, (0, 2, 1))], axis=1)
    grads = np.linalg.inv(m)[:, :, 1:]  # (ne, d+1, d)
    local = meas[:, None, None] * (grads @ np.transpose(grads, (0, 2, 1)))
    rows = np.repeat(mesh.elements, d1, axis=1).ravel()
    cols = np.tile(mesh.elements, (1, d1)).ravel()
    vals = local.ravel()
    n = mesh.n_nodes
    a = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    a.sum_duplicates()
    return a


def _split(a, interior, boundary):
    a = a.tocsr()
    return a[interior][:, interior].tocsr(), a[interior][:, boundary].tocsr()


def partition_system(a, mesh):
    """Interior/boundary partition of the FEM stiffness matrix."""
    interior = mesh.interior_ids
    boundary = mesh.boundary_ids
    if len(interior) == 0:
        raise NoInteriorError("mesh has no interior nodes")
    if len(boundary) == 0:
        raise SingularSystemError("mesh has no boundary nodes; A_I is singular")
    a_ii, a_ib = _split(a, interior, boundary)
    return WeightSystem(a_ii, a_ib, interior, boundary, "FEM")


def node_neighbors(mesh):
    """Adjacency sets N(i): nodes sharing an element with node i."""
    neighbors = [set() for _ in range(mesh.n_nodes)]
    for elem in mesh.elements:
        for i in elem:
            neighbors[i].update(elem.tolist())
    for i, s in enumerate(neighbors):
        s.discard(i)
    return [np.array(sorted(s), dtype=np.int64) for s in neighbors]


def _weights_to_system(mesh, per_node_weights, scheme):
    """Assemble unit-diagonal A_I with -w_ij off-diagonals from per-node rows."""
    interior = mesh.interior_ids
    boundary = mesh.boundary_ids
    if len(interior) == 0:
        raise NoInteriorError("mesh has no interior nodes")
    pos = np.full(mesh.n_nodes, -1, dtype=np.int64)
    pos[interior] = np.arange(len(interior))
    bpos = np.full(mesh.n_nodes, -1, dtype=np.int64)
    bpos[boundary] = np.arange(len(boundary))

    ii_r, ii_c, ii_v = [], [], []
    ib_r, ib_c, ib_v = [], [], []
    for row, (nid, nbrs, w) in enumerate(per_node_weights):
        ii_r.append(row)
        ii_c.append(row)
        ii_v.append(1.0)
        for j, wj in zip(nbrs, w):
            if mesh.boundary[j]:
                ib_r.append(row)
                ib_c.append(bpos[j])
                ib_v.append(-wj)
            else:
                ii_r.append(row)
                ii_c.append(pos[j])
                ii_v.append(-wj)
    m, b = len(interior), len(boundary)
    a_ii = sparse.coo_matrix((ii_v, (ii_r, ii_c)), shape=(m, m)).tocsr()
    a_ib = sparse.coo_matrix((ib_v, (ib_r, ib_c)), shape=(m, b)).tocsr()
    return WeightSystem(a_ii, a_ib, interior, boundary, scheme)


def uniform_weights(mesh):
    """Centroid-of-neighbors weights: w_ij = 1/|N(i)| for every neighbor."""
    neighbors = node_neighbors(mesh)
    rows = []
    for nid in mesh.interior_ids:
        nbrs = neighbors[nid]
        if len(nbrs) == 0:
            raise NoNeighborsError(f"interior node {nid} has no neighbors", node=int(nid))
        rows.append((nid, nbrs, np.full(len(nbrs), 1.0 / len(nbrs))))
    return _weights_to_system(mesh, rows, "UNIFORM")


def _barrier_node_weights(center, nbr_coords, tol=1e-10, max_iter=100):
    """Solve max sum(log w) s.t. sum w = 1, sum w*(x_j - x_i) = 0.

    Damped Newton on the dual: w_j = 1 / (C^T lam)_j with C the constraint
    matrix; initialized at uniform weights.  Returns None when the iteration
    cannot reach the KKT tolerance (caller decides infeasibility).
    """
    n = len(nbr_coords)
    rel = nbr_coords - center
    c = np.vstack([np.ones(n), rel.T])  # (d+1, n)
    target = np.zeros(c.shape[0])
    target[0] = 1.0
    lam = np.zeros(c.shape[0])
    lam[0] = n  # yields uniform w = 1/n
    for _ in range(max_iter):
        s = c.T @ lam
        if np.min(s) <= 0.0:
            return None
        w = 1.0 / s
        g = c @ w - target
        if np.abs(g).max() <= tol:
            return w
        jac = -(c * w**2) @ c.T
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            return None
        alpha = 1.0
        while np.min(c.T @ (lam + alpha * step)) <= 0.0:
            alpha *= 0.5
            if alpha < 1e-14:
                return None
        lam = lam + alpha * step
    return None


def _strictly_inside_hull(center, nbr_coords, tol=1e-12):
    """Feasibility check: does a strictly positive convex combination exist?"""
    from scipy.optimize import linprog

    n = len(nbr_coords)
    rel = nbr_coords - center
    # max t  s.t.  sum w = 1, sum w*rel = 0, w_j >= t  -> variables (w, t)
    a_eq = np.hstack([np.vstack([np.ones(n), rel.T]), np.zeros((rel.shape[1] + 1, 1))])
    b_eq = np.zeros(rel.shape[1] + 1)
    b_eq[0] = 1.0
    a_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    res = linprog(
        c=np.append(np.zeros(n), -1.0),
        A_ub=a_ub,
        b_ub=np.zeros(n),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(None, None)] * n + [(None, None)],
        method="highs",
    )
    return res.status == 0 and res.x is not None and res.x[-1] > tol


def log_barrier_weights(mesh, tol=1e-10):
    """Strictly positive convex weights via a per-node barrier program.

    Each interior node's problem is independent.  Nodes not strictly inside
    the convex hull of their neighbors are infeasible and raise.
    """
    neighbors = node_neighbors(mesh)
    rows = []
    for nid in mesh.interior_ids:
        nbrs = neighbors[nid]
        if len(nbrs) == 0:
            raise NoNeighborsError(f"interior node {nid} has no neighbors", node=int(nid))
        w = _barrier_node_weights(mesh.coords[nid], mesh.coords[nbrs], tol=tol)
        if w is None:
            if not _strictly_inside_hull(mesh.coords[nid], mesh.coords[nbrs]):
                raise NodeNotInteriorError(
                    f"node {nid} is not strictly inside its neighbors' hull",
                    node=int(nid),
                )
            raise SingularSystemError(
                f"barrier weights did not converge for node {nid}", node=int(nid)
            )
        rows.append((nid, nbrs, w))
    return _weights_to_system(mesh, rows, "LOG_BARRIER")


def build_weights(mesh, scheme):
    """Dispatch: build the WeightSystem for one of the SCHEMES."""
    scheme = scheme.upper()
    if scheme == "FEM":
        return partition_system(assemble_stiffness(mesh), mesh)
    if scheme == "UNIFORM":
        return uniform_weights(mesh)
    if scheme == "LOG_BARRIER":
        return log_barrier_weights(mesh)
    raise ValueError(f"unknown scheme {scheme!r}")
