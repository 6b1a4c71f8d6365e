"""Maximin mesh untangler and the warp/untangle hybrid.

Each interior vertex is repositioned at the point maximizing the minimum
signed measure of its incident elements.  The measure of each incident
element is affine in the free vertex, so the reposition is a tiny linear
program solved by a dense simplex with Bland's rule.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnboundedLPError
from .mesh import count_reversals
from .warp import WarpReport, femwarp_step

BOX_FACTOR = 10.0
STALL_TOL = 1e-12


@dataclass
class LocalSubmesh:
    """A free vertex and its incident elements.

    ``elements`` holds the vertex coordinates of each incident simplex as a
    (n, d+1, d) array; ``free_slots[i]`` identifies the free vertex's
    position in tuple i.
    """

    free_id: int
    position: np.ndarray
    elements: np.ndarray
    free_slots: np.ndarray


def local_submesh(mesh, vertex_id, incident_eids):
    return _submesh_from_arrays(
        mesh.coords, mesh.elements, vertex_id, np.asarray(incident_eids)
    )


def _submesh_from_arrays(coords, element_array, vertex_id, eids):
    nodes = element_array[eids]  # (n, d+1)
    rows, slots = np.nonzero(nodes == vertex_id)
    order = np.argsort(rows)
    return LocalSubmesh(
        int(vertex_id),
        np.array(coords[vertex_id]),
        np.array(coords[nodes]),
        slots[order],
    )


def _stack_measures(pts):
    """Signed measures of stacked simplices, shape (k, d+1, d) -> (k,)."""
    edges = pts[:, 1:, :] - pts[:, :1, :]
    if pts.shape[2] == 2:
        return 0.5 * (edges[:, 0, 0] * edges[:, 1, 1] - edges[:, 0, 1] * edges[:, 1, 0])
    return np.linalg.det(edges) / 6.0


def _affine_measure_coeffs(sub):
    """Coefficients (G, c) with measure_i(x) = G[i] @ x + c[i].

    Exact by linearity: each gradient entry is the measure difference for a
    unit shift of the free vertex along one axis.
    """
    n = len(sub.elements)
    d = sub.position.size
    idx = np.arange(n)
    work = np.array(sub.elements)
    work[idx, sub.free_slots] = sub.position
    base = _stack_measures(work)
    grads = np.empty((n, d))
    for j in range(d):
        bumped = np.array(work)
        bumped[idx, sub.free_slots, j] += 1.0
        grads[:, j] = _stack_measures(bumped) - base
    return grads, base - grads @ sub.position


def _simplex_maximize(c, a_ub, b_ub, max_iter=10000):
    """max c@x s.t. a_ub@x <= b_ub, x >= 0, with b_ub >= 0.

    Dense tableau simplex with Bland's rule (deterministic, cycle-free).
    Returns the optimal x.
    """
    m, n = a_ub.shape
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a_ub
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b_ub
    tableau[m, :n] = -np.asarray(c, dtype=float)
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        row = tableau[m, : n + m]
        neg = np.flatnonzero(row < -1e-12)
        if not len(neg):
            break
        entering = int(neg[0])  # Bland: smallest improving index
        col = tableau[:m, entering]
        mask = col > 1e-12
        if not mask.any():
            raise UnboundedLPError("LP is unbounded")
        ratios = np.full(m, np.inf)
        ratios[mask] = tableau[:m, -1][mask] / col[mask]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-15)
        leave = int(min(ties, key=lambda i: basis[i]))  # Bland tie-break
        pivot = tableau[leave, entering]
        tableau[leave] /= pivot
        colvals = tableau[:, entering].copy()
        colvals[leave] = 0.0
        tableau -= np.outer(colvals, tableau[leave])
        basis[leave] = entering
    x = np.zeros(n + m)
    for i, bv in enumerate(basis):
        x[bv] = tableau[i, -1]
    return x[:n]


def maximin_reposition(sub, box_factor=BOX_FACTOR):
    """Optimal position for the free vertex: maximize the minimum signed
    measure over incident elements.

    A feasibility box of ``box_factor`` times the cavity diameter around the
    current position keeps the LP bounded for boundary-incomplete cavities.
    Never worsens: if the LP result does not beat the current minimum, the
    vertex stays in place.
    """
    grads, consts = _affine_measure_coeffs(sub)
    x0 = sub.position
    d = x0.size
    pts = sub.elements.reshape(-1, d)
    diam = max(np.ptp(pts, axis=0).max(), 1e-12)
    radius = box_factor * diam
    lo = x0 - radius
    hi = x0 + radius

    current_min = (grads @ x0 + consts).min()
    # affine functions attain extremes at box corners; anchoring the level
    # variable at the minimum over the lo corner keeps the slack basis
    # feasible without cutting off the optimum
    t_lo = (grads @ lo + consts).min()

    # variables: u = x - lo in [0, hi-lo], tv = t - t_lo >= 0
    n = len(grads)
    a_ub = np.zeros((n + d, d + 1))
    b_ub = np.zeros(n + d)
    a_ub[:n, :d] = -grads
    a_ub[:n, d] = 1.0
    b_ub[:n] = grads @ lo + consts - t_lo
    a_ub[n:, :d] = np.eye(d)
    b_ub[n:] = hi - lo
    obj = np.zeros(d + 1)
    obj[d] = 1.0
    sol = _simplex_maximize(obj, a_ub, b_ub)
    x_new = lo + sol[:d]
    achieved = (grads @ x_new + consts).min()
    if achieved < current_min - 1e-12:
        return np.array(x0), current_min
    return x_new, achieved


def vertex_to_elements(mesh):
    incident = [[] for _ in range(mesh.n_nodes)]
    for eid, elem in enumerate(mesh.elements):
        for v in elem:
            incident[v].append(eid)
    return [np.array(e, dtype=np.int64) for e in incident]


def untangle(mesh, max_sweeps=50, on_move=None):
    """Sweep the interior vertices (ascending id) with maximin repositioning.

    Stops with SUCCESS when no reversals remain, STALLED when a whole sweep
    moves nothing beyond 1e-12, or MAX_SWEEPS.  Boundary nodes never move.
    ``on_move`` (if given) is called with (vertex_id, min_before, min_after)
    after each repositioning.
    """
    incident = vertex_to_elements(mesh)
    coords = np.array(mesh.coords)
    elements = mesh.elements
    sweeps = 0
    while sweeps < max_sweeps:
        if count_reversals(mesh.with_coords(coords))[0] == 0:
            return mesh.with_coords(coords), sweeps, "SUCCESS"
        max_move = 0.0
        for vid in mesh.interior_ids:
            sub = _submesh_from_arrays(coords, elements, vid, incident[vid])
            new_pos, after = maximin_reposition(sub)
            if on_move is not None:
                grads, consts = _affine_measure_coeffs(sub)
                on_move(int(vid), (grads @ sub.position + consts).min(), after)
            max_move = max(max_move, np.linalg.norm(new_pos - coords[vid]))
            coords[vid] = new_pos
        sweeps += 1
        if max_move <= STALL_TOL:
            cur = mesh.with_coords(coords)
            tangled = count_reversals(cur)[0] != 0
            return cur, sweeps, "STALLED" if tangled else "SUCCESS"
    cur = mesh.with_coords(coords)
    outcome = "SUCCESS" if count_reversals(cur)[0] == 0 else "MAX_SWEEPS"
    return cur, sweeps, outcome


def hybrid_warp(mesh, weights, target_boundary, max_sweeps=50):
    """One-shot warp followed, on reversal, by untangling of the warped
    (not the original) mesh."""
    warped, report = femwarp_step(mesh, weights, target_boundary)
    if report.success:
        return warped, report
    fixed, sweeps, outcome = untangle(warped, max_sweeps=max_sweeps)
    nrev, _ = count_reversals(fixed)
    return fixed, WarpReport(
        outcome="SUCCESS" if nrev == 0 else "REVERSED",
        reversals=nrev,
        n_factorizations=report.n_factorizations,
        steps=report.steps,
        quality=None,
    )
