"""Shared fixtures: structured meshes and one ingested 3D mesh.

The tetrahedral mesh is round-tripped through .node/.ele files so the 3D
code paths always exercise the file-ingestion route.
"""

import numpy as np
import pytest

from femwarp import gen_annulus, gen_box_tets, gen_rectangle
from femwarp import io


@pytest.fixture(scope="session")
def annulus_coarse():
    return gen_annulus(0.5, 6, 24)


@pytest.fixture(scope="session")
def annulus_mid():
    # comparable in node/element count to a fine unstructured annulus
    return gen_annulus(0.5, 8, 72)


@pytest.fixture(scope="session")
def annulus_14_64():
    return gen_annulus(0.5, 14, 64)


@pytest.fixture(scope="session")
def rect_mesh():
    return gen_rectangle(2.0, 1.0, 21, 11)


@pytest.fixture(scope="session")
def box_mesh(tmp_path_factory):
    """6x6x6 tetrahedral cube, written out and read back through io."""
    raw = gen_box_tets(6, 6, 6)
    base = tmp_path_factory.mktemp("box3d") / "box"
    io.write_mesh(raw, f"{base}.node", f"{base}.ele")
    return io.read_mesh(f"{base}.node", f"{base}.ele")


@pytest.fixture(scope="session")
def box_mesh_paths(tmp_path_factory):
    """Basename of an on-disk 5x5x5 cube of size 3 for CLI-level 3D tests."""
    raw = gen_box_tets(5, 5, 5, size=3.0)
    base = tmp_path_factory.mktemp("box3d_cli") / "box"
    io.write_mesh(raw, f"{base}.node", f"{base}.ele")
    return str(base)


@pytest.fixture(scope="session")
def reflection_untangle_result(annulus_14_64):
    """Standalone untangler run on the point-reflected boundary fixture.

    Expensive (50 sweeps over a 768-interior-node mesh), so it is computed
    once and shared between the module test and the acceptance criterion.
    """
    from femwarp.untangle import untangle

    coords = np.array(annulus_14_64.coords)
    bid = annulus_14_64.boundary_ids
    coords[bid] = -coords[bid]
    return untangle(annulus_14_64.with_coords(coords))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def jittered_rectangle(nx, ny, seed=7):
    """Rectangle mesh with interior nodes perturbed off the grid lines.

    Axis-aligned right triangles are blind to a pure y-shear (the curvature
    terms cancel exactly), so refinement studies of element reversal under
    the shear map need generic triangle orientations.
    """
    mesh = gen_rectangle(2.0, 1.0, nx, ny)
    rng = np.random.default_rng(seed)
    coords = np.array(mesh.coords)
    cell = min(2.0 / (nx - 1), 1.0 / (ny - 1))
    ii = mesh.interior_ids
    coords[ii] += rng.uniform(-0.25 * cell, 0.25 * cell, size=(len(ii), 2))
    return mesh.with_coords(coords)
