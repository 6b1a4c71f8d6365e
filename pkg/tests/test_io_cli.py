"""Triangle/TetGen file parsing, spec parsing and the CLI drivers."""

import numpy as np
import pytest

from femwarp import Mesh, gen_annulus, gen_box_tets
from femwarp import io
from femwarp.cli import main
from femwarp.errors import BadIndexError, ParseError

SINGLE_NODE = """\
3 2 0 1
# a comment line
0 0.0 0.0 1
1 1.0 0.0 1
2 0.0 1.0 1
"""
SINGLE_ELE = """\
1 3 0
0 0 1 2
"""


def write_pair(tmp_path, node_text, ele_text, base="m"):
    node = tmp_path / f"{base}.node"
    ele = tmp_path / f"{base}.ele"
    node.write_text(node_text)
    ele.write_text(ele_text)
    return str(node), str(ele)


class TestReadMesh:
    def test_single_triangle(self, tmp_path):
        node, ele = write_pair(tmp_path, SINGLE_NODE, SINGLE_ELE)
        mesh = io.read_mesh(node, ele)
        assert mesh.n_elements == 1
        assert mesh.dim == 2
        assert np.array_equal(mesh.boundary_ids, [0, 1, 2])

    def test_one_based_autodetect(self, tmp_path):
        node_text = "3 2 0 1\n1 0.0 0.0 1\n2 1.0 0.0 1\n3 0.0 1.0 1\n"
        ele_text = "1 3 0\n1 1 2 3\n"
        node, ele = write_pair(tmp_path, node_text, ele_text)
        mesh = io.read_mesh(node, ele)
        assert np.array_equal(mesh.elements[0], [0, 1, 2])

    def test_bad_index(self, tmp_path):
        ele_text = "1 3 0\n0 0 1 999\n"
        node, ele = write_pair(tmp_path, SINGLE_NODE, ele_text)
        with pytest.raises(BadIndexError):
            io.read_mesh(node, ele)

    def test_malformed_header(self, tmp_path):
        node, ele = write_pair(tmp_path, "bogus header\n", SINGLE_ELE)
        with pytest.raises(ParseError):
            io.read_mesh(node, ele)

    def test_markerless_boundary_inferred(self, tmp_path):
        node_text = "3 2 0 0\n0 0.0 0.0\n1 1.0 0.0\n2 0.0 1.0\n"
        node, ele = write_pair(tmp_path, node_text, SINGLE_ELE)
        mesh = io.read_mesh(node, ele)
        assert np.array_equal(mesh.boundary_ids, [0, 1, 2])

    def test_negative_orientation_fixed_with_warning(self, tmp_path):
        ele_text = "1 3 0\n0 0 2 1\n"  # clockwise
        node, ele = write_pair(tmp_path, SINGLE_NODE, ele_text)
        with pytest.warns(UserWarning):
            mesh = io.read_mesh(node, ele)
        from femwarp.mesh import count_reversals

        assert count_reversals(mesh)[0] == 0


class TestWriteMesh:
    def test_round_trip_2d_bitwise(self, tmp_path, rng):
        mesh = gen_annulus(0.5, 4, 16)
        jitter = rng.uniform(-0.01, 0.01, size=mesh.coords.shape)
        mesh = mesh.with_coords(mesh.coords + jitter)
        node, ele = str(tmp_path / "a.node"), str(tmp_path / "a.ele")
        io.write_mesh(mesh, node, ele)
        back = io.read_mesh(node, ele)
        assert np.array_equal(back.coords, mesh.coords)
        assert np.array_equal(back.elements, mesh.elements)
        assert np.array_equal(back.boundary, mesh.boundary)

    def test_round_trip_3d_bitwise(self, tmp_path):
        mesh = gen_box_tets(3, 3, 3)
        node, ele = str(tmp_path / "b.node"), str(tmp_path / "b.ele")
        io.write_mesh(mesh, node, ele)
        back = io.read_mesh(node, ele)
        assert np.array_equal(back.coords, mesh.coords)
        assert np.array_equal(back.elements, mesh.elements)

    def test_empty_mesh_refused(self, tmp_path):
        mesh = Mesh(np.zeros((3, 2)), np.zeros((0, 3), dtype=int), [0])
        with pytest.raises(ParseError):
            io.write_mesh(mesh, str(tmp_path / "e.node"), str(tmp_path / "e.ele"))


class TestSpecParsing:
    def test_key_value_lines(self, tmp_path):
        spec = tmp_path / "d.spec"
        spec.write_text("Motion = annulus\ntheta_outer = 0.5 # comment\n\n")
        parsed = io.read_spec(str(spec))
        assert parsed == {"motion": "annulus", "theta_outer": "0.5"}

    def test_bad_line(self, tmp_path):
        spec = tmp_path / "d.spec"
        spec.write_text("no equals sign here\n")
        with pytest.raises(ParseError):
            io.read_spec(str(spec))

    def test_matrix_and_vector(self):
        m = io.parse_matrix("1,2;3,4", 2)
        assert np.array_equal(m, [[1.0, 2.0], [3.0, 4.0]])
        v = io.parse_vector("5, 6", 2)
        assert np.array_equal(v, [5.0, 6.0])
        with pytest.raises(ParseError):
            io.parse_matrix("1,2;3", 2)


@pytest.fixture()
def annulus_on_disk(tmp_path):
    mesh = gen_annulus(0.5, 6, 24)
    base = str(tmp_path / "ann")
    io.write_mesh(mesh, base + ".node", base + ".ele")
    return base, mesh


class TestCli:
    def test_oracle_annulus(self, capsys):
        rc = main(["oracle", "annulus", "--r", "0.5", "--s", "0.5", "--theta", "0.9"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "reversal_predicate = true" in out
        assert "min_jac_det" in out

    def test_oracle_below_cutoff(self, capsys):
        rc = main(["oracle", "annulus", "--r", "0.5", "--s", "0.5", "--theta", "0.8"])
        assert rc == 0
        assert "reversal_predicate = false" in capsys.readouterr().out

    def test_warp_identity_affine(self, tmp_path, annulus_on_disk, capsys):
        base, mesh = annulus_on_disk
        spec = tmp_path / "id.spec"
        spec.write_text("motion = affine\nl = 1,0;0,1\nv = 0,0\n")
        out = str(tmp_path / "out")
        rc = main(["warp", "--mesh", base, "--spec", str(spec), "--out", out])
        assert rc == 0
        assert "outcome = SUCCESS" in capsys.readouterr().out
        warped = io.read_mesh(out + ".node", out + ".ele")
        assert np.abs(warped.coords - mesh.coords).max() < 1e-10

    def test_warp_reversal_exit_code(self, tmp_path, annulus_on_disk):
        base, _ = annulus_on_disk
        spec = tmp_path / "rot.spec"
        spec.write_text("motion = annulus\ntheta_outer = 3.14159\n")
        out = str(tmp_path / "out")
        rc = main(["warp", "--mesh", base, "--spec", str(spec), "--out", out])
        assert rc == 2

    def test_warp_report_file(self, tmp_path, annulus_on_disk):
        base, _ = annulus_on_disk
        spec = tmp_path / "rot.spec"
        spec.write_text("motion = annulus\ntheta_outer = 0.4\n")
        out = str(tmp_path / "out")
        assert main(["warp", "--mesh", base, "--spec", str(spec), "--out", out]) == 0
        report = open(out + ".report").read()
        for key in ("outcome", "reversals", "n_factorizations", "quality_min_imr"):
            assert key in report

    def test_sweep_csv_deterministic(self, tmp_path, annulus_on_disk):
        base, _ = annulus_on_disk
        spec = tmp_path / "rot.spec"
        spec.write_text("motion = annulus\ntheta_outer = 1.0\nalgorithm = femwarp\n")
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            rc = main(
                [
                    "sweep",
                    "--mesh",
                    base,
                    "--spec",
                    str(spec),
                    "--param-grid",
                    "0:1.2:0.3",
                    "--out",
                    str(out),
                ]
            )
            assert rc == 0
        assert out1.read_text() == out2.read_text()
        lines = out1.read_text().strip().split("\n")
        assert lines[0] == "param,outcome,reversals,n_factorizations"
        assert len(lines) == 6
        assert lines[1].startswith("0,SUCCESS")
        assert lines[-1].startswith("1.2,REVERSED")

    def test_quality_command(self, annulus_on_disk, capsys):
        base, _ = annulus_on_disk
        assert main(["quality", "--mesh", base]) == 0
        out = capsys.readouterr().out
        assert "reversal_count = 0" in out

    def test_genmesh_annulus(self, tmp_path, capsys):
        out = str(tmp_path / "g")
        rc = main(
            ["genmesh", "annulus", "--r", "0.5", "--rings", "4", "--sectors", "16",
             "--out", out]
        )
        assert rc == 0
        mesh = io.read_mesh(out + ".node", out + ".ele")
        assert mesh.n_nodes == 64

    def test_error_path_single_line(self, tmp_path, annulus_on_disk, capsys):
        base, _ = annulus_on_disk
        spec = tmp_path / "bad.spec"
        spec.write_text("motion = teleport\n")
        rc = main(["warp", "--mesh", base, "--spec", str(spec), "--out", str(tmp_path / "o")])
        assert rc == 1
        err = capsys.readouterr().err.strip()
        assert err.startswith("error code=")
        assert "\n" not in err

    def test_missing_file_error(self, tmp_path, capsys):
        rc = main(
            ["quality", "--mesh", str(tmp_path / "nope")]
        )
        assert rc == 1
        assert "error code=" in capsys.readouterr().err

    def test_untangle_algorithm(self, tmp_path, annulus_on_disk):
        base, _ = annulus_on_disk
        spec = tmp_path / "u.spec"
        spec.write_text("motion = annulus\ntheta_outer = 0.2\nalgorithm = untangle\n")
        out = str(tmp_path / "o")
        rc = main(["warp", "--mesh", base, "--spec", str(spec), "--out", out])
        assert rc in (0, 2)

    def test_tabulated_frames(self, tmp_path, annulus_on_disk):
        base, mesh = annulus_on_disk
        frame = mesh.with_coords(mesh.coords * 1.05)
        fbase = str(tmp_path / "frame")
        io.write_mesh(frame, fbase + ".node", fbase + ".ele")
        spec = tmp_path / "t.spec"
        spec.write_text(f"motion = tabulated\nframes = {fbase}.node\n")
        out = str(tmp_path / "o")
        rc = main(["warp", "--mesh", base, "--spec", str(spec), "--out", out])
        assert rc == 0
        warped = io.read_mesh(out + ".node", out + ".ele")
        assert np.abs(warped.coords - mesh.coords * 1.05).max() < 1e-8
