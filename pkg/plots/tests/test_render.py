import numpy as np
import pytest

from plotrender.render import (
    SchemaError,
    build_heatmap_grid,
    load_rows,
    main,
    render,
    rho_order,
)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    return path


@pytest.fixture
def success_csv(tmp_path):
    rows = [
        ("cmaes", 1, n, rho, 5000, rate)
        for n, rates in ((2, (1.0, 0.9)), (5, (0.8, 0.4)))
        for rho, rate in zip(("None", "1.0"), rates)
    ]
    return write_csv(tmp_path / "success.csv",
                     "algorithm,fid,n,rho,budget,rate", rows)


def test_rho_order():
    assert rho_order(["1.0", "None", "0.001", "0.5"]) == \
        ["None", "0.001", "0.5", "1.0"]


def test_build_heatmap_grid_shape(success_csv):
    panels, dims, rhos = build_heatmap_grid(load_rows(success_csv))
    assert dims == [2, 5]
    assert rhos == ["None", "1.0"]
    grid = panels[("cmaes", "1")]
    assert grid.shape == (2, 2)
    assert grid[0, 0] == 1.0 and grid[1, 1] == 0.4


def test_render_heatmap(tmp_path, success_csv):
    out = tmp_path / "heat.png"
    render("heatmap", success_csv, out)
    assert out.stat().st_size > 0


def test_render_ecdf_single_group(tmp_path):
    path = write_csv(tmp_path / "ecdf.csv",
                     "algorithm,fid,n,rho,budget,fraction",
                     [("cmaes", 1, 5, "0.1", b, f)
                      for b, f in ((10, 0.1), (100, 0.5), (1000, 1.0))])
    out = tmp_path / "ecdf.png"
    render("ecdf", path, out)
    assert out.stat().st_size > 0


def test_render_ert_with_inf(tmp_path):
    path = write_csv(tmp_path / "ert.csv",
                     "algorithm,fid,n,rho,target,ert",
                     [("ga", 1, 5, "0.001", 1e-8, "inf"),
                      ("ga", 1, 5, "2.0", 1e-8, 150.0),
                      ("intea", 1, 5, "0.001", 1e-8, 2200.0),
                      ("intea", 1, 5, "2.0", 1e-8, 170.0)])
    out = tmp_path / "ert.png"
    render("ert", path, out)
    assert out.stat().st_size > 0


def test_render_landscape_1d_and_2d(tmp_path):
    xs = np.linspace(-5, 5, 21)
    path1 = write_csv(tmp_path / "land1.csv", "x1,f",
                      [(x, (x - 1.2) ** 2) for x in xs])
    out1 = tmp_path / "land1.png"
    render("landscape", path1, out1)
    assert out1.stat().st_size > 0

    rows = [(a, b, a * a + 2 * b * b) for a in xs for b in xs]
    path2 = write_csv(tmp_path / "land2.csv", "x1,x2,f", rows)
    out2 = tmp_path / "land2.png"
    render("landscape", path2, out2)
    assert out2.stat().st_size > 0


def test_landscape_best_found_overlay(tmp_path):
    xs = np.linspace(-5, 5, 11)
    grid = write_csv(tmp_path / "land.csv", "x1,x2,f",
                     [(a, b, a * a + b * b) for a in xs for b in xs])
    points = write_csv(tmp_path / "points.csv", "x1,x2,f",
                       [(0.4, -0.2, 0.2), (1.1, 0.3, 1.3)])
    out = tmp_path / "land.png"
    render("landscape", grid, out, points_path=points)
    assert out.stat().st_size > 0


def test_schema_error_names_missing_column(tmp_path):
    path = write_csv(tmp_path / "bad.csv", "algorithm,fid,n,budget,rate",
                     [("cmaes", 1, 5, 5000, 1.0)])
    with pytest.raises(SchemaError, match="rho"):
        render("heatmap", path, tmp_path / "x.png")


def test_empty_input_warns_and_skips(tmp_path):
    path = write_csv(tmp_path / "empty.csv",
                     "algorithm,fid,n,rho,budget,rate", [])
    out = tmp_path / "none.png"
    with pytest.warns(UserWarning):
        render("heatmap", path, out)
    assert not out.exists()


def test_cli_exit_codes(tmp_path, success_csv):
    out = tmp_path / "cli.png"
    assert main(["--kind", "heatmap", "--input", str(success_csv),
                 "--out", str(out)]) == 0
    assert out.exists()
    bad = write_csv(tmp_path / "bad.csv", "a,b", [(1, 2)])
    assert main(["--kind", "ecdf", "--input", str(bad),
                 "--out", str(tmp_path / "y.png")]) == 2


def test_rendering_deterministic(tmp_path, success_csv):
    out1 = tmp_path / "a.png"
    out2 = tmp_path / "b.png"
    render("heatmap", success_csv, out1)
    render("heatmap", success_csv, out2)
    assert out1.read_bytes() == out2.read_bytes()
