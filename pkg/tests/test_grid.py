import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from czlab.grid import (
    Box,
    Cube,
    CubeFamily,
    DyadicCube,
    GridFunction,
    GridMismatchError,
    ResolutionError,
    cube_average,
    dilate_cube,
    enumerate_cubes,
    read_grid,
    write_grid,
)


def test_box_validation():
    with pytest.raises(ValueError):
        Box(3, 1.0)
    with pytest.raises(ValueError):
        Box(1, 0.0)


def test_centers_are_cell_midpoints():
    box = Box(1, 2.0)
    c = box.centers(3)
    assert c.size == 8
    assert np.allclose(c, -2.0 + 0.25 + 0.5 * np.arange(8))
    assert np.allclose(c, -c[::-1])
    assert box.cell_width(3) == 0.5


def test_grid_function_is_read_only():
    f = GridFunction.constant(Box(), 3, 1.0)
    with pytest.raises(ValueError):
        f.samples[0] = 2.0


def test_grid_function_rejects_bad_samples():
    with pytest.raises(GridMismatchError):
        GridFunction(Box(), 3, np.zeros(7))
    with pytest.raises(ValueError):
        GridFunction(Box(), 1, [1.0, np.nan])


def test_binary_ops_require_same_grid():
    f = GridFunction.constant(Box(), 3, 1.0)
    g = GridFunction.constant(Box(), 4, 1.0)
    with pytest.raises(GridMismatchError):
        f + g


def test_negative_base_needs_integer_power():
    f = GridFunction(Box(), 1, [-1.0, 2.0])
    assert np.allclose(f.power(2).samples, [1.0, 4.0])
    with pytest.raises(ValueError):
        f.power(0.5)


def test_integral_is_midpoint_sum():
    box = Box(1, 1.0)
    f = GridFunction.from_function(box, 10, lambda x: x * x)
    h = box.cell_width(10)
    assert f.integral() == pytest.approx(np.sum(box.centers(10) ** 2) * h, rel=1e-14)
    assert f.integral() == pytest.approx(2.0 / 3.0, rel=1e-5)


@settings(max_examples=60, deadline=None)
@given(
    dim=st.sampled_from([1, 2]),
    level=st.integers(0, 4),
    seed=st.integers(0, 2**31 - 1),
)
def test_cube_average_matches_direct_summation(dim, level, seed):
    box = Box(dim, 1.5)
    L = 5
    rng = np.random.default_rng(seed)
    f = GridFunction(box, L, rng.normal(size=(2**L,) * dim))
    idx = tuple(int(i) for i in rng.integers(0, 2**level, dim))
    q = DyadicCube(box, level, idx)
    coords = box.mesh(L)
    inside = np.ones(f.samples.shape, dtype=bool)
    for ax, (lo, hi) in enumerate(zip(q.as_cube().lower, q.as_cube().upper)):
        inside &= (coords[ax] >= lo) & (coords[ax] < hi)
    total = 0.0
    count = 0
    for k in zip(*np.nonzero(inside)):
        total += f.samples[k]
        count += 1
    direct = total / count
    assert abs(cube_average(f, q) - direct) <= 1e-12 * max(1.0, abs(direct))
    # the same cube given as plain geometry
    assert abs(cube_average(f, q.as_cube()) - direct) <= 1e-12 * max(1.0, abs(direct))


def test_nested_averages_compose(rng):
    box = Box(2, 1.0)
    f = GridFunction(box, 5, rng.normal(size=(32, 32)))
    q = DyadicCube(box, 2, (1, 3))
    kids = [cube_average(f, c) for c in q.children()]
    assert cube_average(f, q) == pytest.approx(np.mean(kids), rel=1e-13)


def test_dyadic_cube_geometry():
    box = Box(1, 2.0)
    q = DyadicCube(box, 2, (3,))
    assert q.side == 1.0
    assert q.corner == (1.0,)
    assert q.contains((1.5,)) and not q.contains((0.5,))
    with pytest.raises(ValueError):
        DyadicCube(box, 2, (4,))


def test_cube_finer_than_grid_raises():
    box = Box(1, 1.0)
    f = GridFunction.constant(box, 3, 1.0)
    with pytest.raises(ResolutionError):
        cube_average(f, DyadicCube(box, 4, (0,)))
    with pytest.raises(ResolutionError):
        cube_average(f, Cube((0.01,), (0.02,)))


def test_dilation_is_concentric_and_clipped():
    box = Box(1, 2.0)
    q = DyadicCube(box, 2, (1,))  # [-1, 0)
    d = dilate_cube(q, 3.0)
    assert d.lower == (-2.0,) and d.upper == (1.0,)
    edge = dilate_cube(DyadicCube(box, 2, (0,)), 3.0)
    assert edge.lower == (-2.0,) and edge.upper == (0.0,)
    with pytest.raises(ValueError):
        dilate_cube(q, 1.0)


def test_family_enumeration_counts():
    fam = enumerate_cubes(Box(2, 1.0), 3)
    assert fam.count == 1 + 4 + 16 + 64
    assert len(fam.all_cubes()) == 2 * fam.count
    assert len(CubeFamily(Box(1, 1.0), 3, None).all_cubes()) == 15
    with pytest.raises(ValueError):
        CubeFamily(Box(1, 1.0), 2, 2.0)


def test_family_finer_than_grid_raises():
    box = Box(1, 1.0)
    fam = CubeFamily(box, 5)
    f = GridFunction.constant(box, 4, 1.0)
    with pytest.raises(ResolutionError):
        fam.stats(lambda m, x: x.sum(axis=-1), f)


@pytest.mark.parametrize("encoding", ["csv", "raw"])
@pytest.mark.parametrize("dim", [1, 2])
def test_serialization_round_trip(encoding, dim, rng, tmp_path):
    box = Box(dim, 0.75)
    f = GridFunction(box, 3, rng.normal(size=(8,) * dim))
    path = tmp_path / "f.grid"
    write_grid(f, path, encoding)
    g = read_grid(path)
    assert g.box == box and g.levels == 3
    assert np.array_equal(g.samples, f.samples)
    buf = io.BytesIO()
    write_grid(f, buf, encoding)
    buf.seek(0)
    assert np.array_equal(read_grid(buf).samples, f.samples)


def test_csv_with_missing_rows_is_rejected():
    f = GridFunction.constant(Box(), 2, 1.0)
    buf = io.BytesIO()
    write_grid(f, buf, "csv")
    lines = buf.getvalue().decode().splitlines()
    broken = "\n".join(lines[:-1]) + "\n"
    with pytest.raises(ValueError):
        read_grid(io.BytesIO(broken.encode()))
    with pytest.raises(ValueError):
        write_grid(f, io.BytesIO(), "hdf5")
