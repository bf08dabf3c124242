import json

import numpy as np
import pytest

from arctic_kernel import tiling as tl


def all_tilings(n):
    return tl.enumerate_tilings(n)


def test_cell_counts():
    for n in range(1, 7):
        cells = tl.aztec_cells(n)
        assert len(cells) == 2 * n * (n + 1)
        assert len(set(cells)) == len(cells)
        whites = sum(tl.cell_is_white(m, l, n) for m, l in cells)
        assert whites == n * (n + 1)


@pytest.mark.parametrize("n,count", [(1, 2), (2, 8), (3, 64), (4, 1024)])
def test_enumeration_counts(n, count):
    ts = all_tilings(n)
    assert len(ts) == count
    assert len(set(ts)) == count


@pytest.mark.parametrize("a", [1.0, 0.5, 2.0])
def test_partition_function_matches_enumeration(a):
    for n in (1, 2, 3):
        total = sum(tl.tiling_weight(t, a) for t in all_tilings(n))
        assert abs(total - tl.partition_function(n, a)) < 1e-9 * total


def test_classes_split_by_orientation():
    for t in all_tilings(2):
        for d in t.dominoes:
            cls = tl.domino_class(d, t.n)
            if d.orient == "h":
                assert cls in ("N", "S")
            else:
                assert cls in ("W", "E")


def test_tiling_validation():
    with pytest.raises(ValueError):
        tl.Tiling(1, [tl.Domino(-1, -1, "h")])
    with pytest.raises(ValueError):
        tl.Tiling(1, [tl.Domino(-1, -1, "h"), tl.Domino(-1, -1, "v"),
                      tl.Domino(0, -1, "v")])
    with pytest.raises(ValueError):
        tl.Tiling(1, [tl.Domino(5, 5, "h")])


def test_paths_small_diamond():
    horiz = tl.Tiling(1, [tl.Domino(-1, -1, "h"), tl.Domino(-1, 0, "h")])
    vert = tl.Tiling(1, [tl.Domino(-1, -1, "v"), tl.Domino(0, -1, "v")])
    assert tl.dr_path(horiz, 1) == [(-1, -0.5), (1, -0.5)]
    assert tl.dr_path(vert, 1) == [(-1, -0.5), (0, 0.5), (1, -0.5)]
    assert tl.particles(horiz)[0, 1] == 0
    assert tl.particles(vert)[0, 1] == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_paths_well_formed_everywhere(n):
    for t in all_tilings(n):
        paths = tl.dr_paths(t)
        assert len(paths) == n
        for r, p in enumerate(paths, start=1):
            assert p[0] == (-n - 1 + r, 0.5 - r)
            assert p[-1] == (n + 1 - r, 0.5 - r)
        # paths never share a vertex
        seen = set()
        for p in paths:
            for v in p:
                assert v not in seen
                seen.add(v)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_particle_structure(n):
    for t in all_tilings(n):
        arr = tl.particles(t)
        assert arr.shape == (n, 2 * n + 1)
        for k in range(1, n + 1):
            assert arr[k - 1, 0] == 1 - k
            assert arr[k - 1, 2 * n] == 1 - k
        for r in range(1, 2 * n):
            live = tl.line_particle_count(n, r)
            lo, hi = tl.line_window(n, r)
            col = arr[:, r]
            assert all(lo <= x <= hi for x in col[:live])
            assert all(col[i] > col[i + 1] for i in range(n - 1))
            assert all(col[live:] == [1 - k for k in range(live + 1, n + 1)])
        # interlacing along each path row: odd entries top, even bottom
        for k in range(1, n + 1):
            for j in range(1, n + 1):
                assert arr[k - 1, 2 * j - 1] >= arr[k - 1, 2 * j]
                assert arr[k - 1, 2 * j - 1] >= arr[k - 1, 2 * j - 2]


def test_top_particle_distribution_is_biased_measure():
    # P[x_1^1 = 1] should be a^2/(1+a^2): only the all-vertical order-1
    # tiling puts the top particle at 1
    for a in (1.0, 0.5, 2.0):
        p = sum(tl.tiling_probability(t, a) for t in all_tilings(1)
                if tl.particles(t)[0, 1] == 1)
        assert abs(p - a ** 2 / (1.0 + a ** 2)) < 1e-12


def test_boundary_position_matches_particles():
    for t in all_tilings(3):
        arr = tl.particles(t)
        for r in range(0, 7):
            assert tl.boundary_position(t, r) == arr[0, r]


def test_coordinate_round_trip():
    n = 5
    for p in [(0.0, 0.5), (-3.0, -1.5), (4.0, 2.5)]:
        q = tl.cs2_from_cs1(p, n)
        back = tl.cs1_from_cs2(q, n)
        assert back == p


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetries(n):
    swap = {"rot": {"N": "S", "S": "N", "W": "E", "E": "W"},
            "tr": {"N": "E", "E": "N", "S": "W", "W": "S"},
            "anti": {"N": "W", "W": "N", "S": "E", "E": "S"}}
    maps = {"rot": (tl.rot180, tl.rot180_domino),
            "tr": (tl.transpose, tl.transpose_domino),
            "anti": (tl.antitranspose, tl.antitranspose_domino)}
    for t in all_tilings(n):
        for name, (tmap, dmap) in maps.items():
            img = tmap(t)
            assert tmap(img) == t
            for d in t.dominoes:
                got = tl.domino_class(dmap(d), n)
                assert got == swap[name][tl.domino_class(d, n)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polar_regions_class_purity(n):
    for t in all_tilings(n):
        regions = tl.polar_regions(t)
        for corner, cls in (("north", "N"), ("south", "S"),
                            ("west", "W"), ("east", "E")):
            for d in regions[corner]:
                assert tl.domino_class(d, n) == cls
        counted = (len(regions["temperate"])
                   + len(set(regions["north"]) | set(regions["south"])
                         | set(regions["west"]) | set(regions["east"])))
        assert counted == len(t.dominoes)
        frac = tl.frozen_fraction(t)
        assert 0.0 <= frac <= 1.0


def test_polar_regions_order_one():
    horiz = tl.Tiling(1, [tl.Domino(-1, 0, "h"), tl.Domino(-1, -1, "h")])
    r = tl.polar_regions(horiz)
    assert r["north"] == [tl.Domino(-1, 0, "h")]
    assert r["south"] == [tl.Domino(-1, -1, "h")]
    assert r["west"] == r["east"] == r["temperate"] == []
    vert = tl.Tiling(1, [tl.Domino(-1, -1, "v"), tl.Domino(0, -1, "v")])
    r = tl.polar_regions(vert)
    assert len(r["west"]) == 1 and len(r["east"]) == 1
    assert r["north"] == r["south"] == r["temperate"] == []


@pytest.mark.parametrize("n", [1, 2, 3])
def test_north_region_is_above_first_path(n):
    for t in all_tilings(n):
        regions = tl.polar_regions(t)
        above = tl.dominoes_above_boundary(t)
        assert set(regions["north"]) == set(above)
        for d in above:
            assert tl.domino_class(d, n) == "N"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boundary_process_profile(n):
    for t in all_tilings(n):
        bp = tl.boundary_process(tl.particles(t), n)
        assert bp(-n) == pytest.approx(-0.5)
        assert bp(n) == pytest.approx(-0.5)
        path = tl.dr_path(t, 1)
        for x, y in path:
            assert bp(x) == pytest.approx(y)
        for (x0, y0), (x1, y1) in zip(path, path[1:]):
            assert bp((x0 + x1) / 2) == pytest.approx((y0 + y1) / 2)


def test_boundary_process_order_one():
    horiz = tl.Tiling(1, [tl.Domino(-1, 0, "h"), tl.Domino(-1, -1, "h")])
    bp = tl.boundary_process(tl.particles(horiz), 1)
    for x in np.linspace(-1.0, 1.0, 9):
        assert bp(x) == pytest.approx(-0.5)
    vert = tl.Tiling(1, [tl.Domino(-1, -1, "v"), tl.Domino(0, -1, "v")])
    bp = tl.boundary_process(tl.particles(vert), 1)
    assert bp(0.0) == pytest.approx(0.5)
    assert bp(-0.5) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        bp(1.5)


def test_grid_round_trip():
    for t in all_tilings(3):
        g = tl.grid_from_tiling(t)
        assert tl.tiling_from_grid(g, 3) == t


def test_boundary_position_grid_agrees():
    for t in all_tilings(3):
        g = tl.grid_from_tiling(t)
        arr = tl.particles(t)
        for r in range(0, 7):
            assert tl.boundary_position_grid(g, 3, r) == arr[0, r]


def test_json_round_trip():
    for t in all_tilings(2):
        doc = tl.tiling_to_json(t, a=0.7)
        parsed = json.loads(doc)
        assert parsed["n"] == 2
        assert parsed["a"] == 0.7
        assert tl.tiling_from_json(doc) == t
    bad = json.loads(tl.tiling_to_json(all_tilings(1)[0]))
    bad["dominoes"][0]["class"] = "X"
    with pytest.raises(ValueError):
        tl.tiling_from_json(json.dumps(bad))


def test_particle_csv_shape():
    t = all_tilings(2)[0]
    text = tl.particles_to_csv(t)
    lines = text.strip().split("\n")
    assert lines[0] == "line,rank,position"
    # lines 1..3 carry 2, 2, 1 live particles
    assert len(lines) - 1 == 5


def test_svg_smoke():
    t = all_tilings(2)[3]
    svg = tl.tiling_to_svg(t)
    assert svg.startswith("<svg")
    assert svg.count("<rect") == len(t.dominoes)
    assert "<polyline" in svg
