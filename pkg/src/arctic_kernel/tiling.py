"""Aztec diamond geometry, domino tilings, path and particle extraction.

Cell (m, l) is the unit square [m, m+1] x [l, l+1].  The order-n diamond is
the set of 2n(n+1) cells with halfwidth(m) + halfwidth(l) <= n + 1, and a
cell is white when m + l + n is even.  Horizontal dominoes anchor at their
left cell, vertical ones at their bottom cell.  The four classes are

    N   horizontal, left cell white
    S   horizontal, left cell black
    W   vertical, top cell white
    E   vertical, top cell black

Under the growth step in `shuffling`, N moves up, S down, W west and E east,
and a domino keeps its class while the diamond grows around it.

The zig-zag paths: path r (r = 1..n) runs from (-n-1+r, 1/2-r) to
(n+1-r, 1/2-r).  An S domino carries a flat step of length two, W a rising
diagonal, E a falling diagonal; N dominoes carry nothing and lie strictly
above path 1.  In the rotated coordinates (`cs2_from_cs1`) the paths become
lattice paths with steps (1,0), (0,-1), (1,-1), and reading off the top and
bottom visit of each column yields the interlaced particle array.
"""

import json
from collections import namedtuple

import numpy as np

Domino = namedtuple("Domino", ["x", "y", "orient"])

CLASS_NAMES = ("N", "S", "W", "E")

# anchor-cell codes used by the int8 grid representation
GRID_EMPTY, GRID_N, GRID_S, GRID_W, GRID_E = 0, 1, 2, 3, 4
_CODE_OF_CLASS = {"N": GRID_N, "S": GRID_S, "W": GRID_W, "E": GRID_E}
_CLASS_OF_CODE = {v: k for k, v in _CODE_OF_CLASS.items()}


def halfwidth(t):
    return t + 1 if t >= 0 else -t


def cell_in_diamond(m, l, n):
    return halfwidth(m) + halfwidth(l) <= n + 1


def cell_is_white(m, l, n):
    return (m + l + n) % 2 == 0


def aztec_cells(n):
    """All cells of the order-n diamond, sorted by (l, m)."""
    cells = []
    for l in range(-n - 1, n + 1):
        for m in range(-n - 1, n + 1):
            if cell_in_diamond(m, l, n):
                cells.append((m, l))
    return cells


def domino_cells(d):
    if d.orient == "h":
        return (d.x, d.y), (d.x + 1, d.y)
    return (d.x, d.y), (d.x, d.y + 1)


def domino_class(d, n):
    """N/S for horizontal, W/E for vertical, from the coloring at order n."""
    if d.orient == "h":
        return "N" if cell_is_white(d.x, d.y, n) else "S"
    return "W" if cell_is_white(d.x, d.y + 1, n) else "E"


class Tiling:
    """A perfect domino tiling of the order-n diamond.

    Construction validates the partition: every listed domino must sit inside
    the diamond and every cell must be covered exactly once.
    """

    def __init__(self, n, dominoes):
        if n < 1:
            raise ValueError("diamond order must be at least 1")
        self.n = n
        self.dominoes = tuple(sorted(Domino(int(d[0]), int(d[1]), d[2])
                                     for d in dominoes))
        cover = {}
        for d in self.dominoes:
            if d.orient not in ("h", "v"):
                raise ValueError("bad orientation %r" % (d.orient,))
            for c in domino_cells(d):
                if not cell_in_diamond(c[0], c[1], n):
                    raise ValueError("cell %s outside order-%d diamond" % (c, n))
                if c in cover:
                    raise ValueError("cell %s covered twice" % (c,))
                cover[c] = d
        if len(cover) != 2 * n * (n + 1):
            raise ValueError("not a perfect tiling: %d cells covered"
                             % len(cover))
        self._cover = cover

    def domino_at(self, m, l):
        return self._cover[(m, l)]

    def vertical_count(self):
        return sum(1 for d in self.dominoes if d.orient == "v")

    def key(self):
        return self.dominoes

    def __eq__(self, other):
        return (isinstance(other, Tiling) and self.n == other.n
                and self.dominoes == other.dominoes)

    def __hash__(self):
        return hash((self.n, self.dominoes))

    def __repr__(self):
        return "Tiling(n=%d, %d dominoes)" % (self.n, len(self.dominoes))


def enumerate_tilings(n):
    """Every tiling of the order-n diamond, by backtracking.

    Exponential in n (2, 8, 64, 1024, ... tilings); this is the exactness
    oracle behind the small-n tests, usable up to n = 4 or 5.
    """
    cells = aztec_cells(n)
    index = {c: i for i, c in enumerate(cells)}
    covered = [False] * len(cells)
    placed = []
    out = []

    def fill(lo):
        while lo < len(cells) and covered[lo]:
            lo += 1
        if lo == len(cells):
            out.append(Tiling(n, placed))
            return
        m, l = cells[lo]
        covered[lo] = True
        mate = index.get((m + 1, l))
        if mate is not None and not covered[mate]:
            covered[mate] = True
            placed.append(Domino(m, l, "h"))
            fill(lo + 1)
            placed.pop()
            covered[mate] = False
        mate = index.get((m, l + 1))
        if mate is not None and not covered[mate]:
            covered[mate] = True
            placed.append(Domino(m, l, "v"))
            fill(lo + 1)
            placed.pop()
            covered[mate] = False
        covered[lo] = False

    fill(0)
    return out


def tiling_weight(t, a):
    """Unnormalized weight a^(number of vertical dominoes)."""
    return float(a) ** t.vertical_count()


def partition_function(n, a):
    """Total weight (1 + a^2)^(n(n+1)/2); the enumeration tests verify it."""
    return (1.0 + float(a) ** 2) ** (n * (n + 1) // 2)


def tiling_probability(t, a):
    return tiling_weight(t, a) / partition_function(t.n, a)


# ---------------------------------------------------------------------------
# paths and particles


def _walk_path(t, r):
    """Internal zig-zag walk of path r; yields integer vertices (x, k)
    standing for the point (x, k + 1/2)."""
    n = t.n
    if not 1 <= r <= n:
        raise ValueError("path index %d outside 1..%d" % (r, n))
    x, k = -n - 1 + r, -r
    verts = [(x, k)]
    while x < n + 1 - r:
        d = t.domino_at(x, k)
        cls = domino_class(d, n)
        if cls == "S" and (d.x, d.y) == (x, k):
            x += 2
        elif cls == "W" and (d.x, d.y) == (x, k):
            x += 1
            k += 1
        elif cls == "E" and (d.x, d.y) == (x, k - 1):
            x += 1
            k -= 1
        else:
            raise AssertionError("path %d derailed at (%d, %d): hit %s/%s"
                                 % (r, x, k, d, cls))
        verts.append((x, k))
    if (x, k) != (n + 1 - r, -r):
        raise AssertionError("path %d ended at (%d, %d)" % (r, x, k))
    return verts


def dr_path(t, r):
    """Vertices of path r as (x, y) with half-integer y, west to east."""
    return [(x, k + 0.5) for x, k in _walk_path(t, r)]


def dr_paths(t):
    return [dr_path(t, r) for r in range(1, t.n + 1)]


def cs2_from_cs1(p, n):
    """Map a point of the square lattice picture to the rotated picture."""
    x1, y1 = p
    return ((x1 + y1 + n + 0.5) / 2.0, (y1 - x1 - n + 0.5) / 2.0)


def cs1_from_cs2(p, n):
    x2, y2 = p
    return (x2 - y2 - n, x2 + y2 - 0.5)


def _path_cs2(t, r):
    """Path r in rotated coordinates, extended diagonally out to column n."""
    n = t.n
    verts = []
    for x, k in _walk_path(t, r):
        # exact integer version of cs2_from_cs1 at the half-integer vertex
        verts.append(((x + k + n + 1) // 2, (k + 1 - x - n) // 2))
    vx, vy = verts[-1]
    while vx < n:
        vx += 1
        vy -= 1
        verts.append((vx, vy))
    return verts


def particles(t):
    """Interlaced particle array, shape (n, 2n+1): row k-1, column r holds
    the line-r record of path k.

    Columns 0 and 2n always hold 1-k.  On line r only the first
    n + 1 - ceil(r/2) rows are live particles of the point process; the
    remaining rows sit frozen at 1-k below the window.
    """
    n = t.n
    out = np.zeros((n, 2 * n + 1), dtype=np.int64)
    for k in range(1, n + 1):
        verts = _path_cs2(t, k)
        top = {}
        bot = {}
        for vx, vy in verts:
            if vx not in top or vy > top[vx]:
                top[vx] = vy
            if vx not in bot or vy < bot[vx]:
                bot[vx] = vy
        out[k - 1, 0] = bot[0]
        for j in range(1, n + 1):
            out[k - 1, 2 * j - 1] = top[j] + j
            out[k - 1, 2 * j] = bot[j] + j
    return out


def line_particle_count(n, r):
    """Number of live particles on line r (1 <= r <= 2n)."""
    return n + 1 - (r + 1) // 2


def line_window(n, r):
    """Inclusive position range (lo, hi) of line r that the live particles
    can reach; hi = ceil(r/2), lo = hi - n."""
    hi = (r + 1) // 2
    return hi - n, hi


def particles_on_line(t, r):
    """Live particle positions on line r, in decreasing order."""
    n = t.n
    if not 1 <= r <= 2 * n:
        raise ValueError("line %d outside 1..%d" % (r, 2 * n))
    return list(particles(t)[:line_particle_count(n, r), r])


def boundary_position(t, r):
    """Top particle x_1^r, extracted by walking only the first path."""
    n = t.n
    if not 0 <= r <= 2 * n:
        raise ValueError("line %d outside 0..%d" % (r, 2 * n))
    verts = _path_cs2(t, 1)
    j = (r + 1) // 2
    ys = [vy for vx, vy in verts if vx == j]
    return (max(ys) if r % 2 else min(ys)) + j


class BoundaryProcess:
    """Piecewise-linear profile t -> X_n(t) of the top frozen-region edge,
    |t| <= n, stored as the ordered vertex list of the first DR path."""

    def __init__(self, n, vertices):
        self.n = n
        self.vertices = tuple((float(x), float(y)) for x, y in vertices)
        if len(self.vertices) != 2 * n + 1:
            raise ValueError("expected %d vertices, got %d"
                             % (2 * n + 1, len(self.vertices)))
        for (x0, _), (x1, _) in zip(self.vertices, self.vertices[1:]):
            if x1 < x0:
                raise ValueError("vertex abscissas must be nondecreasing")
        if self.vertices[0] != (-n, -0.5) or self.vertices[-1] != (n, -0.5):
            raise ValueError("profile must run from (-n,-1/2) to (n,-1/2)")
        xs, ys = [], []
        for x, y in self.vertices:
            if xs and x == xs[-1]:
                continue
            xs.append(x)
            ys.append(y)
        self._xs = np.asarray(xs)
        self._ys = np.asarray(ys)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -self.n) or np.any(t > self.n):
            raise ValueError("abscissa outside [-n, n]")
        return np.interp(t, self._xs, self._ys)[()]


def boundary_process(config, n):
    """Build the top-edge profile from row 1 of a particle array.

    Vertex j of the upper hull sits at (2j - x - n, x - 1/2) where x runs
    through the line records x_1^1, x_1^2, ..., alternating entry and exit
    values of path 1 in each column.
    """
    row = np.asarray(config)[0]
    if row.shape != (2 * n + 1,):
        raise ValueError("config row 0 must have length %d" % (2 * n + 1))
    verts = [(-row[0] - n, row[0] - 0.5)]
    for j in range(1, n + 1):
        verts.append((2 * j - row[2 * j - 1] - n, row[2 * j - 1] - 0.5))
        verts.append((2 * j - row[2 * j] - n, row[2 * j] - 0.5))
    return BoundaryProcess(n, verts)


# ---------------------------------------------------------------------------
# symmetries and frozen regions


def rot180_domino(d):
    if d.orient == "h":
        return Domino(-2 - d.x, -1 - d.y, "h")
    return Domino(-1 - d.x, -2 - d.y, "v")


def transpose_domino(d):
    return Domino(d.y, d.x, "v" if d.orient == "h" else "h")


def antitranspose_domino(d):
    if d.orient == "h":
        return Domino(-1 - d.y, -2 - d.x, "v")
    return Domino(-2 - d.y, -1 - d.x, "h")


def rot180(t):
    return Tiling(t.n, [rot180_domino(d) for d in t.dominoes])


def transpose(t):
    return Tiling(t.n, [transpose_domino(d) for d in t.dominoes])


def antitranspose(t):
    return Tiling(t.n, [antitranspose_domino(d) for d in t.dominoes])


def _first_path_profile(t):
    """prof[x] = k: path 1 passes through (x, k + 1/2), for x = -n..n."""
    n = t.n
    prof = {}
    verts = _walk_path(t, 1)
    for (x0, k0), (x1, k1) in zip(verts, verts[1:]):
        prof[x0] = k0
        if x1 - x0 == 2:
            prof[x0 + 1] = k0
    prof[verts[-1][0]] = verts[-1][1]
    return prof


def dominoes_above_boundary(t):
    """Dominoes lying strictly above path 1.  Cross-check partner for the
    north polar region."""
    prof = _first_path_profile(t)

    def cell_above(m, l):
        return l >= max(prof[m], prof[m + 1]) + 1

    return [d for d in t.dominoes
            if all(cell_above(*c) for c in domino_cells(d))]


_REGION_OF_CLASS = {"N": "north", "S": "south", "W": "west", "E": "east"}


def polar_regions(t):
    """Split into the four frozen corner regions plus the temperate rest.

    A domino belongs to the region named after its class when a chain of
    edge-adjacent dominoes of that same class links it to the rim of the
    diamond; whatever is left over is temperate.  Returned dict maps
    'north'/'south'/'west'/'east'/'temperate' to lists of dominoes.
    """
    n = t.n
    cls = {d: domino_class(d, n) for d in t.dominoes}
    seeds = []
    for d in t.dominoes:
        for m, l in domino_cells(d):
            if any(not cell_in_diamond(m + dm, l + dl, n)
                   for dm, dl in ((1, 0), (-1, 0), (0, 1), (0, -1))):
                seeds.append(d)
                break
    frozen = set()
    queue = [d for d in seeds]
    frozen.update(queue)
    while queue:
        d = queue.pop()
        for m, l in domino_cells(d):
            for dm, dl in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nb = t._cover.get((m + dm, l + dl))
                if nb is not None and nb not in frozen and cls[nb] == cls[d]:
                    frozen.add(nb)
                    queue.append(nb)
    out = {"north": [], "south": [], "west": [], "east": [], "temperate": []}
    for d in t.dominoes:
        out[_REGION_OF_CLASS[cls[d]] if d in frozen else "temperate"].append(d)
    return out


def frozen_fraction(t):
    regions = polar_regions(t)
    return 1.0 - len(regions["temperate"]) / len(t.dominoes)


# ---------------------------------------------------------------------------
# grid representation (shared with the shuffling backends)


def grid_offset(n):
    return n + 1


def empty_grid(n):
    s = 2 * n + 2
    return np.zeros((s, s), dtype=np.int8)


def grid_from_tiling(t):
    """int8 grid with the class code at each anchor cell, 0 elsewhere."""
    n = t.n
    g = empty_grid(n)
    off = grid_offset(n)
    for d in t.dominoes:
        g[d.x + off, d.y + off] = _CODE_OF_CLASS[domino_class(d, n)]
    return g


def tiling_from_grid(g, n):
    off = grid_offset(n)
    doms = []
    for i, j in np.argwhere(g > 0):
        orient = "h" if g[i, j] in (GRID_N, GRID_S) else "v"
        doms.append(Domino(int(i) - off, int(j) - off, orient))
    t = Tiling(n, doms)
    for d in t.dominoes:
        code = g[d.x + off, d.y + off]
        if _CLASS_OF_CODE[int(code)] != domino_class(d, n):
            raise ValueError("grid class code disagrees with the coloring "
                             "at %s" % (d,))
    return t


def boundary_position_grid(g, n, r):
    """x_1^r straight from a grid, without building a Tiling.

    Walks path 1 with O(n) grid probes; this is the per-sample extraction
    used by the Monte Carlo boundary command.
    """
    if not 0 <= r <= 2 * n:
        raise ValueError("line %d outside 0..%d" % (r, 2 * n))
    off = grid_offset(n)
    j = (r + 1) // 2
    x, k = -n, -1
    ys = []
    while True:
        # rotated coordinates of the vertex (x, k + 1/2)
        if (x + k + n + 1) // 2 == j:
            ys.append((k + 1 - x - n) // 2 + j)
        if x >= n:
            break
        c = int(g[x + off, k + off])
        if c == GRID_S:
            x += 2
        elif c == GRID_W:
            x += 1
            k += 1
        elif int(g[x + off, k - 1 + off]) == GRID_E:
            x += 1
            k -= 1
        else:
            raise AssertionError("path walk derailed at (%d, %d)" % (x, k))
    return max(ys) if r % 2 else min(ys)


# ---------------------------------------------------------------------------
# serialization


def tiling_to_json(t, a=1.0):
    doc = {
        "n": t.n,
        "a": float(a),
        "dominoes": [
            {"x": d.x, "y": d.y, "orient": d.orient,
             "class": domino_class(d, t.n)}
            for d in t.dominoes
        ],
    }
    return json.dumps(doc)


def tiling_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else text
    t = Tiling(doc["n"], [Domino(d["x"], d["y"], d["orient"])
                          for d in doc["dominoes"]])
    for d in doc["dominoes"]:
        want = domino_class(Domino(d["x"], d["y"], d["orient"]), t.n)
        if d.get("class", want) != want:
            raise ValueError("class %r recorded for %s, expected %s"
                             % (d["class"], (d["x"], d["y"]), want))
    return t


def particles_to_csv(t):
    arr = particles(t)
    n = t.n
    rows = ["line,rank,position"]
    for r in range(1, 2 * n):
        for k in range(line_particle_count(n, r)):
            rows.append("%d,%d,%d" % (r, k + 1, arr[k, r]))
    return "\n".join(rows) + "\n"


_SVG_FILL = {"N": "#e15759", "S": "#4e79a7", "W": "#f1ce63", "E": "#59a14f"}


def tiling_to_svg(t, show_paths=True, scale=14):
    """Standalone SVG drawing, one rectangle per domino, classes color-coded,
    optionally with the zig-zag paths drawn on top."""
    n = t.n
    pad = 2
    span = (2 * n + 2 + 2 * pad) * scale

    def sx(x):
        return (x + n + 1 + pad) * scale

    def sy(y):
        return span - (y + n + 1 + pad) * scale

    parts = ['<svg xmlns="http://www.w3.org/2000/svg" '
             'width="%d" height="%d" viewBox="0 0 %d %d">'
             % (span, span, span, span)]
    for d in t.dominoes:
        w, h = (2, 1) if d.orient == "h" else (1, 2)
        parts.append(
            '<rect x="%g" y="%g" width="%g" height="%g" fill="%s" '
            'stroke="#202020" stroke-width="1"/>'
            % (sx(d.x), sy(d.y + h), w * scale, h * scale,
               _SVG_FILL[domino_class(d, n)]))
    if show_paths:
        for path in dr_paths(t):
            pts = " ".join("%g,%g" % (sx(x), sy(y)) for x, y in path)
            parts.append('<polyline points="%s" fill="none" stroke="#101010" '
                         'stroke-width="2"/>' % pts)
    parts.append("</svg>")
    return "\n".join(parts)
