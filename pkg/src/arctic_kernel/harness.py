"""Command-line driver: sampling artifacts, gap and boundary statistics,
center statistics, Monte Carlo experiments, and the invariant suites.

Every command emits one JSON report with a versioned schema.  The numeric
payload is a pure function of the embedded parameters (samplers are
counter-seeded), so any report can be reproduced by feeding its own
parameters back; CSV and SVG are renderings of the same computed payload,
produced after the numbers are final.
"""

import argparse
import functools
import itertools
import json
import math
import sys
from collections import namedtuple
from fractions import Fraction

import numpy as np

from . import __version__
from . import airy
from . import center as ct
from . import extended_kernel as ek
from . import krawtchouk as kw
from . import numerics as nm
from . import shuffling as sh
from . import tiling as tl

SCHEMA = "arctic-kernel/1"

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3

# Site families for the finite-to-plane convergence table: all offsets
# within 2, at most three sites, each measured strictly decreasing over
# the tested orders (sites whose finite-order law ties the plane value
# exactly, or oscillates with order parity, are deliberately absent; see
# the single-site ties used by suite_propp's sampling rows instead).
PROPP_FAMILIES = (
    ((1, 1),), ((-1, 1),), ((0, -2),),
    ((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 0), (-1, 1)),
    ((0, -1), (1, 1)),
    ((0, 0), (1, 0), (0, 1)), ((-1, -1), (0, 0), (2, 1)),
    ((0, 0), (1, 0), (2, 0)),
)
PROPP_ORDERS = (51, 101, 201)

# Sampling cross-check sites at order 101: chosen where the order-101 law
# equals the plane value exactly, so the binomial band tests the sampler
# and not finite-size bias.
MC_GREEN_SITES = (((1, 0),), ((0, -1),), ((-1, 0), (1, 0)))
MC_GREEN_ORDER = 101

StatsRecord = namedtuple("StatsRecord", ["value", "stderr", "count", "meta"])


# ---------------------------------------------------------------------------
# argument parsing helpers


def _floats(text):
    try:
        return [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise ValueError("expected comma-separated numbers, got %r" % text)


def _ints(text):
    vals = _floats(text)
    out = [int(v) for v in vals]
    if any(i != v for i, v in zip(out, vals)):
        raise ValueError("expected integers, got %r" % text)
    return out


def _site_list(text):
    sites = []
    for chunk in text.split(";"):
        if chunk.strip() == "":
            continue
        pair = _ints(chunk)
        if len(pair) != 2:
            raise ValueError("each site is one u,l pair; got %r" % chunk)
        sites.append((pair[0], pair[1]))
    return sites


# ---------------------------------------------------------------------------
# shared numeric plumbing


@functools.lru_cache(maxsize=1)
def _f2_table():
    """Dense grid of the one-time limit law, built once per run."""
    xs = np.linspace(-8.0, 5.0, 521)
    vals = np.array([airy.tracy_widom_f2(x, nodes=96) for x in xs])
    return xs, vals


def _f2_cdf(points):
    xs, vals = _f2_table()
    return np.interp(np.asarray(points, dtype=float), xs, vals)


def _ks_to_f2(samples):
    s = np.sort(np.asarray(samples, dtype=float))
    cdf = _f2_cdf(s)
    i = np.arange(1, s.size + 1)
    return float(np.max(np.maximum(cdf - (i - 1) / s.size, i / s.size - cdf)))


def _line_tau(n, line):
    """Scaled time of a lattice line, by inverting the affine line map."""
    base = ek.scaling_line(n, 0.0)
    return (line - base) / (ek.scaling_line(n, 1.0) - base)


def _nearest_line(n, tau, parity):
    """Nearest lattice line of the given parity to the scaled time tau."""
    real = ek.scaling_line(n, tau)
    below = int(math.floor(real))
    if below % 2 != parity:
        below -= 1
    line = below if real - below <= below + 2 - real else below + 2
    if not 1 <= line <= 2 * n - 1:
        raise ValueError("scaled time %g leaves the line range at n=%d"
                         % (tau, n))
    return line


def _panel_integral(fn, lo, hi, panel=1.0):
    total = 0.0
    edges = np.arange(lo, hi, panel)
    edges = np.append(edges, hi)
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = nm.gauss_legendre_on(a, b, 48)
        total += float(np.dot(w, fn(x)))
    return total


# ---------------------------------------------------------------------------
# commands


def cmd_sample(n, a=1.0, seed=0, index=0):
    t = sh.sample_tiling(n, a, seed, index)
    regions = tl.polar_regions(t)
    frozen = sum(len(regions[k]) for k in ("north", "south", "west", "east"))
    payload = {
        "tiling": json.loads(tl.tiling_to_json(t, a)),
        "region_dominoes": {k: len(v) for k, v in regions.items()},
        "frozen_fraction": frozen / len(t.dominoes),
        "backend": sh.backend_name(),
    }
    return payload, t


def cmd_gap(n, lines, thresholds, a=1.0, tol=None):
    kwargs = {} if tol is None else {"tol": tol}
    prm = ek.AztecKernelParams(n, a, **kwargs)
    value = ek.gap_probability(ek.GapSpec(lines, thresholds), prm)
    return {"probability": value, "lines": list(lines),
            "thresholds": list(thresholds)}


def cmd_tw2(gammas):
    rows = [{"gamma": g, "f2": airy.tracy_widom_f2(g)} for g in gammas]
    return {"table": rows}


def cmd_airy_fdd(taus, gammas):
    value = airy.airy_fdd(airy.FddSpec(tuple(taus), tuple(gammas)))
    return {"probability": value, "times": list(taus),
            "levels": list(gammas)}


def cmd_center(sites, n, a=1.0):
    plane = ct.green_prob_plane(sites)
    aztec = ct.green_prob_aztec(sites, n, a)
    return {"plane": plane, "aztec": aztec,
            "difference": abs(aztec - plane), "sites": [list(s) for s in sites]}


def cmd_boundary_fdd(n, taus, gammas, tol=None):
    """Finite-order probability that the boundary stays below the given
    levels at the given scaled times, next to its limit value.

    Each time lands on the nearest odd lattice line and each level on the
    floor lattice threshold; the realized (time, level) pairs after this
    rounding are reported and the limit is evaluated at them.
    """
    if len(taus) != len(gammas):
        raise ValueError("need as many levels as times")
    if not taus:
        raise ValueError("need at least one time")
    lines, thresholds, t_hats, g_hats = [], [], [], []
    unit = ek.scaling_unit(n)
    for tau, gamma in zip(taus, gammas):
        line = _nearest_line(n, tau, parity=1)
        t_hat = _line_tau(n, line)
        center = ek.scaling_center(n, t_hat)
        x = int(math.floor(center + unit * gamma))
        lines.append(line)
        thresholds.append(x)
        t_hats.append(t_hat)
        g_hats.append((x - center) / unit)
    kwargs = {} if tol is None else {"tol": tol}
    finite = ek.gap_probability(ek.GapSpec(lines, thresholds),
                                ek.AztecKernelParams(n, 1.0, **kwargs))
    limit = airy.airy_fdd(airy.FddSpec(tuple(t_hats), tuple(g_hats)))
    return {
        "lines": lines, "thresholds": thresholds,
        "realized_times": t_hats, "realized_levels": g_hats,
        "finite": finite, "limit": limit,
        "difference": abs(finite - limit),
    }


def cmd_mc_boundary(n, samples=10000, seed=0, taus=(0.0, 1.0)):
    """Sampled boundary positions in scaled coordinates, against the
    one-time limit law.

    Each scaled time uses the nearest even lattice line (recorded); the
    position rescaling absorbs the parabola, so every time's marginal is
    compared to the same stationary law.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    specs = []
    for tau in taus:
        line = _nearest_line(n, tau, parity=0)
        specs.append((tau, line, _line_tau(n, line)))
    unit = ek.scaling_unit(n)
    xi = np.empty((len(specs), samples))
    for idx in range(samples):
        g = sh.sample_grid(n, 1.0, seed, idx)
        for si, (tau, line, t_hat) in enumerate(specs):
            x = tl.boundary_position_grid(g, n, line)
            xi[si, idx] = (x - ek.scaling_center(n, t_hat)) / unit
    edges = np.linspace(-6.0, 3.0, 37)
    rows = []
    for si, (tau, line, t_hat) in enumerate(specs):
        vals = xi[si]
        counts, _ = np.histogram(vals, bins=edges)
        rec = StatsRecord(value=float(np.mean(vals)),
                          stderr=float(np.std(vals) / math.sqrt(samples)),
                          count=samples,
                          meta={"n": n, "seed": seed, "tau": tau,
                                "line": line, "realized_tau": t_hat})
        row = rec._asdict()
        row.update({
            "ks_to_f2": _ks_to_f2(vals),
            "histogram": {"edges": [float(e) for e in edges],
                          "counts": [int(c) for c in counts]},
        })
        rows.append(row)
    return {"times": rows}


# ---------------------------------------------------------------------------
# invariant suites


def _check(name, worst, bound, **extra):
    rec = {"name": name, "worst": worst, "bound": bound,
           "passed": bool(worst < bound)}
    rec.update(extra)
    return rec


def _check_flag(name, passed, **extra):
    rec = {"name": name, "passed": bool(passed)}
    rec.update(extra)
    return rec


def _window_sites(n):
    out = []
    for line in range(1, 2 * n):
        lo, hi = tl.line_window(n, line)
        out.extend((line, x) for x in range(lo, hi + 1))
    return out


def _enumeration_table(n, a):
    out = []
    for t in tl.enumerate_tilings(n):
        byline = {line: set(tl.particles_on_line(t, line))
                  for line in range(1, 2 * n)}
        out.append((tl.tiling_probability(t, a), byline))
    return out


def suite_bruteforce(seed=0, samples=None):
    checks = []
    for n in (2, 3):
        for a in (1.0, 0.5):
            prm = ek.AztecKernelParams(n, a)
            table = _enumeration_table(n, a)
            sites = _window_sites(n)
            worst = 0.0
            for pts in itertools.chain(((s,) for s in sites),
                                       itertools.combinations(sites, 2)):
                brute = sum(p for p, by in table
                            if all(x in by[line] for line, x in pts))
                worst = max(worst, abs(ek.correlation(pts, prm) - brute))
            checks.append(_check("correlations_vs_enumeration_n%d_a%s"
                                 % (n, a), worst, 1e-8))
            worst = 0.0
            for line in range(1, 2 * n):
                lo, hi = tl.line_window(n, line)
                for e in range(lo, hi + 1):
                    brute = sum(p for p, by in table
                                if all(x <= e for x in by[line]))
                    gp = ek.gap_probability(ek.GapSpec([line], [e]), prm)
                    worst = max(worst, abs(gp - brute))
            checks.append(_check("top_particle_cdf_vs_enumeration_n%d_a%s"
                                 % (n, a), worst, 1e-8))
    # multiplicative-statistic determinant against the same enumeration
    rng = np.random.default_rng(seed)
    n = 2
    for a in (1.0, 0.5):
        prm = ek.AztecKernelParams(n, a)
        table = _enumeration_table(n, a)
        sites = _window_sites(n)
        kmat = np.array([[ek.kernel((l1, x1, l2, x2), prm)
                          for l2, x2 in sites] for l1, x1 in sites])
        worst = 0.0
        for _ in range(5):
            g = rng.uniform(-1.0, 1.0, len(sites))
            det = float(nm.fredholm_det_discrete(np.diag(g) @ kmat).real)
            brute = sum(p * float(np.prod([1.0 + g[i]
                                           for i, (line, x) in enumerate(sites)
                                           if x in by[line]]))
                        for p, by in table)
            worst = max(worst, abs(det - brute))
        checks.append(_check("multiplicative_determinant_n%d_a%s" % (n, a),
                             worst, 1e-8))
    return checks, {}


def _random_position(rng, n, line, top_half):
    lo, hi = tl.line_window(n, line)
    if top_half:
        lo = (lo + hi) // 2
    return int(rng.integers(lo, hi + 1))


def _random_odd_query(rng, n, lines=None, top_half=False):
    if lines is None:
        lines = (0, n)
    r = 2 * int(rng.integers(*lines)) + 1
    s = 2 * int(rng.integers(*lines)) + 1
    return (r, _random_position(rng, n, r, top_half),
            s, _random_position(rng, n, s, top_half))


def suite_identity(seed=0, samples=None):
    checks = []
    rng = np.random.default_rng(seed)
    for n in (6, 12):
        for a in (Fraction(1, 2), Fraction(9, 10)):
            prm = ek.AztecKernelParams(n, float(a))
            worst = 0.0
            for _ in range(50):
                qy = _random_odd_query(rng, n)
                exact = float(ek.kernel_exact(n, *qy, a=a))
                ide = ek.kernel(qy, prm, method="identity")
                worst = max(worst, abs(exact - ide))
            checks.append(_check("contour_vs_polynomial_sum_n%d_a%s"
                                 % (n, float(a)), worst, 1e-8))
    # the trapezoid discretization of the same contour integral, where its
    # float64 conditioning allows: full windows except at n=12, a=0.9,
    # whose deep-window entries sit on a cancellation floor near 1e-3
    # (pole pinch at a and 1/a with powers up to 2n); there the check
    # keeps to the live middle of the windows
    worst = 0.0
    for n, a in ((6, Fraction(1, 2)), (6, Fraction(9, 10)),
                 (12, Fraction(1, 2))):
        for _ in range(25):
            qy = _random_odd_query(rng, n)
            exact = float(ek.kernel_exact(n, *qy, a=a))
            tz = ek._kernel_quadrature(n, float(a), *qy, 512, 512)
            worst = max(worst, abs(tz - exact))
    checks.append(_check("trapezoid_vs_exact_contour", worst, 1e-8))
    worst = 0.0
    for _ in range(12):
        qy = _random_odd_query(rng, 12, lines=(4, 8), top_half=True)
        exact = float(ek.kernel_exact(12, *qy, a=Fraction(9, 10)))
        tz = ek._kernel_quadrature(12, 0.9, *qy, 1536, 1536)
        worst = max(worst, abs(tz - exact))
    checks.append(_check("trapezoid_vs_exact_contour_pinched", worst, 1e-8))
    worst = 0.0
    for n in (8, 15):
        for q in (0.3, 0.5, 0.7):
            prm = kw.KrawtchoukParams(n, q)
            for k in range(n + 1):
                for x in range(n + 1):
                    lhs = kw.poly(k, n - x, prm)
                    rhs = ((-1.0) ** (k - x) * (prm.p / prm.q) ** (n / 2 - x)
                           * kw.poly(n - k, x, prm))
                    worst = max(worst,
                                abs(lhs - rhs) / max(1.0, abs(rhs)))
    checks.append(_check("polynomial_reflection", worst, 1e-9))
    return checks, {}


def suite_propp(seed=0, samples=100000):
    checks = []
    table = []
    worst_final = 0.0
    all_decreasing = True
    for sites in PROPP_FAMILIES:
        plane = ct.green_prob_plane(sites)
        row = {"sites": [list(s) for s in sites], "plane": plane}
        gaps = []
        for n in PROPP_ORDERS:
            az = ct.green_prob_aztec(sites, n)
            row["aztec_%d" % n] = az
            gaps.append(abs(az - plane))
        row["gaps"] = gaps
        table.append(row)
        all_decreasing = all_decreasing and all(
            a > b for a, b in zip(gaps, gaps[1:]))
        worst_final = max(worst_final, gaps[-1])
    checks.append(_check_flag("finite_to_plane_gaps_decreasing",
                              all_decreasing, orders=list(PROPP_ORDERS)))
    checks.append(_check("finite_to_plane_final_gap", worst_final, 0.02))

    worst = 0.0
    for x in range(-6, 7):
        for y in range(-6, 7):
            if x + y < 1 or (x + y) % 2 == 0:
                continue
            v = complex(x, y)
            worst = max(worst, abs(ct.p_kernel_arc(v)
                                   - ct.p_kernel_double(v)))
    checks.append(_check("plane_kernel_two_forms", worst, 1e-8))

    worst = 0.0
    for du, dl in ((1, 1), (2, 1), (0, 1)):
        lhs = ct.limiting_kernel(du, dl, 0, 0)
        rhs = 1j ** ((du + 2 * dl) % 4) \
            * ct.r_kernel(complex(du, -du + 2 * dl))
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("limit_identity_quarter_turn", worst, 1e-8))
    worst = 0.0
    for du in range(-2, 3):
        for dl in range(-2, 3):
            if du == dl == 0:
                continue
            worst = max(worst, abs(ct.limiting_kernel(du, dl, 0, 0)
                                   - ct.limiting_kernel_from_p(du, dl, 0, 0)))
    checks.append(_check("limit_identity_offset_box", worst, 1e-8))

    mc_rows = []
    if samples:
        n = MC_GREEN_ORDER
        hits = [0] * len(MC_GREEN_SITES)
        for idx in range(samples):
            g = sh.sample_grid(n, 1.0, seed, idx)
            for si, sites in enumerate(MC_GREEN_SITES):
                if all(ct.green_particle_grid(g, n, u, l) for u, l in sites):
                    hits[si] += 1
        worst_z = 0.0
        for si, sites in enumerate(MC_GREEN_SITES):
            exact = ct.green_prob_aztec(sites, n)
            freq = hits[si] / samples
            sigma = math.sqrt(exact * (1.0 - exact) / samples)
            z = abs(freq - exact) / sigma
            worst_z = max(worst_z, z)
            mc_rows.append({"sites": [list(s) for s in sites],
                            "exact": exact, "frequency": freq,
                            "z": z, "count": samples})
        checks.append(_check("sampled_frequencies_z", worst_z, 3.0))
    return checks, {"table": table, "sampling": mc_rows}


def suite_hermite(seed=0, samples=None):
    checks = []
    prm = kw.KrawtchoukParams(40, 0.5)
    rows = np.array([[math.sqrt(kw.weight(x, prm)) * kw.poly(k, x, prm)
                      for k in range(13)] for x in range(41)])
    gram = rows.T @ rows
    checks.append(_check("orthonormality",
                         float(np.abs(gram - np.eye(13)).max()), 1e-10))
    # parameters off the symmetric point, where the finite-order gap is
    # genuinely nonzero and its decay is visible (at q = 1/2, index 0 the
    # gap is rounding noise from the start)
    cases = ((3, 0.4, 0.7, "pointwise"), ((1, 2), 0.5, 0.5, "two_line"))
    for index, q, xi, label in cases:
        rep = kw.hermite_limit_check(index, (100, 400, 1600), q, xi=xi)
        strict = all(a > b for a, b in zip(rep.gaps, rep.gaps[1:]))
        checks.append(_check_flag("tangency_limit_%s_decreasing" % label,
                                  strict, gaps=list(rep.gaps),
                                  orders=list(rep.ns)))
    return checks, {}


def suite_airy(seed=0, samples=None):
    checks = []
    h = 0.004
    grid = np.linspace(-5.0, 5.0, 41)
    cols = [np.array([airy.airy_ai(x + k * h) for x in grid])
            for k in (-2, -1, 0, 1, 2)]
    second = (-cols[0] + 16 * cols[1] - 30 * cols[2] + 16 * cols[3]
              - cols[4]) / (12.0 * h * h)
    checks.append(_check("ode_residual",
                         float(np.max(np.abs(second - grid * cols[2]))),
                         1e-8))
    worst = 0.0
    for x1, x2 in ((0.3, -0.2), (1.0, 0.5), (-1.0, 0.0)):
        closed = airy.extended_airy_kernel(airy.AiryQuery(0.7, x1, 0.7, x2))
        cut = 14.0 + max(0.0, -x1, -x2)
        direct = _panel_integral(
            lambda l: np.array([airy.airy_ai(x1 + s) * airy.airy_ai(x2 + s)
                                for s in l]), 0.0, cut)
        worst = max(worst, abs(closed - direct))
    checks.append(_check("equal_time_closed_form", worst, 1e-8))
    pts = (-6.0, -2.0, 0.0, 2.0, 4.0)
    f2 = [airy.tracy_widom_f2(x) for x in pts]
    monotone = all(a < b for a, b in zip(f2, f2[1:]))
    checks.append(_check_flag("limit_law_shape",
                              monotone and f2[0] < 0.01 and f2[-1] > 0.999,
                              values=f2))
    return checks, {}


SUITES = {
    "bruteforce": suite_bruteforce,
    "identity": suite_identity,
    "propp": suite_propp,
    "hermite": suite_hermite,
    "airy": suite_airy,
}


def cmd_verify(suites, seed=0, samples=None):
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ValueError("unknown suite %s; choose from %s"
                         % (", ".join(unknown), ", ".join(sorted(SUITES))))
    out = {}
    ok = True
    for name in suites:
        kwargs = {"seed": seed}
        if name == "propp":
            kwargs["samples"] = 100000 if samples is None else samples
        checks, extra = SUITES[name](**kwargs)
        passed = all(c["passed"] for c in checks)
        ok = ok and passed
        entry = {"checks": checks, "passed": passed}
        entry.update(extra)
        out[name] = entry
    return {"suites": out, "passed": ok}


# ---------------------------------------------------------------------------
# report assembly and rendering


def build_report(command, seed, parameters, payload):
    return {"schema": SCHEMA, "command": command, "version": __version__,
            "seed": seed, "parameters": parameters, "payload": payload}


def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten("%s.%s" % (prefix, k) if prefix else str(k),
                     value[k], rows)
    elif isinstance(value, (list, tuple)):
        rows.append((prefix, ";".join(str(v) for v in value)))
    else:
        rows.append((prefix, str(value)))


def render_csv(report):
    """Key-value CSV of the payload, after a comment line of metadata.

    A payload's "table" of uniform rows becomes a proper CSV block
    instead of flattened keys.
    """
    head = "# command=%s version=%s seed=%s\n" % (
        report["command"], report["version"], report["seed"])
    payload = dict(report["payload"])
    blocks = []
    table = payload.pop("table", None)
    if table:
        cols = sorted(set().union(*(row.keys() for row in table)))
        lines = [",".join(cols)]
        for row in table:
            lines.append(",".join(_csv_cell(row.get(c)) for c in cols))
        blocks.append("\n".join(lines))
    rows = []
    _flatten("", payload, rows)
    if rows:
        blocks.append("\n".join("%s,%s" % (k, v) for k, v in rows))
    return head + "\n\n".join(blocks) + "\n"


def _csv_cell(value):
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return str(value)


# ---------------------------------------------------------------------------
# CLI wiring


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="arctic-kernel",
        description="Statistics of random domino tilings of the Aztec "
                    "diamond: exact kernels, boundary limits, sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv", "svg"),
                       default="json")
        p.add_argument("--out")
        if tol:
            p.add_argument("--tol", type=float)

    p = sub.add_parser("sample", help="draw one tiling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    common(p)

    p = sub.add_parser("gap", help="probability lines stay below thresholds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--lines", type=_ints, required=True)
    p.add_argument("--thresholds", type=_ints, required=True)
    common(p, tol=True)

    p = sub.add_parser("boundary-fdd",
                       help="boundary law at scaled times vs its limit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--taus", type=_floats, required=True)
    p.add_argument("--gammas", type=_floats, required=True)
    common(p, tol=True)

    p = sub.add_parser("mc-boundary",
                       help="sampled boundary positions vs the limit law")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--taus", type=_floats, default=[0.0, 1.0])
    common(p)

    p = sub.add_parser("tw2", help="one-time limit law values")
    p.add_argument("--gammas", type=_floats, required=True)
    common(p)

    p = sub.add_parser("airy-fdd", help="multi-time limit law values")
    p.add_argument("--taus", type=_floats, required=True)
    p.add_argument("--gammas", type=_floats, required=True)
    common(p)

    p = sub.add_parser("center", help="green-particle probabilities")
    p.add_argument("--sites", type=_site_list, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    common(p)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("suites", nargs="+",
                   metavar="{%s}" % ",".join(sorted(SUITES)))
    p.add_argument("--samples", type=int)
    common(p)
    return parser


def _dispatch(args):
    tiling = None
    if args.command == "sample":
        params = {"n": args.n, "a": args.a, "seed": args.seed}
        payload, tiling = cmd_sample(args.n, args.a, args.seed)
    elif args.command == "gap":
        params = {"n": args.n, "a": args.a, "lines": args.lines,
                  "thresholds": args.thresholds, "seed": args.seed,
                  "tol": args.tol}
        payload = cmd_gap(args.n, args.lines, args.thresholds, args.a,
                          args.tol)
    elif args.command == "boundary-fdd":
        params = {"n": args.n, "taus": args.taus, "gammas": args.gammas,
                  "seed": args.seed, "tol": args.tol}
        payload = cmd_boundary_fdd(args.n, args.taus, args.gammas, args.tol)
    elif args.command == "mc-boundary":
        params = {"n": args.n, "samples": args.samples, "taus": args.taus,
                  "seed": args.seed}
        payload = cmd_mc_boundary(args.n, args.samples, args.seed, args.taus)
    elif args.command == "tw2":
        params = {"gammas": args.gammas, "seed": args.seed}
        payload = cmd_tw2(args.gammas)
    elif args.command == "airy-fdd":
        params = {"taus": args.taus, "gammas": args.gammas,
                  "seed": args.seed}
        payload = cmd_airy_fdd(args.taus, args.gammas)
    elif args.command == "center":
        params = {"sites": [list(s) for s in args.sites], "n": args.n,
                  "a": args.a, "seed": args.seed}
        payload = cmd_center(args.sites, args.n, args.a)
    elif args.command == "verify":
        params = {"suites": args.suites, "seed": args.seed,
                  "samples": args.samples}
        payload = cmd_verify(args.suites, args.seed, args.samples)
    else:
        raise ValueError("unknown command %r" % args.command)
    report = build_report(args.command, args.seed, params, payload)
    return report, tiling


def _render(report, fmt, tiling):
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        if report["command"] == "sample":
            return tl.particles_to_csv(tiling)
        return render_csv(report)
    if fmt == "svg":
        if report["command"] != "sample":
            raise ValueError("svg output exists only for sample")
        return tl.tiling_to_svg(tiling)
    raise ValueError("unknown format %r" % fmt)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        report, tiling = _dispatch(args)
        text = _render(report, args.format, tiling)
    except ValueError as err:
        print("input error: %s" % err, file=sys.stderr)
        return EXIT_INPUT
    except nm.ConvergenceError as err:
        print("convergence failure: coarse=%r fine=%r"
              % (err.coarse, err.fine), file=sys.stderr)
        return EXIT_CONVERGENCE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not report["payload"]["passed"]:
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
