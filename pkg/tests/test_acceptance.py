"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Criterion reports are plain JSON-able dicts; the determinism criterion re-runs
every generator and compares serialized bytes.  Run with -s to see the lines.
"""
import json
import math
import time

import numpy as np
import scipy.linalg

from qembed.audit import empirical_distortion
from qembed.combinators import cylinder_chart_embedder, gh_transfer
from qembed.embeddings import (circle_embedding, cone_embed, linear_embedding,
                               mcshane_extend, net_function_from_map, patch_two,
                               product_embed, quotient_circle_embedding)
from qembed.holonomy import canonical_decomposition, karcher_mean_sphere
from qembed.lattices import (integer_coordinates, lattice_space, diameter_bound,
                             random_integer_lattice, scale_properties_check,
                             short_basis)
from qembed.pipelines import bundle_annulus_pipeline, lens_patched_embedding
from qembed.quotient import build_net
from qembed.spaces import (EllipsoidMesh, annulus_flat_coords, annulus_surrogate_space,
                           cyclic_cone, ellipsoid_map_many, flat_torus, holonomy_bundle,
                           lens_chart_tensor_ratio, lens_space, sample_annulus, rot2)

_REPORTS: dict[int, dict] = {}
_TIMES: dict[int, float] = {}


def _native(obj):
    if isinstance(obj, dict):
        return {k: _native(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_native(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _record(num: int, fn):
    if num not in _REPORTS:
        t0 = time.perf_counter()
        _REPORTS[num] = _native(fn())
        _TIMES[num] = time.perf_counter() - t0
    return _REPORTS[num]


def _line(num: int, rep: dict, extra: str = ""):
    status = "PASS" if rep["pass"] else "FAIL"
    print(f"criterion {num}: {status} {extra}")


# -- criterion 1: exact quotient oracle ------------------------------------------------


def _c1_spaces():
    return [
        ("R/Z", flat_torus([[1.0]])),
        ("R2/Z2", flat_torus([[1.0, 0.0], [0.0, 1.0]])),
        ("R2/Zx3Z", flat_torus([[1.0, 0.0], [0.0, 3.0]])),
        ("L(5,2)", lens_space(5, 2)),
        ("L(7,3)", lens_space(7, 3)),
        ("E3_2pi7", holonomy_bundle(theta=2 * np.pi / 7)),
    ]


def criterion_1():
    per_space = {}
    total_pairs = 0
    ok = True
    for i, (name, sp) in enumerate(_c1_spaces()):
        rng = np.random.default_rng(100 + i)
        pairs = 167
        pts = sp.sampler(2 * pairs + 3 * 40, rng)
        mismatches = 0
        worst_tri = 0.0
        worst_sym = 0.0
        for k in range(pairs):
            p, q = pts[2 * k], pts[2 * k + 1]
            d = sp.quotient_distance(p, q)
            damb = sp.ambient.distance(p, q)
            ball = sp.enumerate_ball(q, 4.0 * damb)
            brute = float(np.min(sp.ambient.distance_many(p, ball.orbit(q))))
            if brute != d:
                mismatches += 1
            worst_sym = max(worst_sym, abs(sp.quotient_distance(q, p) - d))
        tri = pts[2 * pairs:]
        for k in range(40):
            a, b, c = tri[3 * k], tri[3 * k + 1], tri[3 * k + 2]
            dab = sp.quotient_distance(a, b)
            dac = sp.quotient_distance(a, c)
            dcb = sp.quotient_distance(c, b)
            worst_tri = max(worst_tri, dab - dac - dcb)
        total_pairs += pairs
        good = mismatches == 0 and worst_tri <= 1e-9 and worst_sym <= 1e-12
        ok = ok and good
        per_space[name] = {"mismatches": mismatches, "triangle_defect": float(worst_tri),
                           "symmetry_defect": float(worst_sym), "pass": good}
    return {"pass": ok, "pairs": total_pairs, "spaces": per_space}


def test_criterion_01_oracle():
    rep = _record(1, criterion_1)
    _line(1, rep, f"({rep['pairs']} pairs, exact brute-force agreement)")
    assert rep["pass"]
    assert _TIMES[1] < 30.0


# -- criterion 2: local-group ball isometry ----------------------------------------------


def criterion_2():
    configs = [
        ("R2/Z2", flat_torus([[1.0, 0.0], [0.0, 1.0]]), (0.15, 0.3)),
        ("L(7,3)", lens_space(7, 3), (0.1, 0.35)),
        ("E3_2pi7", holonomy_bundle(theta=2 * np.pi / 7), (0.3, 1.0)),
    ]
    worst = 0.0
    checks = 0
    for i, (name, sp, radii) in enumerate(configs):
        rng = np.random.default_rng(200 + i)
        base = sp.sampler(3, rng)
        for p in base:
            for r in radii:
                _, derived = sp.local_group(p, r)
                for _ in range(200):
                    a = _point_in_ball(sp, p, r, rng)
                    b = _point_in_ball(sp, p, r, rng)
                    dev = abs(derived.quotient_distance(a, b) - sp.quotient_distance(a, b))
                    worst = max(worst, dev)
                    checks += 1
    return {"pass": bool(worst <= 1e-9), "checks": checks, "worst_deviation": float(worst)}


def _point_in_ball(sp, p, r, rng):
    from qembed.geometry import Product, Sphere

    direction = rng.normal(size=sp.ambient.dim)
    x = p + direction / np.linalg.norm(direction) * (0.9 * r * rng.random())
    if isinstance(sp.ambient, Sphere):
        x = x / np.linalg.norm(x) * sp.ambient.radius
    elif isinstance(sp.ambient, Product) and isinstance(sp.ambient.fiber, Sphere):
        nb = sp.ambient.base.dim
        x[nb:] = x[nb:] / np.linalg.norm(x[nb:]) * sp.ambient.fiber.radius
    return x


def test_criterion_02_local_group_isometry():
    rep = _record(2, criterion_2)
    _line(2, rep, f"({rep['checks']} pairs, worst deviation {rep['worst_deviation']:.2e})")
    assert rep["pass"]


# -- criterion 3: combinator constants ---------------------------------------------------


def criterion_3():
    out = {}
    tol = 1.0 + 1e-6

    cyl = holonomy_bundle(matrix=[[1.0]], d=1, base_circumference=1.0, fiber_cap=1.0)
    prod = product_embed(circle_embedding(1.0), linear_embedding(np.eye(1)), split=1)
    rep = empirical_distortion(cyl, prod, 10_000, seed=42)
    out["product"] = {"distortion": rep.distortion, "claimed": rep.claimed_bound,
                      "pass": bool(rep.distortion <= math.sqrt(2) * (math.pi / 2) * tol)}

    cone = cyclic_cone(3)
    f = quotient_circle_embedding(3)
    ts = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    cemb = cone_embed(f, cone.link_space, np.column_stack([np.cos(ts), np.sin(ts)]))
    rep = empirical_distortion(cone, cemb, 10_000, seed=42)
    out["cone"] = {"distortion": rep.distortion, "claimed": rep.claimed_bound,
                   "pass": bool(rep.distortion <= 20 * (math.pi / 2) * tol)}

    circ = flat_torus([[1.0]])
    netA = build_net(circ, np.arange(-0.3, 0.3, 0.01).reshape(-1, 1), 0.02)
    netB = build_net(circ, np.arange(0.2, 0.8, 0.01).reshape(-1, 1), 0.02)
    fA = net_function_from_map(netA, lambda x: np.array([x[0] if x[0] < 0.5 else x[0] - 1.0]))
    fB = net_function_from_map(netB, lambda x: np.array([x[0] % 1.0]))
    L = 1.5
    patch = patch_two(fA, fB, circ, L)
    rep = empirical_distortion(circ, patch, 10_000, seed=42)
    out["patch"] = {"distortion": rep.distortion, "claimed": rep.claimed_bound,
                    "pass": bool(rep.distortion <= 10 * L * L * tol)}

    torus = flat_torus([[1.0, 0.0], [0.0, 1.0]])
    rng = np.random.default_rng(300)
    net = build_net(torus, rng.random((120, 2)), 0.18)
    fn = lambda p: np.array([np.sin(2 * np.pi * p[0]), np.cos(2 * np.pi * p[1]),
                             np.sin(2 * np.pi * (p[0] + p[1]))])
    nf = net_function_from_map(net, fn)
    ext = mcshane_extend(nf)
    exact = all(np.array_equal(ext.evaluate(a), v) for a, v in zip(net.points, nf.values))
    bound = math.sqrt(3) * nf.lipschitz
    worst = 0.0
    for i in range(10_000):
        pr = np.random.default_rng([42, i]).random((2, 2))
        d = torus.quotient_distance(pr[0], pr[1])
        if d > 1e-9:
            worst = max(worst, float(np.linalg.norm(
                ext.evaluate(pr[0]) - ext.evaluate(pr[1])) / d))
    out["mcshane"] = {"expansion": worst, "bound": bound, "exact_on_net": bool(exact),
                      "pass": bool(exact and worst <= bound * tol)}

    ok = all(v["pass"] for v in out.values())
    return {"pass": ok, "combinators": out}


def test_criterion_03_combinator_constants():
    rep = _record(3, criterion_3)
    detail = ", ".join(f"{k} {v['distortion']:.3f}" if "distortion" in v else k
                       for k, v in rep["combinators"].items())
    _line(3, rep, f"({detail})")
    assert rep["pass"]


# -- criterion 4: lens charts and patched lens embeddings ---------------------------------


def criterion_4():
    chart_ok = True
    worst_lo, worst_hi = np.inf, 0.0
    for j, seed in ((1, 400), (2, 401)):
        rng = np.random.default_rng(seed)
        for _ in range(1000):
            alpha = rng.random() * (np.pi / 3)
            probe = rng.normal(size=3)
            ratio = lens_chart_tensor_ratio(alpha, probe)
            worst_lo, worst_hi = min(worst_lo, ratio), max(worst_hi, ratio)
            chart_ok = chart_ok and (0.25 - 1e-12 <= ratio <= 4.0 + 1e-12)

    audits = {}
    claims = []
    for p, q in [(5, 2), (7, 3), (13, 5)]:
        emb = lens_patched_embedding(p, q)
        L = lens_space(p, q)
        rep = empirical_distortion(L, emb, 2000, seed=42)
        claims.append(emb.claimed_distortion)
        audits[f"L({p},{q})"] = {"distortion": rep.distortion,
                                 "claimed": emb.claimed_distortion,
                                 "pass": bool(rep.passed and np.isfinite(rep.distortion))}
    common = max(claims)
    common_ok = all(v["distortion"] <= common for v in audits.values())
    ok = chart_ok and common_ok and all(v["pass"] for v in audits.values())
    return {"pass": ok, "tensor_ratio_range": [float(worst_lo), float(worst_hi)],
            "audits": audits, "common_bound": float(common)}


def test_criterion_04_lens():
    rep = _record(4, criterion_4)
    dists = [f"{k} {v['distortion']:.2f}" for k, v in rep["audits"].items()]
    _line(4, rep, f"(ratios in {rep['tensor_ratio_range']}, {', '.join(dists)})")
    assert rep["pass"]


# -- criterion 5: annulus pipeline on E3_theta ---------------------------------------------


def criterion_5():
    out = {}
    ok = True
    for theta in (2 * np.pi / 7, 1.0):
        bundle = holonomy_bundle(theta=theta)
        emb = bundle_annulus_pipeline(bundle, k_max=4)
        rep = empirical_distortion(bundle, emb, 10_000, seed=42)
        ratios = []
        D = np.pi
        rng = np.random.default_rng(500)
        for k in range(1, 5):
            R = 2.0**k * D
            surr = annulus_surrogate_space(2 * np.pi, theta, R)
            pts = sample_annulus(2 * np.pi, D, k, 120, rng)
            for i in range(0, 120, 2):
                a, b = pts[i], pts[i + 1]
                dg = bundle.quotient_distance(a, b)
                if dg < 1e-9:
                    continue
                df = surr.quotient_distance(annulus_flat_coords(bundle, R, a),
                                            annulus_flat_coords(bundle, R, b))
                ratios.append(df / dg)
        ratios = np.asarray(ratios)
        metric_ok = bool(np.all(ratios >= 0.1) and np.all(ratios <= 10.0))
        good = bool(rep.passed) and metric_ok
        ok = ok and good
        out[f"theta={theta:.4f}"] = {
            "distortion": rep.distortion, "claimed": rep.claimed_bound,
            "metric_ratio_range": [float(ratios.min()), float(ratios.max())],
            "pass": good,
        }
    return {"pass": ok, "bundles": out}


def test_criterion_05_annulus_pipeline():
    rep = _record(5, criterion_5)
    detail = ", ".join(f"{k}: {v['distortion']:.2f}" for k, v in rep["bundles"].items())
    _line(5, rep, f"({detail}; {_TIMES[5]:.0f}s)")
    assert rep["pass"]
    assert _TIMES[5] < 120.0


# -- criterion 6: short bases, scales, diameters --------------------------------------------


def criterion_6():
    rng = np.random.default_rng(600)
    lattices = []
    for trial in range(20):
        n = int(rng.integers(2, 5))
        lattices.append(random_integer_lattice(rng, n))
    ok = True
    diam_margin = 0.0
    for basis in lattices:
        n = basis.shape[0]
        sb = short_basis(basis)
        params = sb.params
        norms = sb.norms
        assert np.all(np.diff(norms) >= -1e-9)
        for g in sb.groups:
            gn = norms[g]
            ok = ok and bool(np.max(gn) <= params.L * np.min(gn) + 1e-9)
        for gi in range(len(sb.groups) - 1):
            lo = norms[sb.groups[gi]]
            hi = norms[sb.groups[gi + 1]]
            ok = ok and bool(params.l * np.max(lo) <= np.min(hi) + 1e-9)
        coeff = integer_coordinates(basis, sb.vectors)
        ok = ok and round(abs(np.linalg.det(coeff.astype(float)))) == 1
        space = lattice_space(sb.vectors)
        rep = scale_properties_check(space, sb, space.sampler(5, rng))
        ok = ok and rep["pass"]
        analytic, empirical = diameter_bound(space, sb)
        ok = ok and empirical <= analytic
        diam_margin = max(diam_margin, empirical / analytic)
    return {"pass": bool(ok), "lattices": len(lattices),
            "max_diam_ratio": float(diam_margin)}


def test_criterion_06_short_bases():
    rep = _record(6, criterion_6)
    _line(6, rep, f"({rep['lattices']} lattices, max diam/analytic "
                  f"{rep['max_diam_ratio']:.3f})")
    assert rep["pass"]


# -- criterion 7: canonical decomposition + Karcher orbit -----------------------------------


def _random_commuting(rng, d, num=3):
    dims = []
    left = d
    while left >= 2 and rng.random() < 0.75:
        dims.append(2)
        left -= 2
    dims.extend([1] * left)
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    U = q * np.sign(np.diag(r))
    mats = []
    for _ in range(num):
        pieces = []
        for k in dims:
            if k == 2:
                pieces.append(rot2(rng.uniform(0.2, 3.0)))
            else:
                pieces.append(np.array([[rng.choice([-1.0, 1.0])]]))
        mats.append(U @ scipy.linalg.block_diag(*pieces) @ U.T)
    return mats


def criterion_7():
    rng = np.random.default_rng(700)
    worst_rec = 0.0
    worst_inv = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 7))
        mats = _random_commuting(rng, d)
        dec = canonical_decomposition(mats)
        worst_rec = max(worst_rec, dec.reconstruction_error(mats))
        worst_inv = max(worst_inv, dec.invariance_defect(mats))
    g = scipy.linalg.block_diag(rot2(2 * np.pi / 5), [[1.0]])
    p = np.array([0.25, 0.05, 0.96])
    p /= np.linalg.norm(p)
    orbit = [p]
    for _ in range(4):
        orbit.append(g @ orbit[-1])
    m = karcher_mean_sphere(np.asarray(orbit), tol=1e-12)
    fix = float(np.linalg.norm(g @ m - m))
    ok = worst_rec < 1e-8 and worst_inv < 1e-9 and fix < 1e-6
    return {"pass": bool(ok), "reconstruction": float(worst_rec),
            "invariance": float(worst_inv), "karcher_fix_defect": fix}


def test_criterion_07_decomposition():
    rep = _record(7, criterion_7)
    _line(7, rep, f"(recon {rep['reconstruction']:.1e}, invariance "
                  f"{rep['invariance']:.1e}, Karcher {rep['karcher_fix_defect']:.1e})")
    assert rep["pass"]


# -- criterion 8: ellipsoid map constants across N ------------------------------------------


def _ellipsoid_audit(N, level=6, nsrc=60, ntgt=800, seed=42):
    mesh = EllipsoidMesh(N, level=level)
    rng = np.random.default_rng(seed)
    src = mesh.sample_vertex_indices(nsrc, rng)
    tgt = mesh.sample_vertex_indices(ntgt, rng)
    dmat = mesh.vertex_distances(src)[:, tgt]
    fa = ellipsoid_map_many(N, mesh.vertices[src])
    fb = ellipsoid_map_many(N, mesh.vertices[tgt])
    e = np.linalg.norm(fa[:, None, :] - fb[None, :, :], axis=-1)
    mask = dmat > 10 * mesh.edge_length
    exp = float(np.max(e[mask] / dmat[mask]))
    contr = float(np.max(dmat[mask] / e[mask]))
    return math.sqrt(exp * contr), exp, contr, mesh


def criterion_8():
    values = {}
    mesh_error = None
    for N in (1.0, 10.0, 100.0):
        dist, exp, contr, mesh = _ellipsoid_audit(N)
        values[f"N={N:g}"] = {"distortion": dist, "expansion": exp, "contraction": contr}
        if N == 1.0:
            rng = np.random.default_rng(7)
            src = mesh.sample_vertex_indices(15, rng)
            tgt = mesh.sample_vertex_indices(400, rng)
            md = mesh.vertex_distances(src)[:, tgt]
            exact = np.arccos(np.clip(mesh.vertices[src] @ mesh.vertices[tgt].T, -1, 1))
            m = exact > 10 * mesh.edge_length
            mesh_error = float(np.max(np.abs(md[m] / exact[m] - 1.0)))
    dists = [v["distortion"] for v in values.values()]
    spread = (max(dists) - min(dists)) / min(dists)
    return {"pass": bool(spread < 0.25), "spread": float(spread),
            "mesh_error_vs_exact_sphere": mesh_error, "constants": values,
            "min_pair_distance": "10 mesh edges"}


def test_criterion_08_ellipsoid():
    rep = _record(8, criterion_8)
    consts = ", ".join(f"{k}: {v['distortion']:.3f}" for k, v in rep["constants"].items())
    _line(8, rep, f"({consts}; spread {rep['spread']:.1%}, mesh error "
                  f"{rep['mesh_error_vs_exact_sphere']:.1%}; {_TIMES[8]:.0f}s)")
    assert rep["pass"]
    assert _TIMES[8] < 300.0


# -- criterion 9: GH transfer ----------------------------------------------------------------


def criterion_9():
    delta = 0.01
    thin = flat_torus([[1.0, 0.0], [0.0, delta]])
    base = flat_torus([[1.0]])
    rng = np.random.default_rng(900)
    worst = 0.0
    for _ in range(100):
        a = thin.sampler(1, rng)[0]
        b = thin.sampler(1, rng)[0]
        worst = max(worst, abs(thin.quotient_distance(a, b)
                               - base.quotient_distance(a[:1], b[:1])))
    fiber_ok = worst <= 2 * delta + 1e-12
    samples = thin.sampler(1200, rng)
    emb = gh_transfer(
        thin, lambda x: np.asarray([x[0]]), circle_embedding(1.0),
        eps_prime=2 * delta, eps=5 * delta,
        local_embedder=lambda host, c: cylinder_chart_embedder(host, c, delta),
        samples=samples, doubling_constant=5,
    )
    rep = empirical_distortion(thin, emb, 250, seed=42)
    ok = fiber_ok and bool(rep.passed) and np.isfinite(rep.distortion)
    return {"pass": ok, "gh_defect": float(worst), "gh_bound": 2 * delta,
            "distortion": rep.distortion, "claimed": rep.claimed_bound}


def test_criterion_09_gh_transfer():
    rep = _record(9, criterion_9)
    _line(9, rep, f"(defect {rep['gh_defect']:.4f} <= {rep['gh_bound']}, "
                  f"distortion {rep['distortion']:.2f})")
    assert rep["pass"]


# -- criterion 10: determinism ----------------------------------------------------------------


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
            9: criterion_9}


def test_criterion_10_determinism():
    mismatched = []
    for num, fn in CRITERIA.items():
        first = json.dumps(_record(num, fn), sort_keys=True).encode()
        second = json.dumps(_native(fn()), sort_keys=True).encode()
        if first != second:
            mismatched.append(num)
    rep = {"pass": not mismatched, "mismatched": mismatched}
    _line(10, rep, "(all reports byte-identical)" if rep["pass"]
          else f"(criteria {mismatched} differ)")
    assert rep["pass"]
