import numpy as np
import pytest

from qembed.spaces import (EllipsoidMesh, annulus_surrogate_space, annulus_flat_coords,
                           bundle_radial, cone_metric, construct_space, cyclic_cone,
                           ellipsoid_map, ellipsoid_map_many, ellipsoid_point,
                           flat_torus, holonomy_bundle, icosphere, in_lens_chart,
                           lens_chart_params, lens_chart_point, lens_chart_tensor_ratio,
                           lens_space, reduce_angle, sample_annulus)


# -- construction and oracles -----------------------------------------------------


def test_lens_trivial_group_antipodes():
    L = lens_space(1, 1)
    n, s = np.array([0.0, 0, 0, 1.0]), np.array([0.0, 0, 0, -1.0])
    assert L.quotient_distance(n, s) == pytest.approx(np.pi)


def test_lens_oracle_equals_brute_force():
    for (p, q) in [(5, 2), (7, 3)]:
        L = lens_space(p, q)
        group = L._cached_cyclic_group()
        assert len(group) == p
        rng = np.random.default_rng(0)
        for _ in range(30):
            a = L.sampler(1, rng)[0]
            b = L.sampler(1, rng)[0]
            brute = min(float(L.ambient.distance(a, e.act(b))) for e in group)
            assert L.quotient_distance(a, b) == brute


def test_lens_requires_coprime():
    with pytest.raises(ValueError):
        lens_space(6, 3)


def test_untwisted_bundle_is_product():
    # holonomy_bundle(theta=0) is S^1 x R^2 with the product formula
    E = holonomy_bundle(theta=0.0, base_circumference=1.0)
    circ = flat_torus([[1.0]])
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = E.sampler(1, rng)[0]
        b = E.sampler(1, rng)[0]
        expect = np.hypot(circ.quotient_distance(a[:1], b[:1]),
                          np.linalg.norm(a[1:] - b[1:]))
        assert E.quotient_distance(a, b) == pytest.approx(expect, abs=1e-9)


def test_cone_metric_formula():
    cone = cyclic_cone(3)
    link = cone.link_space
    x = np.array([1.0, 0.0])
    phi = 0.7
    y = np.array([np.cos(phi), np.sin(phi)])
    dl = link.quotient_distance(x, y)
    assert dl == pytest.approx(phi)
    got = cone_metric(link, 1.2, x, 0.8, y)
    assert got == pytest.approx(np.sqrt(1.2**2 + 0.8**2 - 2 * 1.2 * 0.8 * np.cos(phi)))


def test_bundle_radial_is_distance_to_zero_section():
    E = holonomy_bundle(theta=1.0)
    rng = np.random.default_rng(2)
    base_net = np.column_stack([np.linspace(0, 2 * np.pi, 40, endpoint=False),
                                np.zeros(40), np.zeros(40)])
    for _ in range(20):
        x = E.sampler(1, rng)[0]
        r = bundle_radial(E, x)
        via_net = float(np.min(E.distances_to_many(x, base_net)))
        assert r <= via_net + 1e-9
        assert via_net <= np.hypot(r, np.pi / 40 * 2) + 1e-6


def test_construct_space_kinds():
    spaces = [
        {"kind": "flat_torus", "basis": [[1.0, 0.0], [0.0, 2.0]]},
        {"kind": "lens", "p": 5, "q": 2},
        {"kind": "holonomy_bundle", "theta": 1.0, "d": 2},
        {"kind": "cyclic_cone", "order": 4},
        {"ambient": {"kind": "euclidean", "n": 1},
         "generators": [{"matrix": [1.0], "translation": [1.0]}], "cap": 1000},
    ]
    rng = np.random.default_rng(3)
    for spec in spaces:
        sp = construct_space(spec)
        pts = sp.sampler(4, rng)
        assert np.isfinite(sp.quotient_distance(pts[0], pts[1]))
    with pytest.raises(ValueError):
        construct_space({"kind": "nonsense"})


# -- lens charts -------------------------------------------------------------------


def test_chart_membership_covers():
    rng = np.random.default_rng(4)
    L = lens_space(7, 3)
    for v in L.sampler(200, rng):
        assert in_lens_chart(1, v) or in_lens_chart(2, v)


def test_chart_params():
    b, h = lens_chart_params(5, 2, 1)
    assert b == pytest.approx(2 * np.pi / 5)
    assert h == pytest.approx(2 * np.pi * 2 / 5)
    b2, h2 = lens_chart_params(5, 2, 2)
    s = pow(2, -1, 5)  # 3
    assert h2 == pytest.approx(2 * np.pi * s / 5)


def test_chart_map_well_defined_on_orbits():
    p, q = 7, 3
    L = lens_space(p, q)
    g = L.generators[0]
    bundle = holonomy_bundle(theta=lens_chart_params(p, q, 1)[1],
                             base_circumference=lens_chart_params(p, q, 1)[0])
    rng = np.random.default_rng(5)
    found = 0
    while found < 20:
        v = L.sampler(1, rng)[0]
        if not (in_lens_chart(1, v) and in_lens_chart(1, g.act(v))):
            continue
        a = lens_chart_point(p, q, 1, v)
        b = lens_chart_point(p, q, 1, g.act(v))
        assert bundle.quotient_distance(a, b) < 1e-9
        found += 1


def test_chart_tensor_ratio_values():
    # boundary value at alpha = 0 for the d-theta probe
    assert lens_chart_tensor_ratio(0.0, (1.0, 0.0, 0.0)) == pytest.approx(1.0)
    # alpha = pi/3, probe d-theta: cos^2(pi/3) = 1/4
    assert lens_chart_tensor_ratio(np.pi / 3, (1.0, 0.0, 0.0)) == pytest.approx(0.25)
    # alpha = pi/6, probe d-phi: sin^2(pi/6) / (pi/6)^2
    expect = np.sin(np.pi / 6) ** 2 / (np.pi / 6) ** 2
    assert lens_chart_tensor_ratio(np.pi / 6, (0.0, 0.0, 1.0)) == pytest.approx(expect)
    assert expect == pytest.approx(0.9119, abs=5e-5)


def test_chart_tensor_ratio_range():
    rng = np.random.default_rng(6)
    for _ in range(500):
        alpha = rng.random() * (np.pi / 3)
        probe = rng.normal(size=3)
        ratio = lens_chart_tensor_ratio(alpha, probe)
        assert 0.25 - 1e-12 <= ratio <= 4.0 + 1e-12


def test_chart_point_outside_rejected():
    with pytest.raises(ValueError):
        lens_chart_point(5, 2, 1, np.array([0.0, 0.0, 1.0, 0.0]))


# -- annulus surrogates ------------------------------------------------------------------


def test_annulus_surrogate_matches_bundle_locally():
    # the flat chart is close to isometric deep inside an annulus
    theta = 2 * np.pi / 7
    E = holonomy_bundle(theta=theta)
    D = np.pi
    k = 3
    R = 2.0**k * D
    surr = annulus_surrogate_space(2 * np.pi, theta, R)
    rng = np.random.default_rng(7)
    pts = sample_annulus(2 * np.pi, D, k, 60, rng)
    ratios = []
    for i in range(0, 60, 2):
        a, b = pts[i], pts[i + 1]
        dg = E.quotient_distance(a, b)
        df = surr.quotient_distance(annulus_flat_coords(E, R, a),
                                    annulus_flat_coords(E, R, b))
        if dg > 1e-9:
            ratios.append(df / dg)
    ratios = np.asarray(ratios)
    assert np.all(ratios > 0.1) and np.all(ratios < 10.0)


def test_reduce_angle():
    assert reduce_angle(0.3) == pytest.approx(0.3)
    assert reduce_angle(2 * np.pi + 0.3) == pytest.approx(0.3)
    assert reduce_angle(np.pi) == pytest.approx(np.pi)
    assert reduce_angle(-np.pi + 0.1) == pytest.approx(-np.pi + 0.1)
    assert reduce_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


# -- ellipsoids --------------------------------------------------------------------------


def test_ellipsoid_map_examples():
    assert np.allclose(ellipsoid_map(2.0, [1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
    N = 10.0
    assert np.allclose(ellipsoid_map(N, [0.0, 0.0, 1.0 / N]), [0.0, 0.0, 1.0 / N + 1.0])
    assert np.allclose(ellipsoid_map(N, [0.0, 0.0, -1.0 / N]), [0.0, 0.0, -1.0 / N])


def test_ellipsoid_map_rejects_off_surface():
    with pytest.raises(ValueError):
        ellipsoid_map(2.0, [1.0, 1.0, 1.0])


def test_ellipsoid_map_many_matches_single():
    N = 3.0
    rng = np.random.default_rng(8)
    u = rng.normal(size=(20, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    pts = np.asarray([ellipsoid_point(N, v) for v in u])
    batch = ellipsoid_map_many(N, pts)
    singles = np.asarray([ellipsoid_map(N, p) for p in pts])
    assert np.allclose(batch, singles)


def test_icosphere_counts():
    verts, faces = icosphere(2)
    assert len(verts) == 10 * 4**2 + 2
    assert len(faces) == 20 * 4**2
    assert np.allclose(np.linalg.norm(verts, axis=1), 1.0)


def test_mesh_oracle_against_sphere():
    mesh = EllipsoidMesh(1.0, level=4)
    rng = np.random.default_rng(9)
    src = mesh.sample_vertex_indices(10, rng)
    tgt = mesh.sample_vertex_indices(200, rng)
    mat = mesh.vertex_distances(src)[:, tgt]
    exact = np.arccos(np.clip(mesh.vertices[src] @ mesh.vertices[tgt].T, -1, 1))
    mask = exact > 10 * mesh.edge_length
    ratio = mat[mask] / exact[mask]
    # chord weights slightly undershoot arcs; path indirectness overshoots
    assert np.all(ratio >= 0.99)
    assert np.all(ratio <= 1.05)


def test_mesh_pair_distances_grouping():
    mesh = EllipsoidMesh(2.0, level=3)
    rng = np.random.default_rng(10)
    idx = mesh.sample_vertex_indices(12, rng)
    A = mesh.vertices[idx[:6]]
    B = mesh.vertices[idx[6:]]
    d = mesh.pair_distances(A, B)
    for i in range(6):
        assert d[i] == pytest.approx(mesh.quotient_distance(A[i], B[i]))


def test_construct_ellipsoid():
    mesh = construct_space({"kind": "ellipsoid", "N": 5.0, "mesh_level": 3})
    assert isinstance(mesh, EllipsoidMesh)
    assert mesh.contains(ellipsoid_point(5.0, [0.0, 0.0, 1.0]))
