import math

import numpy as np
import pytest

from irrcontact.extremal import icosa_config, k5_config
from irrcontact.rigidity import (
    RigidityFlags,
    d_reflection_exists,
    is_irreducible,
    rigidity_flags,
    vertex_shiftable,
)
from irrcontact.sphere_geom import SphericalConfig, from_spherical

from conftest import octahedron_points


def ring(d, azimuths):
    """Points at distance ``d`` from the north pole at the given azimuths."""
    return [from_spherical(d, a) for a in azimuths]


def with_pole(points, extra=()):
    p = [np.array([0.0, 0.0, 1.0])] + list(points) + list(extra)
    return SphericalConfig.from_points(np.array(p))


# a close pair near the south pole keeps psi small when needed
SOUTH_PAIR = [from_spherical(math.pi - 0.2, 0.0), from_spherical(math.pi - 0.2, math.pi)]


def test_degree_two_open_half_plane():
    cfg = with_pole(ring(1.0, [0.0, 2.0]))
    ok, u = vertex_shiftable(cfg, 0)
    assert ok
    assert abs(np.dot(u, cfg.points[0])) < 1e-12


def test_octahedron_vertices_fixed():
    cfg = SphericalConfig.from_points(octahedron_points())
    assert not any(vertex_shiftable(cfg, v)[0] for v in range(6))


def test_isolated_vertex_at_local_max():
    pts = ring(1.2, [0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    cfg = with_pole(pts, SOUTH_PAIR)
    assert cfg.psi < 1.0
    assert cfg.degrees()[0] == 0
    assert not vertex_shiftable(cfg, 0)[0]


def test_isolated_vertex_off_centre_moves():
    pts = ring(1.2, [0.0, 1.0, 2.0])
    cfg = with_pole(pts, SOUTH_PAIR)
    assert vertex_shiftable(cfg, 0)[0]


def test_antipodal_contacts_second_order():
    # two opposite contacts closer than pi/2: moving sideways gains distance
    cfg = with_pole(ring(1.0, [0.0, math.pi]))
    assert vertex_shiftable(cfg, 0)[0]


def test_antipodal_contacts_at_right_angle_tie():
    # contacts at +-x and +y: the only open direction is -y, along which
    # the distances to +-x stay exactly pi/2
    cfg = with_pole(ring(math.pi / 2, [0.0, math.pi, math.pi / 2]))
    assert cfg.degrees()[0] == 3
    assert not vertex_shiftable(cfg, 0)[0]


def test_index_error():
    cfg = SphericalConfig.from_points(octahedron_points())
    with pytest.raises(IndexError):
        vertex_shiftable(cfg, 6)


def test_irreducible_examples():
    assert is_irreducible(icosa_config(12)).irreducible
    flags = is_irreducible(icosa_config(10))
    assert not flags.irreducible
    v, u = flags.shift_witness
    assert len(u) == 3


def test_pole_and_square():
    # equator points can only move south, which keeps their distances to
    # both square neighbours at exactly pi/2: no strict gain anywhere
    flags = is_irreducible(k5_config())
    assert flags.irreducible


def test_reflection_octahedron_none():
    assert d_reflection_exists(SphericalConfig.from_points(octahedron_points())) is None


def test_reflection_found():
    # a cap vertex over a square whose reflection lands in open space
    cfg = with_pole(ring(1.0, [0.0, 2.0]), [from_spherical(2.5, 1.0)])
    w = d_reflection_exists(cfg)
    assert w is not None and w[0] == 0


def test_flags_consistency():
    with pytest.raises(ValueError):
        RigidityFlags(irreducible=False, d_irreducible=True)
    f = rigidity_flags(icosa_config(11))
    assert f.irreducible and f.d_irreducible
    back = RigidityFlags.from_dict(f.to_dict())
    assert back == f


def test_flags_round_trip_with_witness():
    f = rigidity_flags(icosa_config(10))
    back = RigidityFlags.from_dict(f.to_dict())
    assert back.shift_witness[0] == f.shift_witness[0]
    assert np.allclose(back.shift_witness[1], f.shift_witness[1])


def _sampled_shift(cfg, v, rng, samples=10_000, step=1e-5):
    p = cfg.points[v]
    others = np.delete(cfg.points, v, axis=0)
    base = float(np.max(others @ p))
    u = rng.normal(size=(samples, 3))
    u -= np.outer(u @ p, p)
    u /= np.linalg.norm(u, axis=1)[:, None]
    y = p * math.cos(step) + u * math.sin(step)
    return bool(np.any((y @ others.T).max(axis=1) < base))


def test_tangent_cone_matches_sampling():
    rng = np.random.default_rng(7)
    agree = 0
    while agree < 50:
        k = int(rng.integers(1, 6))
        d = float(rng.uniform(0.6, 1.3))
        az = np.sort(rng.uniform(0, 2 * math.pi, k))
        gaps = np.diff(np.append(az, az[0] + 2 * math.pi))
        if abs(gaps.max() - math.pi) < 0.05:
            continue
        cfg = with_pole(ring(d, az))
        assert vertex_shiftable(cfg, 0)[0] == _sampled_shift(cfg, 0, rng)
        agree += 1
