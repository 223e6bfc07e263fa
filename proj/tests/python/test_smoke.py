import cmath
import json
import math

import numpy as np
import pytest

import invisim

S3 = math.sqrt(3.0)


@pytest.fixture(scope="module")
def obstacle():
    return invisim.build_obstacle()


def test_obstacle_constants(obstacle):
    assert obstacle.delta == pytest.approx(S3 / 4, abs=1e-14)
    assert obstacle.d == pytest.approx(S3 / 2, abs=1e-14)
    assert obstacle.geom_cross == pytest.approx(0.5)
    assert invisim.phase_shift_delta(obstacle) == pytest.approx(S3 / 4)
    data = json.loads(obstacle.to_json())
    assert len(data["faces"]) == len(obstacle.faces)


def test_bad_dimensions_raise_config_error():
    with pytest.raises(invisim.ConfigError):
        invisim.build_obstacle(width=0.0)
    assert issubclass(invisim.ConfigError, invisim.Error)
    assert issubclass(invisim.Error, RuntimeError)


def test_trace_ray_through_left_pair(obstacle):
    path = invisim.trace_ray(-0.4, 0.5, obstacle)
    assert path["collisions"] == 2
    assert path["excess"] == pytest.approx(S3 / 4, abs=1e-12)
    np.testing.assert_allclose(path["exit_direction"], [0, 0, 1], atol=1e-14)
    with pytest.raises(invisim.EdgeHit):
        invisim.trace_ray(0.25, 0.5, obstacle)


def test_reflection_coefficient_neumann_and_dirichlet_limits():
    assert invisim.reflection_coefficient(0.0) == pytest.approx(1.0)
    with pytest.raises(invisim.ConfigError):
        invisim.reflection_coefficient(-1j)


def test_eikonal_field_above_and_below(obstacle):
    k = 40.0
    value, branches, _ = invisim.eikonal_field([0.1, 0.3, -0.5], k, 0.0, obstacle)
    assert branches == 1
    assert value == pytest.approx(cmath.exp(1j * k * -0.5))
    z = S3 / 2 + 0.5
    value, _, _ = invisim.eikonal_field([-0.4, 0.3, z], k, 0.0, obstacle)
    assert value == pytest.approx(cmath.exp(1j * k * (z + S3 / 4)))


def test_far_field_forward_vanishes_at_resonance(obstacle):
    k = 2 * math.pi / obstacle.delta * 3
    ff = invisim.ClosedFormFarField(obstacle, k, 0.0)
    assert abs(ff.angular_factor([0, 0, 1])) < 1e-10
    p0s = [S3 / 2, 0.0, 0.5]
    assert abs(ff.angular_factor(p0s)) < 1e-12


def test_spherical_grid_weights(obstacle):
    nodes, weights = invisim.spherical_grid(obstacle, 30.0)
    assert nodes.shape[1] == 3
    assert weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(nodes, axis=1), 1.0, atol=1e-12)


def test_cross_section_report_tracks_asymptote(obstacle):
    rep = invisim.cross_section_report(obstacle, 60.0, 0.5)
    assert rep["sigma_surface"] is None
    assert rep["sigma_asym"] == pytest.approx(invisim.sigma_asymptotic(60.0, 0.5, obstacle.delta))
    assert abs(rep["sigma_grid"] - rep["sigma_asym"]) < 0.3
    many = invisim.cross_sections_for_impedances(obstacle, 60.0, [0.5, 0.0])
    assert many[0] == pytest.approx(rep["sigma_grid"], rel=1e-9)


def test_resonances_and_average(obstacle):
    table = invisim.resonant_frequencies(0.0, 1, 3, obstacle.delta)
    ks = [k for _, k in table]
    assert np.allclose(np.diff(ks), 2 * math.pi / obstacle.delta)
    rows = invisim.impedance_average(obstacle, 0.5, [3, 4])
    assert [r["n"] for r in rows] == [3, 4]
    for r in rows:
        assert r["eps"] == pytest.approx(r["k"] ** -0.25)
        assert r["averaged"] >= 0.0


def test_near_field_values(obstacle):
    field = invisim.KirchhoffField(obstacle, 20.0, 0.0, ppw=6.0)
    pts = np.array([[0.0, 0.5, -0.6], [0.0, 0.5, 1.6]])
    vals = field.values(pts)
    assert vals.shape == (2,)
    value, grad, zone = field.sample(pts[0])
    assert value == pytest.approx(vals[0])
    assert len(grad) == 3
    assert isinstance(zone, invisim.Zone)
