import math

import numpy as np
import pytest

from spheresym.errors import DomainError, SingularityError
from spheresym.geometry.sphere_mesh import SphereFunction
from spheresym.geometry.stereographic import (
    PlaneFunction,
    conformal_factor,
    conformal_transport,
    pull_back,
    stereographic_forward,
    stereographic_inverse,
)


def gaussian(x):
    return np.exp(-np.sum(x * x, axis=-1))

# ----------------------------
# Projection
# ----------------------------

def test_south_pole_maps_to_origin():
    np.testing.assert_allclose(stereographic_forward(np.array([0.0, 0.0, -1.0])), [0.0, 0.0], atol=1e-15)


def test_equator_maps_to_unit_circle():
    angles = np.linspace(0.0, 2 * math.pi, 17)
    equator = np.column_stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)])
    np.testing.assert_allclose(np.linalg.norm(stereographic_forward(equator), axis=1), 1.0, atol=1e-15)


def test_north_pole_is_singular():
    with pytest.raises(SingularityError):
        stereographic_forward(np.array([[0.0, 0.0, 1.0]]))


def test_round_trip_plane_points(rng):
    x = rng.uniform(-5.0, 5.0, size=(1000, 2))
    np.testing.assert_allclose(stereographic_forward(stereographic_inverse(x)), x, atol=1e-12)


def test_round_trip_sphere_points(rng):
    p = rng.normal(size=(1000, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    p = p[p[:, 2] < 0.99]
    np.testing.assert_allclose(stereographic_inverse(stereographic_forward(p)), p, atol=1e-12)


def test_inverse_lands_on_sphere(rng):
    x = rng.normal(scale=3.0, size=(200, 2))
    np.testing.assert_allclose(np.linalg.norm(stereographic_inverse(x), axis=1), 1.0, atol=1e-14)


def test_conformal_factor_at_south_pole():
    assert conformal_factor(np.array([0.0, 0.0, -1.0])) == pytest.approx(0.25)

# ----------------------------
# Transport
# ----------------------------

def test_zero_density_transports_to_zero(mesh3):
    xs = np.linspace(-2.0, 2.0, 5)
    g = PlaneFunction(xs, xs, np.zeros((5, 5)))
    f = conformal_transport(mesh3, g)
    assert isinstance(f, SphereFunction)
    assert not np.any(f.values)


def test_gaussian_mass_is_preserved(mesh5):
    f = conformal_transport(mesh5, gaussian)
    assert f.integral() == pytest.approx(math.pi, rel=1e-2)


def test_unit_disc_mass_is_preserved(mesh5):
    f = conformal_transport(mesh5, lambda x: (np.sum(x * x, axis=-1) < 1.0).astype(float))
    assert f.integral() == pytest.approx(math.pi, rel=1e-2)


def test_gaussian_mass_error_halves_per_level(mesh3, mesh4, mesh5):
    errors = [abs(conformal_transport(m, gaussian).integral() - math.pi) for m in (mesh3, mesh4, mesh5)]
    assert errors[1] <= 0.5 * errors[0]
    assert errors[2] <= 0.5 * errors[1]


def test_dirichlet_energy_is_conformally_invariant(mesh5):
    # int |grad exp(-|x|^2)|^2 dx = pi
    values = gaussian(stereographic_forward(mesh5.vertices))
    assert mesh5.dirichlet_energy(values) == pytest.approx(math.pi, rel=1e-2)


def test_non_integrable_density_rejected(mesh3):
    with pytest.raises(DomainError):
        conformal_transport(mesh3, lambda x: np.ones(x.shape[0]))


def test_pull_back_recovers_plane_values(mesh5):
    w = SphereFunction(mesh5, gaussian(stereographic_forward(mesh5.vertices)))
    x = np.array([[0.0, 0.0], [0.5, -0.3], [1.0, 1.0]])
    np.testing.assert_allclose(pull_back(mesh5, w, x), gaussian(x), atol=5e-3)


def test_plane_function_validates_shape():
    with pytest.raises(ValueError):
        PlaneFunction(np.arange(3.0), np.arange(4.0), np.zeros((4, 3)))
