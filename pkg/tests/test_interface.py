"""Level-set extraction, radius estimates, the radial oracle, Hausdorff distance."""

import numpy as np
import pytest

from actx.grid import GridSpec, ScalarField
from actx.interface import (
    InterfaceError,
    InterfaceSet,
    extract_interface,
    hausdorff_distance,
    mcf_oracle,
    radius_estimate,
)

SPEC = GridSpec(2, (0.0, 0.0), (1.0, 1.0), (128, 128))


def circle_field(R, eps=8 / 128, center=(0.5, 0.5), spec=SPEC):
    return ScalarField.sample(
        spec,
        lambda x, y: np.tanh((R - np.sqrt((x - center[0]) ** 2 + (y - center[1]) ** 2)) / eps),
    )


class TestExtract:
    def test_linear_field_gives_exact_line(self):
        f = ScalarField.sample(SPEC, lambda x, y: x - 0.5)
        iset = extract_interface(f)
        assert not iset.is_empty
        assert np.max(np.abs(iset.vertices[:, 0] - 0.5)) < 1e-12
        assert iset.total_measure() == pytest.approx(1.0, abs=1e-12)

    def test_circle_perimeter(self):
        R = 0.25
        iset = extract_interface(circle_field(R))
        assert abs(iset.total_measure() - 2 * np.pi * R) <= 2 * SPEC.h

    def test_constant_field_empty(self):
        assert extract_interface(ScalarField.full(SPEC, -1.0)).is_empty

    def test_vertices_on_sign_change_edges(self):
        iset = extract_interface(circle_field(0.3))
        f = circle_field(0.3)
        # every vertex must lie within one cell of the zero level
        r = np.sqrt(np.sum((iset.vertices - 0.5) ** 2, axis=-1))
        assert np.max(np.abs(r - 0.3)) < 3 * SPEC.h

    def test_saddle_cells_resolved_by_average(self):
        # quadrant checkerboard: x*y - like saddle at the center
        f = ScalarField.sample(SPEC, lambda x, y: (x - 0.5) * (y - 0.5) + 1e-9)
        iset = extract_interface(f)
        assert not iset.is_empty

    def test_marching_cubes_sphere_area(self):
        spec3 = GridSpec(3, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (48, 48, 48))
        R = 0.3
        f = ScalarField.sample(
            spec3,
            lambda x, y, z: np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2 + (z - 0.5) ** 2) - R,
        )
        iset = extract_interface(f)
        assert iset.dim == 3 and not iset.is_empty
        assert iset.total_measure() == pytest.approx(4 * np.pi * R**2, rel=0.02)

    def test_marching_cubes_plane_exact(self):
        spec3 = GridSpec(3, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (16, 16, 16))
        f = ScalarField.sample(spec3, lambda x, y, z: z - 0.5)
        iset = extract_interface(f)
        assert np.max(np.abs(iset.vertices[:, 2] - 0.5)) < 1e-12
        assert iset.total_measure() == pytest.approx(1.0, abs=1e-10)


class TestRadiusEstimate:
    def test_exact_circle_vertices(self):
        ang = np.linspace(0, 2 * np.pi, 256, endpoint=False)
        pts = 0.5 + 0.2 * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        segs = np.stack([pts, np.roll(pts, -1, axis=0)], axis=1)
        mean, spread = radius_estimate(InterfaceSet(2, segs), (0.5, 0.5))
        assert mean == pytest.approx(0.2, abs=1e-12)
        assert spread <= 1e-12

    def test_tanh_circle(self):
        mean, spread = radius_estimate(extract_interface(circle_field(0.25)), (0.5, 0.5))
        assert abs(mean - 0.25) <= SPEC.h
        assert spread <= 2 * SPEC.h

    def test_square_flags_non_circularity(self):
        a = 0.3
        f = ScalarField.sample(
            SPEC, lambda x, y: np.maximum(np.abs(x - 0.5), np.abs(y - 0.5)) - a
        )
        mean, spread = radius_estimate(extract_interface(f), (0.5, 0.5))
        assert spread == pytest.approx((np.sqrt(2) - 1) * a, abs=3 * SPEC.h)

    def test_empty_rejected(self):
        with pytest.raises(InterfaceError):
            radius_estimate(InterfaceSet(2, np.zeros((0, 2, 2))), (0.5, 0.5))


class TestOracle:
    def test_pure_curvature_closed_form(self):
        traj = mcf_oracle(0.25, 0.0, 2, 0.01)
        assert traj.radius(0.01) == pytest.approx(np.sqrt(0.0625 - 0.02), abs=1e-9)

    def test_equilibrium_radius_is_stationary(self):
        traj = mcf_oracle(0.25, 16.0, 2, 0.05, n_samples=21)
        assert np.max(np.abs(traj.radii - 0.25)) < 1e-12
        assert traj.extinction_time is None

    def test_extinction_time_closed_form(self):
        traj = mcf_oracle(0.25, 0.0, 2, 0.04)
        assert traj.extinction_time == pytest.approx(0.25**2 / 2, abs=1e-8)
        assert np.isnan(traj.radius(0.04))

    def test_three_dimensions(self):
        # n = 3: R^2 = R0^2 - 4t
        traj = mcf_oracle(0.3, 0.0, 3, 0.01)
        assert traj.radius(0.01) == pytest.approx(np.sqrt(0.09 - 0.04), abs=1e-9)

    def test_energy_consistency(self):
        # c = 0, n = 2: R dR/dt = -1 at all sampled times (y = R^2 is linear)
        traj = mcf_oracle(0.25, 0.0, 2, 0.02, n_samples=101)
        y = traj.radii**2
        slopes = np.diff(y) / np.diff(traj.times)
        assert np.max(np.abs(slopes / 2 + 1.0)) < 1e-8

    def test_growth_with_transport(self):
        # c > 0 from above the equilibrium: closed form y = 1/c + (y0 - 1/c) e^{2ct}
        c, r0, t = 16.0, 0.3, 0.03
        traj = mcf_oracle(r0, c, 2, t)
        want = np.sqrt(1 / c + (r0**2 - 1 / c) * np.exp(2 * c * t))
        assert traj.radius(t) == pytest.approx(want, rel=1e-9)

    def test_bad_parameters(self):
        with pytest.raises(InterfaceError):
            mcf_oracle(-0.1, 0.0, 2, 0.01)
        with pytest.raises(InterfaceError):
            mcf_oracle(0.1, 0.0, 2, -1.0)


class TestHausdorff:
    def test_identical_sets(self):
        iset = extract_interface(circle_field(0.25))
        assert hausdorff_distance(iset, iset) == 0.0

    def test_concentric_circles(self):
        delta = 0.04
        a = extract_interface(circle_field(0.21))
        b = extract_interface(circle_field(0.25))
        assert hausdorff_distance(a, b) == pytest.approx(delta, abs=2 * SPEC.h)

    def test_translation(self):
        v = np.array([0.05, 0.02])
        a = extract_interface(circle_field(0.2, center=(0.45, 0.5)))
        b = extract_interface(circle_field(0.2, center=(0.45 + v[0], 0.5 + v[1])))
        assert hausdorff_distance(a, b) == pytest.approx(np.linalg.norm(v), abs=2 * SPEC.h)

    def test_extraction_recovers_shape_within_2h(self):
        # profile of an exact circle: extraction stays within 2h Hausdorff
        ang = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
        pts = 0.5 + 0.25 * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        exact = InterfaceSet(2, np.stack([pts, np.roll(pts, -1, axis=0)], axis=1))
        approx = extract_interface(circle_field(0.25, eps=4 * SPEC.h))
        assert hausdorff_distance(approx, exact) <= 2 * SPEC.h

    def test_empty_rejected(self):
        iset = extract_interface(circle_field(0.25))
        with pytest.raises(InterfaceError):
            hausdorff_distance(iset, InterfaceSet(2, np.zeros((0, 2, 2))))
