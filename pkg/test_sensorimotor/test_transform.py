#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import numpy as np

from sensorimotor.analysis import (
    MappedProbe,
    ProbeSet,
    distortion_metrics,
    generate_probe,
    grid_non_uniformity,
    map_to_sensor_space,
    straightness_deviation,
)
from sensorimotor.dataset import denormalize, normalize_sensors
from sensorimotor.exceptions import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidInputError,
)
from sensorimotor.sim import Arena

from .test_cases import TestCase, identity_sensors, make_dataset


def lattice_dataset(yaw=0.0):
    """ Records on a 0.1 m lattice whose sensors read their own position. """
    xs = np.round(np.linspace(-4.0, 4.0, 81), 10)
    ys = np.round(np.linspace(-1.0, 1.0, 21), 10)
    gx, gy = np.meshgrid(xs, ys)
    return make_dataset(np.column_stack((gx.ravel(), gy.ravel())), yaw=yaw)


def one_sensor_dataset(ends, values):
    sensors = np.zeros((len(values), 16))
    sensors[:, 0] = values
    sensors[:, 1] = np.arange(len(values))
    return make_dataset(ends, sensors)


class TestGenerateProbe(TestCase):
    def test_two_point_line(self):
        probe = generate_probe("line", (0, 0), (1, 2), 2)
        self.assertEqual([[0.0, 0.0], [1.0, 2.0]], probe.points.tolist())

    def test_line_spacing(self):
        probe = generate_probe("line", (0, 0), (4, 0), 5, Arena())
        self.assertEqual([0.0, 1.0, 2.0, 3.0, 4.0], probe.points[:, 0].tolist())

    def test_grid_is_row_major(self):
        probe = generate_probe("grid", (0, 0), (1, 1), (2, 2))
        self.assertEqual([[0, 0], [1, 0], [0, 1], [1, 1]], probe.points.tolist())
        self.assertEqual((2, 2), probe.topology)

    def test_invalid_probes(self):
        self.assertRaises(InvalidInputError, generate_probe, "line", (0, 0), (6, 0), 3, Arena())
        self.assertRaises(InvalidInputError, generate_probe, "line", (0, 0), (1, 0), 1)
        self.assertRaises(InvalidInputError, generate_probe, "grid", (0, 0), (1, 0), (1, 3))
        self.assertRaises(InvalidInputError, generate_probe, "spiral", (0, 0), (1, 0), 3)


class TestMapToSensorSpace(TestCase):
    def test_point_on_record_with_one_neighbor(self):
        dataset = make_dataset(np.random.default_rng(0).uniform(-4, 4, (50, 2)))
        probe = ProbeSet("line", dataset.ends[[7, 9]])
        mapped = map_to_sensor_space(probe, dataset, (0.0, 0.1), k=1)
        normalized, _, _ = normalize_sensors(dataset)
        self.assertEqual(normalized[7].tolist(), mapped.images[0].tolist())
        self.assertEqual([1, 1], mapped.coverage.tolist())

    def test_median_of_neighbors(self):
        dataset = one_sensor_dataset([(0, 0.1), (0.1, 0), (-0.1, 0)], [1.0, 5.0, 100.0])
        mapped = map_to_sensor_space(ProbeSet("line", [(0, 0)]), dataset, (0.0, 0.1), k=3)
        _, mins, maxs = normalize_sensors(dataset)
        self.assertAlmostEqual(5.0, denormalize(mapped.images, mins, maxs)[0, 0])

    def test_even_k_takes_lower_median(self):
        ends = [(0.1, 0), (-0.1, 0), (0, 0.1), (0, -0.1), (3, 3)]
        dataset = one_sensor_dataset(ends, [1.0, 2.0, 3.0, 4.0, 9.0])
        mapped = map_to_sensor_space(ProbeSet("line", [(0, 0)]), dataset, (0.0, 0.1), k=4)
        _, mins, maxs = normalize_sensors(dataset)
        self.assertAlmostEqual(2.0, denormalize(mapped.images, mins, maxs)[0, 0])

    def test_median_resists_outliers(self):
        ends = [(0.1 * i, 0.0) for i in range(1, 6)] + [(4.0, 4.0)]
        clean = one_sensor_dataset(ends, [1.0, 2.0, 3.0, 4.0, 5.0, 1000.0])
        corrupt = one_sensor_dataset(ends, [1.0, 2.0, 3.0, 900.0, 950.0, 1000.0])
        probe = ProbeSet("line", [(0.0, 0.0)])
        images = []
        for dataset in (clean, corrupt):
            mapped = map_to_sensor_space(probe, dataset, (0.0, 0.1), k=5)
            _, mins, maxs = normalize_sensors(dataset)
            images.append(round(denormalize(mapped.images, mins, maxs)[0, 0], 9))
        self.assertEqual([3.0, 3.0], images)

    def test_identity_embedding_keeps_lines_straight(self):
        probe = generate_probe("line", (-3.0, 0.0), (3.0, 0.0), 13, Arena())
        mapped = map_to_sensor_space(probe, lattice_dataset(), (0.0, 0.1), k=5)
        straightness, non_uniformity = distortion_metrics(mapped)
        self.assertLess(straightness, 1e-6)
        self.assertIsNone(non_uniformity)

        plane = mapped.plane
        gaps = np.linalg.norm(np.diff(plane, axis=0), axis=1)
        skips = np.linalg.norm(plane[2:] - plane[:-2], axis=1)
        self.assertTrue(np.all(gaps[:-1] < skips))

    def test_identity_embedding_keeps_grids_uniform(self):
        probe = generate_probe("grid", (-2.0, -0.5), (2.0, 0.5), (5, 3), Arena())
        mapped = map_to_sensor_space(probe, lattice_dataset(), (0.0, 0.1), k=5)
        straightness, non_uniformity = distortion_metrics(mapped)
        self.assertLess(straightness, 1e-6)
        self.assertLess(non_uniformity, 1e-6)

    def test_deterministic(self):
        dataset = make_dataset(np.random.default_rng(1).uniform(-4, 4, (300, 2)))
        probe = generate_probe("line", (-2, -2), (2, 2), 9)
        a = map_to_sensor_space(probe, dataset, (0.0, 0.1))
        b = map_to_sensor_space(probe, dataset, (0.0, 0.1))
        self.assertEqual(a.plane.tolist(), b.plane.tolist())

    def test_yaw_tolerance_changes_images(self):
        rng = np.random.default_rng(2)
        ends = rng.uniform(-4, 4, (600, 2))
        yaw = np.where(np.arange(600) % 2, 0.3, 0.0)
        sensors = identity_sensors(ends)
        sensors[yaw > 0] *= -1
        dataset = make_dataset(ends, sensors, yaw)
        probe = generate_probe("line", (-3, 0), (3, 0), 7)
        narrow = map_to_sensor_space(probe, dataset, (0.0, 0.01))
        wide = map_to_sensor_space(probe, dataset, (0.0, 0.5))
        self.assertGreater(np.abs(narrow.images - wide.images).max(), 1e-6)

    def test_too_few_records(self):
        dataset = make_dataset(np.zeros((5, 2)))
        probe = generate_probe("line", (0, 0), (1, 0), 3)
        self.assertRaises(InsufficientDataError, map_to_sensor_space, probe, dataset, (0.0, 0.1), 10)

    def test_far_points_are_flagged(self):
        dataset = make_dataset(np.random.default_rng(3).uniform(-1, 1, (100, 2)))
        probe = generate_probe("line", (0, 0), (4, 4), 3)
        mapped = map_to_sensor_space(probe, dataset, (0.0, 0.1), k=5, max_radius=0.5)
        self.assertEqual([5, 0, 0], mapped.coverage.tolist())
        self.assertEqual([False, True, True], mapped.flagged.tolist())
        self.assertTrue(np.all(np.isnan(mapped.images[1:])))
        self.assertRaises(DegenerateInputError, distortion_metrics, mapped)


class TestDistortionMetrics(TestCase):
    def test_collinear_points(self):
        self.assertEqual(0.0, straightness_deviation([(0, 0), (1, 1), (2, 2), (3, 3)]))

    def test_right_angle(self):
        self.assertAlmostEqual(0.5, straightness_deviation([(0, 0), (1, 0), (1, 1)]))

    def test_degenerate_chord(self):
        self.assertRaises(DegenerateInputError, straightness_deviation, [(0, 0), (1, 0), (0, 0)])

    def test_uniform_lattice(self):
        gx, gy = np.meshgrid(np.arange(4.0), np.arange(3.0))
        points = np.column_stack((gx.ravel(), gy.ravel()))
        self.assertEqual(0.0, grid_non_uniformity(points, 4, 3))

    def test_warped_lattice(self):
        gx, gy = np.meshgrid(np.arange(3.0), np.arange(3.0))
        points = np.column_stack((gx.ravel() ** 2, gy.ravel()))
        self.assertGreater(grid_non_uniformity(points, 3, 3), 0.1)

    def test_grid_reports_worst_line(self):
        gx, gy = np.meshgrid(np.arange(3.0), np.arange(3.0))
        plane = np.column_stack((gx.ravel(), gy.ravel()))
        plane[4] = (1.0, 1.5)
        probe = ProbeSet("grid", plane, (3, 3))
        mapped = MappedProbe(probe, plane, plane, np.full(9, 5), 5)
        straightness, _ = distortion_metrics(mapped)
        self.assertAlmostEqual(0.25, straightness)

    def test_collapsed_row_is_skipped(self):
        gx, gy = np.meshgrid(np.arange(3.0), np.arange(3.0))
        plane = np.column_stack((gx.ravel(), gy.ravel()))
        plane[:3] = 0.0
        mapped = MappedProbe(ProbeSet("grid", plane, (3, 3)), plane, plane, np.full(9, 5), 5)
        straightness, non_uniformity = distortion_metrics(mapped)
        self.assertAlmostEqual(0.25, straightness)
        self.assertAlmostEqual(1.0 / 3.0, non_uniformity)

    def test_two_by_two_grid_has_no_straightness(self):
        plane = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])
        mapped = MappedProbe(ProbeSet("grid", plane, (2, 2)), plane, plane, np.full(4, 5), 5)
        self.assertEqual((None, 0.0), distortion_metrics(mapped))

    def test_fully_collapsed_grid(self):
        plane = np.zeros((9, 2))
        mapped = MappedProbe(ProbeSet("grid", plane, (3, 3)), plane, plane, np.full(9, 5), 5)
        self.assertEqual((None, None), distortion_metrics(mapped))
