#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import math
import os

import numpy as np

from sensorimotor.exceptions import InvalidInputError
from sensorimotor.utils import atomic_write, content_digest, require_finite, wrap_angle

from .test_cases import SensorimotorTestCase, TestCase


class TestWrapAngle(TestCase):
    def test_range_is_half_open(self):
        self.assertEqual(math.pi, wrap_angle(math.pi))
        self.assertAlmostEqual(math.pi, wrap_angle(-math.pi))
        self.assertEqual(0.0, wrap_angle(0.0))

    def test_wraps_many_turns(self):
        self.assertAlmostEqual(0.5, wrap_angle(0.5 + 6 * math.pi))
        self.assertAlmostEqual(-0.5, wrap_angle(-0.5 - 4 * math.pi))

    def test_arrays(self):
        angles = np.linspace(-20, 20, 1001)
        wrapped = wrap_angle(angles)
        self.assertTrue(np.all(wrapped > -math.pi))
        self.assertTrue(np.all(wrapped <= math.pi))
        np.testing.assert_allclose(np.cos(angles), np.cos(wrapped), atol=1e-12)


class TestContentDigest(TestCase):
    def test_ignores_key_order(self):
        self.assertEqual(content_digest({"a": 1, "b": 2}), content_digest({"b": 2, "a": 1}))

    def test_sees_values(self):
        self.assertNotEqual(content_digest({"a": 1}), content_digest({"a": 2}))

    def test_is_sha256_hex(self):
        self.assertEqual(64, len(content_digest([])))


class TestRequireFinite(TestCase):
    def test_rejects_nan_and_inf(self):
        require_finite("x", 1.0, np.zeros(3))
        self.assertRaises(InvalidInputError, require_finite, "x", 1.0, float("nan"))
        self.assertRaises(InvalidInputError, require_finite, "x", np.array([0.0, np.inf]))


class TestAtomicWrite(SensorimotorTestCase):
    def test_writes_the_file(self):
        with atomic_write(self.path("out.txt")) as f:
            f.write("hello\n")
        self.assertEqual("hello\n", self.read_text("out.txt"))
        self.assertEqual(["out.txt"], os.listdir(self.tmpdir))

    def test_keeps_the_old_file_on_error(self):
        with open(self.path("out.txt"), "w") as f:
            f.write("old\n")
        try:
            with atomic_write(self.path("out.txt")) as f:
                f.write("new\n")
                raise RuntimeError("boom")
        except RuntimeError:
            pass
        self.assertEqual("old\n", self.read_text("out.txt"))
        self.assertEqual(["out.txt"], os.listdir(self.tmpdir))
