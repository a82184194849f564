#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import json
import os
import shutil
import tempfile
from io import StringIO

from mock import patch

from sensorimotor.cli import main
from sensorimotor.dataset import log_header, read_log

from .test_cases import SensorimotorTestCase
from .test_explore import InterruptedWriter


class CliTestCase(SensorimotorTestCase):
    def run_cli(self, *argv):
        with patch("sys.stderr", new_callable=StringIO) as stderr, patch(
            "sys.stdout", new_callable=StringIO
        ):
            code = main(list(argv))
        self.stderr = stderr.getvalue()
        return code

    def manifest(self, *parts):
        return json.loads(self.read_text(*parts))


class TestSimulate(CliTestCase):
    def test_zero_actions_write_a_header(self):
        log = self.path("log.csv")
        self.assertEqual(0, self.run_cli("simulate", "--n-actions", "0", "--out", log, "--seed", "1"))
        self.assertEqual(log_header() + "\n", self.read_text("log.csv"))

        manifest = self.manifest("log.manifest.json")
        self.assertEqual("simulate", manifest["subcommand"])
        self.assertEqual([log, self.path("log.checkpoint.json")], manifest["outputs"])
        self.assertEqual(0, manifest["parameters"]["summary"]["actions"])

    def test_log_goes_into_an_output_directory(self):
        out = self.path("run")
        self.assertEqual(0, self.run_cli("simulate", "--n-actions", "3", "--out", out, "--seed", "2"))
        self.assertEqual(3, len(read_log(os.path.join(out, "log.csv"))))

    def test_config_file_and_resume(self):
        config = self.path("run.conf")
        with open(config, "w") as f:
            f.write("seed = 5\nnoise = on\ncheckpoint_every = 4\n")
        whole, part = self.path("whole.csv"), self.path("part.csv")
        self.assertEqual(0, self.run_cli("simulate", "--config", config, "--n-actions", "10", "--out", whole))
        self.assertEqual(0, self.run_cli("simulate", "--config", config, "--n-actions", "6", "--out", part))
        self.assertEqual(
            0,
            self.run_cli("simulate", "--config", config, "--n-actions", "10", "--out", part, "--resume"),
        )
        self.assertEqual(self.read_text("whole.csv"), self.read_text("part.csv"))

    def test_interrupt_then_resume(self):
        config = self.path("run.conf")
        with open(config, "w") as f:
            f.write("seed = 8\nnoise = on\ncheckpoint_every = 10\n")
        whole, part = self.path("whole.csv"), self.path("part.csv")
        self.assertEqual(0, self.run_cli("simulate", "--config", config, "--n-actions", "60", "--out", whole))

        def writer(path, **kwargs):
            return InterruptedWriter(path, 37, **kwargs)

        with patch("sensorimotor.cli.LogWriter", side_effect=writer):
            code = self.run_cli("simulate", "--config", config, "--n-actions", "60", "--out", part)
        self.assertEqual(130, code)
        self.assertIn("interrupted", self.stderr)
        self.assertEqual(30, len(read_log(part)))
        self.assertFalse(os.path.exists(self.path("part.manifest.json")))

        self.assertEqual(
            0,
            self.run_cli("simulate", "--config", config, "--n-actions", "60", "--out", part, "--resume"),
        )
        self.assertEqual(self.read_text("whole.csv"), self.read_text("part.csv"))

    def test_resume_without_checkpoint(self):
        code = self.run_cli("simulate", "--n-actions", "1", "--out", self.path("a.csv"), "--seed", "1", "--resume")
        self.assertEqual(2, code)

    def test_missing_seed(self):
        self.assertEqual(2, self.run_cli("simulate", "--n-actions", "1", "--out", self.path("a.csv")))
        self.assertIn("--seed", self.stderr)

    def test_bad_config_file(self):
        config = self.path("bad.conf")
        with open(config, "w") as f:
            f.write("seed = 1\ncolour = blue\n")
        self.assertEqual(1, self.run_cli("simulate", "--config", config, "--out", self.tmpdir))
        self.assertIn("line 2", self.stderr)


class TestUsage(CliTestCase):
    def test_unknown_subcommand(self):
        self.assertEqual(2, self.run_cli("teleport"))

    def test_no_subcommand(self):
        self.assertEqual(2, self.run_cli())

    def test_version(self):
        self.assertEqual(0, self.run_cli("--version"))

    def test_analysis_needs_a_log(self):
        self.assertEqual(2, self.run_cli("corr", "--out", self.tmpdir))

    def test_transform_needs_one_probe(self):
        self.assertEqual(2, self.run_cli("transform", "--log", "x.csv", "--out", self.tmpdir))
        self.assertEqual(2, self.run_cli("transform", "--log", "x.csv", "--line", "1,2", "--out", self.tmpdir))

    def test_corrupt_log_is_a_runtime_error(self):
        with open(self.path("bad.csv"), "w") as f:
            f.write("not,a,log\n")
        self.assertEqual(1, self.run_cli("corr", "--log", self.path("bad.csv"), "--out", self.tmpdir))
        self.assertIn("line 1", self.stderr)

    def test_missing_log_is_a_runtime_error(self):
        self.assertEqual(1, self.run_cli("corr", "--log", self.path("nope.csv"), "--out", self.tmpdir))


class TestAnalyses(CliTestCase):
    @classmethod
    def setUpClass(cls):
        super(TestAnalyses, cls).setUpClass()
        cls.run_dir = tempfile.mkdtemp(prefix="sensorimotor-test-")
        cls.log = os.path.join(cls.run_dir, "log.csv")
        with patch("sys.stderr", new_callable=StringIO):
            code = main(["simulate", "--n-actions", "300", "--seed", "7", "--out", cls.log])
        assert code == 0, "simulation failed"

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.run_dir, ignore_errors=True)
        super(TestAnalyses, cls).tearDownClass()

    def analyse(self, command, *options):
        code = self.run_cli(command, "--log", self.log, "--out", self.tmpdir, *options)
        self.assertEqual(0, code, self.stderr)
        manifest = self.manifest("%s.manifest.json" % command)
        self.assertEqual(command, manifest["subcommand"])
        self.assertEqual([self.log], manifest["inputs"])
        for output in manifest["outputs"]:
            self.assertTrue(os.path.exists(output), output)
        return manifest

    def test_path_density(self):
        manifest = self.analyse("path-density", "--resolution", "10")
        self.assertEqual(3, len(manifest["outputs"]))
        lines = self.read_text("path_density.csv").splitlines()
        self.assertEqual("row,col,x,y,count", lines[0])
        self.assertEqual(101, len(lines))

    def test_knn(self):
        self.analyse("knn", "--seed", "3", "--k", "5", "--anchors", "50")
        report = json.loads(self.read_text("knn.json"))
        self.assertGreater(report["ratio"], 0)

    def test_knn_needs_a_seed(self):
        self.assertEqual(2, self.run_cli("knn", "--log", self.log, "--out", self.tmpdir))

    def test_std(self):
        self.analyse("std", "--sensor", "0", "--resolution", "10")
        self.analyse("std", "--sensor", "0", "--resolution", "10", "--rolling", "--window", "5")
        self.assertEqual("rolling", json.loads(self.read_text("std.json"))["mode"])

    def test_std_bad_sensor(self):
        code = self.run_cli("std", "--log", self.log, "--out", self.tmpdir, "--sensor", "16")
        self.assertEqual(1, code)

    def test_corr(self):
        self.analyse("corr")
        self.assertEqual(17, len(self.read_text("corr.csv").splitlines()))

    def test_hull(self):
        self.analyse("hull", "--region-x", "0", "--region-y", "0", "--radius", "5")
        self.assertIn("winding_preserved", json.loads(self.read_text("hull.json")))

    def test_hull_survey(self):
        self.analyse("hull", "--regions", "3", "--radius", "3", "--seed", "1", "--threads", "2")
        survey = json.loads(self.read_text("hull_regions.json"))
        self.assertEqual(3, survey["regions"])
        self.assertEqual(3, len(survey["verdicts"]))

    def test_cluster_is_reproducible(self):
        self.analyse("cluster", "--seed", "11", "--k", "3", "--restarts", "2")
        first = self.read_text("cluster.json")
        self.analyse("cluster", "--seed", "11", "--k", "3", "--restarts", "2")
        self.assertEqual(first, self.read_text("cluster.json"))
        self.assertEqual(3, json.loads(first)["k"])

    def test_elbow(self):
        self.analyse("elbow", "--seed", "11", "--k-max", "4", "--restarts", "2")
        self.assertIn(json.loads(self.read_text("elbow.json"))["selected"], (1, 2, 3, 4))

    def test_transform(self):
        self.analyse("transform", "--line", "-2,0,2,0,5", "--k", "5")
        report = json.loads(self.read_text("transform.json"))
        self.assertEqual(5, report["points"])
        self.assertEqual(0, report["flagged"])
        self.analyse("transform", "--grid", "-2,-2,2,2,3,3", "--k", "5")
        self.assertEqual(9, json.loads(self.read_text("transform.json"))["points"])
