#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

"""
Command line front end: ``sensorimotor <subcommand> [options]``.

Every subcommand writes plot-ready CSV/JSON files and finishes by writing a
``<subcommand>.manifest.json`` listing them. Exit status is 0 on success, 2
on usage errors, 1 when the run itself fails and 130 when interrupted. An
interrupted ``simulate`` keeps the log and checkpoint consistent for ``--resume``.
"""

from __future__ import print_function

import argparse
import logging
import os
import sys
import time

import numpy as np
import pandas as pd

from . import __versionstr__
from .analysis import (
    cluster_summary,
    distortion_metrics,
    elbow_select,
    generate_probe,
    grid_std,
    hull_correspondence,
    kmeans,
    locality_ratio,
    map_to_sensor_space,
    region_survey,
    rolling_grid_std,
    sample_regions,
    sensor_correlation,
    wall_band_masks,
    wall_purity,
)
from .analysis.cluster import DEFAULT_RESTARTS, nearest_wall_labels
from .config import Settings
from .dataset import (
    LogWriter,
    filter_by_yaw,
    normalize_sensors,
    occupancy_grid,
    path_segments,
    read_log,
    stuck_summary,
)
from .exceptions import ImproperlyConfigured, SensorimotorException
from .explore import config_digest, load_checkpoint, resume, run_exploration
from .serializer import JSONSerializer
from .sim import WALLS
from .utils import atomic_write, content_digest

logger = logging.getLogger("sensorimotor.cli")

FLOAT_FORMAT = "%.9g"


class UsageError(Exception):
    pass


class RunManifest(object):
    """
    Record of one invocation: parameters, input and output files, the digest
    of the resolved configuration and the wall-clock duration.
    """

    serializer = JSONSerializer()

    def __init__(self, subcommand, parameters, config_digest=None):
        self.subcommand = subcommand
        self.parameters = parameters
        self.config_digest = config_digest
        self.inputs = []
        self.outputs = []
        self.started = time.time()
        self.duration = None

    def as_dict(self):
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "config_digest": self.config_digest,
            "duration": self.duration,
        }

    def write_frame(self, path, frame, index=False):
        with atomic_write(path) as f:
            frame.to_csv(f, index=index, float_format=FLOAT_FORMAT)
        self.outputs.append(path)
        logger.info("Wrote %s", path)

    def write_json(self, path, data):
        with atomic_write(path) as f:
            f.write(self.serializer.dumps(data) + "\n")
        self.outputs.append(path)
        logger.info("Wrote %s", path)

    def finish(self, path):
        """ Write the manifest itself; always the last file of a run. """
        self.duration = time.time() - self.started
        with atomic_write(path) as f:
            f.write(self.serializer.dumps(self.as_dict()) + "\n")
        logger.info("%s finished in %.2fs, manifest %s", self.subcommand, self.duration, path)


def _point_list(text, count, name):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError("%s: expected %d comma separated numbers, got %r" % (name, count, text))
    if len(values) != count:
        raise UsageError("%s: expected %d comma separated numbers, got %r" % (name, count, text))
    return values


def _settings(args):
    settings = Settings.from_file(args.config) if args.config else Settings()
    settings.update({"seed": args.seed}, "--seed")
    for key in ("n_actions", "noise", "resolution"):
        if getattr(args, key, None) is not None:
            settings.update({key: getattr(args, key)}, "--" + key.replace("_", "-"))
    return settings


def _require_seed(settings, args):
    if settings.seed is None:
        raise UsageError("%s needs --seed (or 'seed' in the config file)" % args.command)
    return settings.seed


def _yaw_filter(args):
    if args.yaw is None:
        return None
    return (args.yaw, args.yaw_tol)


def _out(args, name):
    return os.path.join(args.out, name)


def _load(args, settings, manifest):
    if not args.log:
        raise UsageError("%s needs --log" % args.command)
    manifest.inputs.append(args.log)
    if not os.path.isdir(args.out):
        os.makedirs(args.out)
    return read_log(args.log, settings.sensor_count)


def _parameters(args):
    return dict((k, v) for k, v in sorted(vars(args).items()) if k != "func")


def cmd_simulate(args, settings):
    seed = _require_seed(settings, args)
    config = settings.explore_config()
    arena, params, model = settings.arena(), settings.robot_params(), settings.sensor_model()

    if args.log:
        log_path = args.log
    elif args.out.endswith(".csv"):
        log_path = args.out
    else:
        log_path = os.path.join(args.out, "log.csv")
    directory = os.path.dirname(os.path.abspath(log_path))
    if not os.path.isdir(directory):
        os.makedirs(directory)
    stem = os.path.splitext(log_path)[0]
    checkpoint_path = args.checkpoint or stem + ".checkpoint.json"

    manifest = RunManifest(
        "simulate", _parameters(args), config_digest(config, arena, params, model)
    )
    if args.resume:
        if not os.path.exists(checkpoint_path):
            raise UsageError("--resume: no checkpoint at %s" % checkpoint_path)
        checkpoint = load_checkpoint(checkpoint_path)
        manifest.inputs.append(checkpoint_path)
        with LogWriter(log_path, append=True, sensor_count=model.count) as sink:
            summary = resume(checkpoint, config, arena, params, model, sink, checkpoint_path)
    else:
        with LogWriter(log_path, sensor_count=model.count) as sink:
            summary = run_exploration(config, arena, params, model, sink, checkpoint_path)

    manifest.outputs.extend([log_path, checkpoint_path])
    manifest.parameters["resolved"] = settings.as_dict()
    manifest.parameters["seed"] = seed
    manifest.parameters["summary"] = {"actions": summary.actions, "stuck": summary.stuck}
    manifest.finish(stem + ".manifest.json")
    return 0


def cmd_path_density(args, settings):
    manifest = RunManifest("path-density", _parameters(args), content_digest(settings.as_dict()))
    dataset = _load(args, settings, manifest)
    grid = settings.grid_spec()
    counts = occupancy_grid(dataset, grid)

    res = grid.resolution
    rows, cols = np.divmod(np.arange(res * res), res)
    centers = grid.cell_centers()
    frame = pd.DataFrame(
        {
            "row": rows,
            "col": cols,
            "x": centers[cols],
            "y": centers[rows],
            "count": counts.reshape(-1),
        }
    )
    manifest.write_frame(_out(args, "path_density.csv"), frame)
    manifest.write_frame(_out(args, "path_segments.csv"), path_segments(dataset))
    manifest.write_json(_out(args, "stuck_summary.json"), stuck_summary(dataset))
    manifest.finish(_out(args, "path-density.manifest.json"))
    return 0


def cmd_knn(args, settings):
    seed = _require_seed(settings, args)
    manifest = RunManifest("knn", _parameters(args), content_digest(settings.as_dict()))
    dataset = _load(args, settings, manifest)
    report = locality_ratio(dataset, args.k, args.anchors, np.random.default_rng(seed))
    manifest.write_frame(_out(args, "knn_pairs.csv"), report.pairs())
    manifest.write_json(_out(args, "knn.json"), report.as_dict())
    manifest.finish(_out(args, "knn.manifest.json"))
    return 0


def cmd_std(args, settings):
    manifest = RunManifest("std", _parameters(args), content_digest(settings.as_dict()))
    dataset = _load(args, settings, manifest)
    grid = settings.grid_spec()
    if args.rolling:
        result = rolling_grid_std(dataset, args.sensor, grid, args.window)
    else:
        result = grid_std(dataset, args.sensor, grid)

    near_wall, central = wall_band_masks(grid)
    wall_mean, central_mean = result.region_mean(near_wall), result.region_mean(central)
    manifest.write_frame(_out(args, "std_grid.csv"), result.to_frame())
    manifest.write_json(
        _out(args, "std.json"),
        {
            "sensor": args.sensor,
            "mode": result.mode,
            "window": result.window,
            "filled_cells": int(result.filled.sum()),
            "near_wall_mean": wall_mean,
            "central_mean": central_mean,
            "wall_to_center": wall_mean / central_mean if central_mean > 0 else None,
        },
    )
    manifest.finish(_out(args, "std.manifest.json"))
    return 0


def cmd_corr(args, settings):
    manifest = RunManifest("corr", _parameters(args), content_digest(settings.as_dict()))
    dataset = _load(args, settings, manifest)
    matrix = sensor_correlation(dataset, _yaw_filter(args))
    manifest.write_frame(_out(args, "corr.csv"), matrix.to_frame(), index=True)
    manifest.write_json(
        _out(args, "corr.json"),
        {
            "records": matrix.n_records,
            "yaw_filter": matrix.yaw_filter,
            "mean_abs": matrix.mean_abs(),
            "mean_at_offset": dict(
                (str(offset), matrix.mean_at_offset(offset))
                for offset in range(1, matrix.size // 2 + 1)
            ),
        },
    )
    manifest.finish(_out(args, "corr.manifest.json"))
    return 0


def cmd_hull(args, settings):
    yaw_filter = _yaw_filter(args)
    manifest = RunManifest("hull", _parameters(args), content_digest(settings.as_dict()))
    if args.regions is not None:
        seed = _require_seed(settings, args)
        dataset = _load(args, settings, manifest)
        centers = sample_regions(dataset, args.regions, np.random.default_rng(seed), yaw_filter)
        survey = region_survey(dataset, centers, args.radius, yaw_filter, thread_count=args.threads)
        manifest.write_json(_out(args, "hull_regions.json"), survey.as_dict())
    else:
        if args.region_x is None or args.region_y is None:
            raise UsageError("hull needs --region-x and --region-y, or --regions N")
        dataset = _load(args, settings, manifest)
        result = hull_correspondence(
            dataset, (args.region_x, args.region_y), args.radius, yaw_filter
        )
        manifest.write_frame(_out(args, "hull.csv"), result.to_frame())
        manifest.write_json(_out(args, "hull.json"), result.as_dict())
    manifest.finish(_out(args, "hull.manifest.json"))
    return 0


def _filtered_matrix(args, settings, manifest):
    dataset = _load(args, settings, manifest)
    yaw_filter = _yaw_filter(args)
    if yaw_filter is not None:
        dataset = filter_by_yaw(dataset, *yaw_filter)
    matrix, _, _ = normalize_sensors(dataset)
    return dataset, matrix


def cmd_cluster(args, settings):
    seed = _require_seed(settings, args)
    manifest = RunManifest("cluster", _parameters(args), content_digest(settings.as_dict()))
    dataset, matrix = _filtered_matrix(args, settings, manifest)
    model = kmeans(matrix, args.k, seed, args.restarts)
    arena = settings.arena()
    purity = wall_purity(model, dataset, arena)

    ends = dataset.ends
    assignments = pd.DataFrame(
        {
            "index": dataset.index,
            "x1": ends[:, 0],
            "y1": ends[:, 1],
            "yaw": dataset.yaw,
            "cluster": model.assignments,
            "wall": [WALLS[w] for w in nearest_wall_labels(ends, arena)],
        }
    )
    manifest.write_frame(_out(args, "cluster_assignments.csv"), assignments)
    manifest.write_frame(_out(args, "cluster_summary.csv"), cluster_summary(model, matrix))
    manifest.write_json(
        _out(args, "cluster.json"),
        {
            "k": model.k,
            "records": len(dataset),
            "inertia": model.inertia,
            "iterations": model.n_iter,
            "sizes": model.sizes(),
            "wall_purity": purity,
        },
    )
    manifest.finish(_out(args, "cluster.manifest.json"))
    return 0


def cmd_elbow(args, settings):
    seed = _require_seed(settings, args)
    manifest = RunManifest("elbow", _parameters(args), content_digest(settings.as_dict()))
    dataset, matrix = _filtered_matrix(args, settings, manifest)
    k_max = min(args.k_max, len(dataset))
    curve = elbow_select(matrix, range(1, k_max + 1), seed, args.restarts)
    manifest.write_frame(_out(args, "elbow.csv"), curve.to_frame())
    manifest.write_json(
        _out(args, "elbow.json"),
        {"records": len(dataset), "k_max": k_max, "selected": curve.selected},
    )
    manifest.finish(_out(args, "elbow.manifest.json"))
    return 0


def cmd_transform(args, settings):
    if (args.line is None) == (args.grid is None):
        raise UsageError("transform needs exactly one of --line or --grid")
    if args.line is not None:
        x0, y0, x1, y1, n = _point_list(args.line, 5, "--line")
        kind, count = "line", n
    else:
        x0, y0, x1, y1, nx, ny = _point_list(args.grid, 6, "--grid")
        kind, count = "grid", (nx, ny)

    manifest = RunManifest("transform", _parameters(args), content_digest(settings.as_dict()))
    dataset = _load(args, settings, manifest)
    probe = generate_probe(kind, (x0, y0), (x1, y1), count, settings.arena())
    mapped = map_to_sensor_space(probe, dataset, _yaw_filter(args), args.k, args.max_radius)
    try:
        straightness, non_uniformity = distortion_metrics(mapped)
    except SensorimotorException as e:
        logger.warning("Distortion metrics unavailable: %s", e)
        straightness = non_uniformity = None

    manifest.write_frame(_out(args, "transform.csv"), mapped.to_frame())
    manifest.write_json(
        _out(args, "transform.json"),
        {
            "kind": kind,
            "points": len(probe),
            "k": mapped.k,
            "flagged": int(mapped.flagged.sum()),
            "straightness_deviation": straightness,
            "grid_non_uniformity": non_uniformity,
        },
    )
    manifest.finish(_out(args, "transform.manifest.json"))
    return 0


def _add_yaw(parser, tolerance=0.1):
    parser.add_argument("--yaw", type=float, help="compass heading to filter on (radians)")
    parser.add_argument(
        "--yaw-tol", type=float, default=tolerance, help="yaw filter half width (radians)"
    )


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--log", help="sensorimotor log CSV")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="sensorimotor", description="Robot random-walk simulator and log analyses."
    )
    parser.add_argument("--version", action="version", version=__versionstr__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("simulate", parents=[common], help="run the random walk")
    p.add_argument("--n-actions", dest="n_actions", type=int)
    p.add_argument("--noise", choices=("on", "off"))
    p.add_argument("--checkpoint", help="checkpoint path (default next to the log)")
    p.add_argument("--resume", action="store_true", help="continue from the checkpoint")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("path-density", parents=[common], help="visit counts and path")
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_path_density)

    p = sub.add_parser("knn", parents=[common], help="sensor-space neighbor locality")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--anchors", type=int, default=200)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("std", parents=[common], help="per-cell sensor deviation map")
    p.add_argument("--sensor", type=int, required=True)
    p.add_argument("--resolution", type=int)
    p.add_argument("--rolling", action="store_true")
    p.add_argument("--window", type=int, default=10)
    p.set_defaults(func=cmd_std)

    p = sub.add_parser("corr", parents=[common], help="sensor correlation matrix")
    _add_yaw(p)
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("hull", parents=[common], help="hull winding in the sensor plane")
    p.add_argument("--region-x", dest="region_x", type=float)
    p.add_argument("--region-y", dest="region_y", type=float)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--regions", type=int, help="survey N random regions instead")
    p.add_argument("--threads", type=int, default=4)
    _add_yaw(p, 0.05)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("cluster", parents=[common], help="k-means of sensor vectors")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    _add_yaw(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("elbow", parents=[common], help="pick k by the elbow rule")
    p.add_argument("--k-max", dest="k_max", type=int, default=10)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    _add_yaw(p)
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("transform", parents=[common], help="map lines and grids")
    p.add_argument("--line", metavar="X0,Y0,X1,Y1,N")
    p.add_argument("--grid", metavar="X0,Y0,X1,Y1,NX,NY")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--max-radius", dest="max_radius", type=float)
    _add_yaw(p, 0.01)
    p.set_defaults(func=cmd_transform)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        settings = _settings(args)
        return args.func(args, settings)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print("%s %s: error: %s" % (parser.prog, args.command, e), file=sys.stderr)
        return 2
    except (SensorimotorException, ImproperlyConfigured, OSError) as e:
        print("%s %s: %s" % (parser.prog, args.command, e), file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("%s %s: interrupted" % (parser.prog, args.command), file=sys.stderr)
        return 130
