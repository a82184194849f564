#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

from .neighbors import LocalityReport, SpatialIndex, build_index, knn, locality_ratio
from .stats import (
    CorrelationMatrix,
    StdGrid,
    grid_std,
    rolling_grid_std,
    sensor_correlation,
    wall_band_masks,
)
from .geometry import (
    Hull2D,
    HullCorrespondence,
    PCABasis,
    RegionSurvey,
    SensorPlane,
    convex_hull_2d,
    hull_correspondence,
    hull_metrics,
    pca_project,
    region_survey,
    sample_regions,
    signed_area,
)
from .cluster import (
    ClusterModel,
    ElbowCurve,
    cluster_summary,
    elbow_point,
    elbow_select,
    kmeans,
    nearest_wall_labels,
    wall_purity,
)
from .transform import (
    MappedProbe,
    ProbeSet,
    distortion_metrics,
    generate_probe,
    grid_non_uniformity,
    map_to_sensor_space,
    straightness_deviation,
)
