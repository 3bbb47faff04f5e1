"""Gromov-Wasserstein multidimensional scaling with MDS, Isomap and PCA baselines."""

from .baselines import classical_mds, isomap, metric_mds, pca
from .config import ExperimentConfig
from .datasets import (generate_s_curve, generate_sphere, generate_swiss_roll, load_idx_images,
                       load_matrix_csv)
from .errors import (DataError, DisconnectedGraphError, DivergenceError, GwEmbedError,
                     NumericalError)
from .evaluation import distance_scatter, pearson_distance_correlation, stress
from .geodesics import NeighborGraph, geodesic_distances, knn_graph
from .gwmds import (GwMdsState, align_embedding, gw_gradient_coords, gw_mds, init_embedding,
                    input_distances, run_gw_mds)
from .metrics import normalize_features, pairwise_euclidean
from .ot import (GWSolveResult, gw_cost, gw_gradient_plan, linear_ot_cost, linear_ot_oracle,
                 solve_gw)
from .types import Coupling, DistanceMatrix, Embedding, PointCloud, validate_distance_matrix

__version__ = "0.1.0"
