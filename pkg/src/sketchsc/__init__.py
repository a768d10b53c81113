"""Sketched subspace clustering: random-projection dictionaries,
regularized regression solvers, k-NN affinity graphs, and spectral
clustering."""

from .data import (DataMatrix, SubspaceModel, generate_union_of_subspaces,
                   load_matrix, normalize_columns, random_subspace_model,
                   save_matrix)
from .sketch import (SketchOperator, apply_left, apply_right, fwht,
                     make_fjlt_hadamard, make_gaussian, make_operator,
                     make_rademacher, make_sparse_embedding)
from .solvers import (CoefficientMatrix, SolveDiagnostics, SolverConfig,
                      soft_threshold, solve, solve_batch_lsr,
                      solve_sketch_lrr, solve_sketch_lsr, solve_sketch_ssc,
                      svt)
from .graph import (AffinityGraph, build_affinity_binary,
                    build_affinity_heat, knn_sets)
from .spectral import (ClusterAssignment, SpectralEmbedding, kmeans,
                       laplacian, spectral_cluster, trailing_eigenvectors)
from .evaluation import (BoundCheck, EvalReport, StageTimer,
                         check_distance_preservation,
                         check_range_preservation, clustering_accuracy,
                         representation_bound_checks,
                         representation_bound_rhs)
from .pipeline import (ConfigError, DataError, NumericalError,
                       PipelineConfig, run_pipeline, run_sweep)

__version__ = "0.1.0"
