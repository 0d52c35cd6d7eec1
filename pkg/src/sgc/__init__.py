"""Communicability geometry of signed graphs: balance, angles, embeddings, factions."""

from .clustering import (
    ClusterLabels,
    Dendrogram,
    agglomerative,
    cut_dendrogram,
    kmeans,
    select_k,
    silhouette,
    to_newick,
)
from .communicability import (
    CommunicabilitySet,
    EigenDecomposition,
    PositionVectors,
    balance_via_exponential,
    communicability_matrix,
    communicability_set,
    complete_closed_forms,
    eig_sym,
    position_vectors,
)
from .embedding import Embedding, PolarizationScores, classical_mds, gaussian_kde, pca_polarization, smacof_refine
from .exceptions import DisconnectedGraphError, GraphFormatError, NumericalError
from .graph import (
    BalanceResult,
    SignedGraph,
    SwitchingVector,
    detect_balance,
    dump_edge_list,
    gen_balanced_complete,
    gen_clique_ring,
    gen_clique_tail,
    gen_figure1,
    gen_pendant_clique,
    gen_pentagon,
    gen_random_balanced,
    gen_random_signed,
    gen_triangle,
    load_edge_list,
    switch,
    underlying,
)
from .oracle import count_signed_walks, min_frustration_bipartitions, taylor_exp
from .pipeline import AnalysisReport, PipelineConfig, VoteMatrix, analyze, ingest_vote_matrix

__version__ = "0.1.0"
