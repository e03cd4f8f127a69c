"""Text classification with principal-component class models.

Pipeline: tokenize documents into wordform count vectors, unit-normalize,
build class centroids, decompose each class into principal components by
iterative power extraction, classify by Mahalanobis distance in the
component basis (with cosine and Bayes baselines), and shrink each class's
coordinate set with a genetic-algorithm mask search that preserves
separation.
"""

from .bayes import (
    BayesModel,
    CovarianceModel,
    bayes_classify,
    fit_bayes,
    gaussian_density,
    mahalanobis_full,
    posterior,
)
from .centroid import (
    Centroid,
    class_centroid,
    cosine_classify,
    dot,
    separation_holds,
    superclass_central_vector,
)
from .corpus import (
    Document,
    LabeledDataset,
    SparseVector,
    Vocabulary,
    count_wordforms,
    load_corpus,
    make_document,
    normalize_counts,
    to_dense,
    tokenize,
)
from .errors import (
    AllNullError,
    CorpusIOError,
    DimensionMismatchError,
    EmptyClassError,
    EmptyDocumentError,
    InfeasibleClassError,
    KltextError,
    NullProjectionError,
    SingularCovarianceError,
    TooFewDocsError,
    ZeroDataError,
)
from .ga import (
    GaConfig,
    GaResult,
    crossover,
    fitness,
    is_allowed,
    mask_apply,
    mutate,
    next_generation,
    run_ga,
    select_parents,
)
from .kl import (
    IterationConfig,
    PrincipalBasis,
    decompose,
    deflate,
    first_component,
    reconstruct,
    tail_energy,
)
from .model_io import ModelFile, load_model, save_model
from .pc import (
    ClassModel,
    DistanceReport,
    build_class_model,
    classify,
    pc_mahalanobis,
    project,
)
from .synthetic import gen_synthetic

__version__ = "0.1.0"
