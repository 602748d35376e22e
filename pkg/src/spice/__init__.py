"""Progressive self/semi-supervised clustering on precomputed embeddings.

The pipeline turns an unlabeled N x D feature matrix into cluster
assignments in three stages: multi-head self-training driven by
per-batch semantic pseudo-labels, reliable-sample selection by local
neighborhood consistency, and a semi-supervised boost that treats the
reliable subset as ground truth.
"""

__version__ = "0.1.0"

from .errors import (
    SpiceError,
    InvalidInputError,
    DegenerateInputError,
    ShapeError,
    InvalidLabelError,
    ConfigError,
    ParseError,
    ClusterStarvationError,
    NumericFailureError,
)
from .numeric import (
    make_rng,
    softmax,
    softmax_vjp,
    cosine_similarity,
    cosine_similarity_matrix,
    top_k_indices,
    finite_diff_gradient,
    relative_error,
)
from .data import (
    EmbeddingDataset,
    TransformConfig,
    load_embeddings,
    save_embeddings,
    synth_gmm,
    transform,
)
from .head import (
    ClsHead,
    OptimizerState,
    alt_losses,
    ds_ce_backward,
    ds_ce_loss,
    entropy_regularizer,
    forward,
    head_loss_and_grads,
    init_head,
    load_head,
    optimizer_step,
    save_head,
)
from .pseudolabel import (
    PseudoLabelConfig,
    PseudoBatch,
    assign_labels,
    compute_prototypes,
    confident_indices,
    pseudo_label,
)
from .selftrain import (
    HeadPool,
    SelfTrainConfig,
    SelfTrainResult,
    evaluate_heads,
    head_loss,
    predict,
    train_self,
)
from .reliability import (
    ReliableSet,
    knn_all,
    knn_indices,
    load_reliable,
    local_consistency,
    save_reliable,
    select_reliable,
    subset_purity,
)
from .semitrain import (
    SemiHead,
    SemiTrainConfig,
    SemiTrainResult,
    forward_semi,
    init_semi_head,
    load_semi_head,
    predict_semi,
    save_semi_head,
    semi_loss,
    semi_loss_on_views,
    train_semi,
)
from .metrics import (
    ClusterEval,
    accuracy,
    accuracy_exhaustive,
    ari,
    contingency_matrix,
    evaluate,
    nmi,
    nmi_arithmetic,
)
from .kmeans import KMeansResult, kmeans

__all__ = [name for name in dir() if not name.startswith("_")]
