"""Desk-scale pruning laboratory: per-weight significance scores with
genuine activations and gradients, unstructured masking, calibration-set
construction, opinion-fairness metrics, ROUGE, and human-vote aggregation.
"""

from .calib import (
    CalibrationSet,
    InputCollection,
    SpdIndexedCollection,
    build_fair_input,
    build_fairness_testset,
    build_mixed_input,
    build_output_conditioned,
    build_single_sided,
)
from .corpus import Document, Report, read_corpus, reports_to_csv, reports_to_json
from .fairness import (
    LabeledSummary,
    ValueDistribution,
    bur,
    distribution_from_labels,
    fairness_improvement,
    first_order_spd,
    match_labels,
    second_order_spd,
    sof,
    uer,
)
from .masking import PruneMask, apply_mask, build_mask, mask_jaccard
from .network import (
    CalibrationBatch,
    DenseLayer,
    activation_norms,
    forward,
    gradient_norms,
    load_network,
    per_sample_gradients,
    save_network,
)
from .rating import (
    ComparisonRecord,
    EloTable,
    apply_comparison,
    expected_score,
    fleiss_kappa,
    new_table,
)
from .scoring import (
    METHODS,
    ScoreInputs,
    ScoreMatrix,
    rescale_gradients,
    score,
)
from .tensorfile import read_tensor, write_tensor
from .textmetrics import rouge_l, rouge_n, split_sentences, tokenize

__version__ = "0.1.0"
