"""Decision-tree induction for categorical datasets.

Impurity indices, gain/gain-ratio attribute scoring, ID3 construction,
IF-THEN rule extraction, min-support pruning, evaluation helpers, and an
audit harness for the published tables of the bundled student dataset.
"""

from .dataset import (
    Attribute,
    AttributeSchema,
    ClassDistribution,
    Dataset,
    DEFAULT_GRADE_BANDS,
    GradeBand,
    GradeBands,
    Record,
    SchemaError,
    ValidationError,
    bin_marks,
    class_distribution,
    dump_csv,
    dump_schema,
    load_csv,
    load_schema,
    load_students,
    partition,
)
from .evaluate import ConfusionMatrix, LooResult, accuracy, confusion, leave_one_out
from .metrics import (
    AttributeScore,
    ImpurityKind,
    classification_error,
    entropy,
    gain_ratio,
    gini,
    impurity,
    information_gain,
    score_all,
    split_information,
)
from .rules import Rule, extract_rules, render_rules, rules_to_json
from .tree import (
    Criterion,
    DecisionNode,
    DecisionTree,
    Internal,
    Leaf,
    TreeConfig,
    TreeStats,
    id3_build,
    load_model,
    predict,
    prune,
    save_model,
    to_dot,
    tree_stats,
)
from .verify import PUBLISHED, PublishedResults, VerifyReport, consistency_check, verify_published

__version__ = "0.1.0"
