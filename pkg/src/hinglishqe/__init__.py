"""Quality and disagreement rating prediction for synthetic Hinglish sentences."""

from .core import (DataFormatError, DatasetRecord, LidLabel, PosLabel,
                   TaggedSentence, TaggedToken, TaskTarget, derive_targets,
                   parse_dataset, parse_tagged)
from .metrics import (LanguageSpan, MetricVector, burstiness, cmi,
                      language_spans, metric_vector, switch_points,
                      symcom_sent, symcom_su)
from .features import (FeatureRecord, FeatureVector, ScalerParams,
                       apply_scaler, assemble_features, fit_scaler,
                       parse_features, pll_delta)
from .regressor import (MlpConfig, MlpModel, TrainReport, grid_search,
                        init_model, forward, load_model, save_model, train)
from .evaluation import EvalReport, cohen_kappa, evaluate, f1_score, mse, round_clip

__version__ = "0.1.0"
