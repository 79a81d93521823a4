"""Statistical analysis of competition results on a single held-out test set.

Bootstrap confidence intervals per system, paired-bootstrap significance of
differences against the winner, multiple-comparison corrections, and
competition-difficulty metrics, with deterministic resampling throughout.
"""

__version__ = "0.1.0"

from .bootstrap import (
    CI,
    ResamplePlan,
    SamplingDistribution,
    distribution,
    distributions,
    percentile_ci,
    resample_indices,
    summarize,
)
from .corrections import PValueFamily, adjust, adjust_all, build_families
from .dataio import RunConfig, load_table, parse_metric, run_config_from_json
from .errors import (
    BoardstatsError,
    ConfigError,
    DataFormatError,
    MetricError,
    TableValidationError,
)
from .inference import (
    DifferenceCI,
    DifferenceMatrix,
    PairedDelta,
    difference_ci,
    difference_matrix,
    p_value,
    paired_difference,
    significance_stars,
)
from .metrics import ConfusionCounts, confusion_counts, score, score_on_indices
from .pipeline import PipelineResult, run_pipeline
from .plots import (
    SvgFigure,
    render_delta_histogram,
    render_difference_plot,
    render_forest_plot,
)
from .report import CompetitionReport, build_report, cv, ppi, tie_counts, win_med_gap
from .synth import (
    CalibrationSummary,
    LabelNoise,
    SynthConfig,
    ValueNoise,
    calibrate,
    expected_score,
    fit_confusion_matrix,
    fit_pair_coupling,
    generate,
    synth_config_from_json,
    table_from_confusions,
)
from .table import (
    BootstrapPlan,
    DifferenceSummary,
    PerformanceSummary,
    PredictionTable,
    ScoreSpec,
    TaskKind,
    Violation,
    validate,
)

__all__ = [
    "BoardstatsError",
    "BootstrapPlan",
    "CI",
    "CalibrationSummary",
    "CompetitionReport",
    "ConfigError",
    "ConfusionCounts",
    "DataFormatError",
    "DifferenceCI",
    "DifferenceMatrix",
    "DifferenceSummary",
    "LabelNoise",
    "MetricError",
    "PValueFamily",
    "PairedDelta",
    "PerformanceSummary",
    "PipelineResult",
    "PredictionTable",
    "ResamplePlan",
    "RunConfig",
    "SamplingDistribution",
    "ScoreSpec",
    "SvgFigure",
    "SynthConfig",
    "TableValidationError",
    "TaskKind",
    "ValueNoise",
    "Violation",
    "adjust",
    "adjust_all",
    "build_families",
    "build_report",
    "calibrate",
    "confusion_counts",
    "cv",
    "difference_ci",
    "difference_matrix",
    "distribution",
    "distributions",
    "expected_score",
    "fit_confusion_matrix",
    "fit_pair_coupling",
    "generate",
    "load_table",
    "p_value",
    "paired_difference",
    "parse_metric",
    "percentile_ci",
    "ppi",
    "render_delta_histogram",
    "render_difference_plot",
    "render_forest_plot",
    "resample_indices",
    "run_config_from_json",
    "run_pipeline",
    "score",
    "score_on_indices",
    "significance_stars",
    "summarize",
    "synth_config_from_json",
    "table_from_confusions",
    "tie_counts",
    "validate",
    "win_med_gap",
]
