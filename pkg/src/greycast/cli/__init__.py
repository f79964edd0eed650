"""Command-line pipeline: CSV ingestion, model persistence, reports."""

from .config import PipelineConfig, load_config
from .io import dump_json, parse_counts_csv, parse_series_csv
from .main import main
from .models import fit_model, model_from_doc
from .synth import synthetic_series

__all__ = [
    "PipelineConfig",
    "load_config",
    "dump_json",
    "parse_counts_csv",
    "parse_series_csv",
    "main",
    "fit_model",
    "model_from_doc",
    "synthetic_series",
]
