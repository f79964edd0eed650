"""Model adapters for the pipeline: fit, in-sample values, forecast, JSON docs.

Every adapter exposes the same small surface — ``kind``, ``start_t`` (the
1-based time of its first in-sample value), ``fitted``, ``forecast(h)``
and ``to_doc()`` — so the hybrid assembly and the backtest can treat all
model kinds uniformly.  Fitting goes through the :data:`FITTERS` registry,
which tests may wrap to observe exactly what data each fit saw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dgm import DgmModel, fit_dgm, forecast_dgm
from ..errors import ConfigError, DataError
from ..gm import GmModel, fit_gm11, forecast_gm11
from ..hybrid import (
    HybridWeights,
    RelationConfig,
    SCHEME_EFFECTIVE,
    SCHEME_GREY_RELATION,
    SCHEME_MIN_VARIANCE,
    SCHEME_SIMPLEX_LS,
    accuracy_series,
    combine_forecasts,
    effective_degree,
    effective_weights,
    min_variance_weight,
    optimize_relation_weights,
    simplex_ls_weights,
)
from ..markov import (
    FuzzyMarkovModel,
    MarkovTestReport,
    StatePartition,
    classify_states,
    count_transitions,
    expected_drift,
    fmarkov_correct,
    fuzzy_transition_matrix,
    marginal_distribution,
    markov_property_test,
)
from ..metrics import evaluate
from ..neural import (
    AffineScaler,
    FeedforwardNet,
    IgnnForecaster,
    SgnnForecaster,
    ignn_fit,
    ignn_fitted,
    ignn_forecast,
    sgnn_fit,
    sgnn_fitted,
    sgnn_forecast,
)
from ..series import as_values, relative_residuals
from .config import PipelineConfig

SCHEMA_VERSION = 1
DEFAULT_COMPONENTS = ("dgm_fmarkov", "ignn")


@dataclass
class FittedModel:
    kind: str
    start_t: int
    fitted: np.ndarray
    _forecast: callable
    _doc: dict
    markov_report: MarkovTestReport | None = None
    weights: HybridWeights | None = None

    def forecast(self, horizon: int) -> np.ndarray:
        return self._forecast(horizon)

    def to_doc(self) -> dict:
        return dict(self._doc)


def _fit_gm(values, cfg: PipelineConfig) -> FittedModel:
    model = fit_gm11(values)
    path = forecast_gm11(model, 1)
    return FittedModel(
        kind="gm",
        start_t=1,
        fitted=path[: model.n_fit],
        _forecast=lambda h: forecast_gm11(model, h)[model.n_fit :],
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "gm",
            "a": model.a,
            "u": model.u,
            "x0_first": model.x0_first,
            "n_fit": model.n_fit,
        },
    )


def _fit_dgm(values, cfg: PipelineConfig) -> FittedModel:
    model = fit_dgm(values)
    path = forecast_dgm(model, 1)
    return FittedModel(
        kind="dgm",
        start_t=1,
        fitted=path[: model.n_fit],
        _forecast=lambda h: forecast_dgm(model, h)[model.n_fit :],
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "dgm",
            "beta": [float(b) for b in model.beta],
            "xi": model.xi,
            "n_fit": model.n_fit,
        },
    )


def _markov_summary(residuals, partition: StatePartition, cfg: PipelineConfig):
    """Crisp chi-squared summary of the residual state sequence."""
    classified = classify_states(residuals, partition)
    counts = count_transitions(classified)
    occupancy = np.bincount(classified.states, minlength=partition.k + 1)[1:]
    marginals = marginal_distribution(occupancy, classified.states.size)
    return markov_property_test(counts, marginals, alpha=cfg.alpha)


def _fmarkov_forecast(dgm_model, fm, z_last, y_last, horizon):
    raw = forecast_dgm(dgm_model, horizon)[dgm_model.n_fit :]
    out = raw.copy()
    out[0] = raw[0] + expected_drift(fm, z_last) * y_last
    return out


def _fit_dgm_fmarkov(values, cfg: PipelineConfig) -> FittedModel:
    values = as_values(values)
    partition = StatePartition(np.asarray(cfg.state_boundaries))
    dgm_model = fit_dgm(values)
    raw = forecast_dgm(dgm_model, 1)[: dgm_model.n_fit]
    residuals = relative_residuals(values, raw)
    fm = fuzzy_transition_matrix(residuals.values, partition)
    corrected = fmarkov_correct(raw, values, fm)
    z_last = float(residuals.values[-1])
    y_last = float(values[-1])
    try:
        markov_report = _markov_summary(residuals.values, partition, cfg)
    except ConfigError:
        markov_report = None  # no embedded critical value for this state count
    return FittedModel(
        kind="dgm_fmarkov",
        start_t=1,
        fitted=corrected,
        _forecast=lambda h: _fmarkov_forecast(dgm_model, fm, z_last, y_last, h),
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "fmarkov",
            "dgm": {
                "beta": [float(b) for b in dgm_model.beta],
                "xi": dgm_model.xi,
                "n_fit": dgm_model.n_fit,
            },
            "boundaries": [float(b) for b in partition.boundaries],
            "fuzzy_counts": fm.fuzzy_counts.tolist(),
            "fuzzy_probs": fm.fuzzy_probs.tolist(),
            "degenerate_rows": [bool(v) for v in fm.degenerate_rows],
            "last_residual": z_last,
            "last_actual": y_last,
            "n_fit": dgm_model.n_fit,
        },
        markov_report=markov_report,
    )


def _scaler_doc(s: AffineScaler) -> dict:
    return {"scale": s.scale, "offset": s.offset}


def _net_doc(net: FeedforwardNet) -> dict:
    return {
        "layer_sizes": list(net.layer_sizes),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "input_scaler": _scaler_doc(net.input_scaler),
        "output_scaler": _scaler_doc(net.output_scaler),
    }


def _net_from_doc(doc: dict) -> FeedforwardNet:
    return FeedforwardNet(
        layer_sizes=tuple(doc["layer_sizes"]),
        weights=[np.asarray(w) for w in doc["weights"]],
        biases=[np.asarray(b) for b in doc["biases"]],
        input_scaler=AffineScaler(**doc["input_scaler"]),
        output_scaler=AffineScaler(**doc["output_scaler"]),
    )


def _fit_ignn(values, cfg: PipelineConfig) -> FittedModel:
    forecaster = ignn_fit(values, window=cfg.window, cfg=cfg.train)
    return FittedModel(
        kind="ignn",
        start_t=cfg.window + 1,
        fitted=ignn_fitted(forecaster),
        _forecast=lambda h: ignn_forecast(forecaster, h),
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "net",
            "variant": "ignn",
            "net": _net_doc(forecaster.net),
            "window": forecaster.window,
            "ago_tail": forecaster.ago_values[-forecaster.window :].tolist(),
            "n_fit": forecaster.n_fit,
        },
    )


def _sgnn_windows(n: int) -> list[int]:
    """Trailing sub-windows at the full, 3/4, and 1/2 history lengths."""
    lengths = sorted({n, max(4, (3 * n) // 4), max(4, n // 2)}, reverse=True)
    return [length for length in lengths if length >= 4]


def _fit_sgnn(values, cfg: PipelineConfig) -> FittedModel:
    values = as_values(values)
    forecaster = sgnn_fit(values, _sgnn_windows(values.size), cfg=cfg.train)
    return FittedModel(
        kind="sgnn",
        start_t=forecaster.eval_start,
        fitted=sgnn_fitted(forecaster),
        _forecast=lambda h: sgnn_forecast(forecaster, h),
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "net",
            "variant": "sgnn",
            "net": _net_doc(forecaster.net),
            "gm_models": [
                {"a": m.a, "u": m.u, "x0_first": m.x0_first, "n_fit": m.n_fit}
                for m in forecaster.gm_models
            ],
            "offsets": list(forecaster.offsets),
            "n_fit": forecaster.n_fit,
        },
    )


def compute_weights(actual, predictions, cfg: PipelineConfig) -> HybridWeights:
    """Weights for aligned in-sample predictions under the configured scheme."""
    scheme = cfg.hybrid_scheme
    if scheme == SCHEME_EFFECTIVE:
        degrees = [
            effective_degree(accuracy_series(actual, pred)) for pred in predictions
        ]
        return effective_weights(degrees)
    if scheme == SCHEME_MIN_VARIANCE:
        if len(predictions) != 2:
            raise ConfigError(
                f"min_variance weighting needs exactly 2 models, got {len(predictions)}"
            )
        e1 = np.asarray(actual) - predictions[0]
        e2 = np.asarray(actual) - predictions[1]
        return min_variance_weight(e1, e2)
    if scheme == SCHEME_SIMPLEX_LS:
        return simplex_ls_weights(actual, predictions)
    if scheme == SCHEME_GREY_RELATION:
        return optimize_relation_weights(
            actual, predictions, RelationConfig(rho=cfg.rho)
        )
    raise ConfigError(f"unknown hybrid scheme {scheme!r}")


def align_fitted(values, components: list[FittedModel]):
    """Common in-sample range: (start_t, actual slice, per-model slices)."""
    start = max(c.start_t for c in components)
    actual = as_values(values)[start - 1 :]
    predictions = [c.fitted[start - c.start_t :] for c in components]
    return start, actual, predictions


def assemble_hybrid(values, cfg: PipelineConfig, components=DEFAULT_COMPONENTS):
    """Fit the component models and weight them on the common in-sample range.

    Returns (fits, start_t, actual slice, prediction slices, weights,
    combined in-sample series).
    """
    values = as_values(values)
    if len(components) < 2:
        raise ConfigError("hybrid needs at least 2 component models")
    fits = [fit_model(kind, values, cfg) for kind in components]
    start, actual, predictions = align_fitted(values, fits)
    weights = compute_weights(actual, predictions, cfg)
    combined = combine_forecasts(predictions, weights, cfg.combine)
    return fits, start, actual, predictions, weights, combined


def _fit_hybrid(values, cfg: PipelineConfig, components=DEFAULT_COMPONENTS) -> FittedModel:
    fits, start, actual, predictions, weights, combined = assemble_hybrid(
        values, cfg, components
    )

    def forecast(h):
        parts = [f.forecast(h) for f in fits]
        return combine_forecasts(parts, weights, cfg.combine)

    markov_report = next(
        (f.markov_report for f in fits if f.markov_report is not None), None
    )
    return FittedModel(
        kind="hybrid",
        start_t=start,
        fitted=combined,
        _forecast=forecast,
        _doc={
            "schema_version": SCHEMA_VERSION,
            "kind": "hybrid",
            "scheme": weights.scheme,
            "combine": cfg.combine,
            "weights": [float(w) for w in weights.weights],
            "diagnostics": _plain(weights.diagnostics),
            "components": [f.to_doc() for f in fits],
        },
        markov_report=markov_report,
        weights=weights,
    )


def _plain(obj):
    """Coerce numpy scalars/arrays inside diagnostics to plain Python."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


#: Fit dispatch; tests may wrap entries to instrument what data a fit sees.
FITTERS = {
    "gm": _fit_gm,
    "dgm": _fit_dgm,
    "dgm_fmarkov": _fit_dgm_fmarkov,
    "ignn": _fit_ignn,
    "sgnn": _fit_sgnn,
}


def fit_model(kind: str, values, cfg: PipelineConfig, components=DEFAULT_COMPONENTS) -> FittedModel:
    if kind == "hybrid":
        return _fit_hybrid(values, cfg, components)
    if kind not in FITTERS:
        raise ConfigError(f"unknown model kind {kind!r}")
    return FITTERS[kind](values, cfg)


# ---------------------------------------------------------------------------
# Forecast-only reconstruction from persisted docs.
# ---------------------------------------------------------------------------


@dataclass
class LoadedModel:
    kind: str
    n_fit: int
    _forecast: callable = field(repr=False)

    def forecast(self, horizon: int) -> np.ndarray:
        return self._forecast(horizon)


def model_from_doc(doc: dict) -> LoadedModel:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise DataError("model document must be a JSON object with a 'kind' field")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"unsupported model schema_version {doc.get('schema_version')!r}"
        )
    kind = doc["kind"]
    if kind == "gm":
        model = GmModel(a=doc["a"], u=doc["u"], x0_first=doc["x0_first"], n_fit=doc["n_fit"])
        return LoadedModel("gm", model.n_fit, lambda h: forecast_gm11(model, h)[model.n_fit :])
    if kind == "dgm":
        model = DgmModel(beta=np.asarray(doc["beta"]), xi=doc["xi"], n_fit=doc["n_fit"])
        return LoadedModel("dgm", model.n_fit, lambda h: forecast_dgm(model, h)[model.n_fit :])
    if kind == "fmarkov":
        sub = doc["dgm"]
        dgm_model = DgmModel(beta=np.asarray(sub["beta"]), xi=sub["xi"], n_fit=sub["n_fit"])
        partition = StatePartition(np.asarray(doc["boundaries"]))
        fm = FuzzyMarkovModel(
            partition=partition,
            fuzzy_counts=np.asarray(doc["fuzzy_counts"]),
            fuzzy_probs=np.asarray(doc["fuzzy_probs"]),
            midpoints=partition.midpoints,
            degenerate_rows=np.asarray(doc["degenerate_rows"], dtype=bool),
        )
        z_last, y_last = doc["last_residual"], doc["last_actual"]
        return LoadedModel(
            "dgm_fmarkov",
            doc["n_fit"],
            lambda h: _fmarkov_forecast(dgm_model, fm, z_last, y_last, h),
        )
    if kind == "net":
        net = _net_from_doc(doc["net"])
        if doc["variant"] == "ignn":
            forecaster = IgnnForecaster(
                net=net,
                window=doc["window"],
                ago_values=np.asarray(doc["ago_tail"]),
                n_fit=doc["n_fit"],
            )
            return LoadedModel("ignn", doc["n_fit"], lambda h: ignn_forecast(forecaster, h))
        if doc["variant"] == "sgnn":
            forecaster = SgnnForecaster(
                net=net,
                gm_models=[GmModel(**m) for m in doc["gm_models"]],
                offsets=list(doc["offsets"]),
                n_fit=doc["n_fit"],
            )
            return LoadedModel("sgnn", doc["n_fit"], lambda h: sgnn_forecast(forecaster, h))
        raise DataError(f"unknown net variant {doc['variant']!r}")
    if kind == "hybrid":
        parts = [model_from_doc(sub) for sub in doc["components"]]
        weights = np.asarray(doc["weights"], dtype=float)
        combine = doc["combine"]

        def forecast(h):
            columns = [p.forecast(h) for p in parts]
            return combine_forecasts(columns, weights, combine)

        return LoadedModel("hybrid", max(p.n_fit for p in parts), forecast)
    raise DataError(f"unknown model kind {kind!r}")


def markov_report_doc(report: MarkovTestReport | None):
    if report is None:
        return None
    return {
        "chi_squared": report.chi_squared,
        "dof": report.dof,
        "threshold": report.threshold,
        "alpha": report.alpha,
        "log_base": report.log_base,
        "is_markov": report.is_markov,
        "verdict": "MARKOV" if report.is_markov else "NOT MARKOV",
    }


def metrics_doc(actual, predicted) -> dict:
    report = evaluate(actual, predicted)
    return {
        "mse": report.mse,
        "mae": report.mae,
        "mape": report.mape,
        "theil": report.theil,
        "n": report.n,
        "degenerate": list(report.degenerate),
    }
