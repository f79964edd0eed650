"""Combination forecasting: weight schemes and combination formulas.

Four ways to weight competing forecasts of the same series — effective
degree ratios, the minimal-variance two-model split, simplex-constrained
least squares, and grey-relational-degree maximisation — plus the
arithmetic / geometric / harmonic combination rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DegeneracyError
from .series import as_values

SCHEME_EFFECTIVE = "effective_degree"
SCHEME_MIN_VARIANCE = "min_variance"
SCHEME_SIMPLEX_LS = "simplex_ls"
SCHEME_GREY_RELATION = "grey_relation"
SCHEMES = (SCHEME_EFFECTIVE, SCHEME_MIN_VARIANCE, SCHEME_SIMPLEX_LS, SCHEME_GREY_RELATION)

COMBINE_ARITHMETIC = "arithmetic"
COMBINE_GEOMETRIC = "geometric"
COMBINE_HARMONIC = "harmonic"
COMBINE_SCHEMES = (COMBINE_ARITHMETIC, COMBINE_GEOMETRIC, COMBINE_HARMONIC)


@dataclass(frozen=True)
class HybridWeights:
    """A weight vector on the probability simplex plus provenance."""

    weights: np.ndarray
    scheme: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or not np.all(np.isfinite(w)):
            raise DataError("weights must be a finite 1-D vector")
        if np.any(w < -1e-9) or abs(w.sum() - 1.0) > 1e-9:
            raise DataError(
                f"weights must lie on the probability simplex, got {w.tolist()}"
            )
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))


@dataclass(frozen=True)
class RelationConfig:
    """Identification coefficient for relational coefficients."""

    rho: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ConfigError(f"rho must lie strictly in (0, 1), got {self.rho}")


def accuracy_series(actual, predicted) -> np.ndarray:
    """Per-point accuracy 1 - |relative error|; can go negative, never clamped."""
    y = as_values(actual)
    f = as_values(predicted)
    if y.size != f.size:
        raise DataError(f"series lengths differ: {y.size} vs {f.size}")
    zero = np.nonzero(y == 0.0)[0]
    if zero.size:
        raise DegeneracyError(
            f"actual value at t={zero[0] + 1} is zero; accuracy undefined"
        )
    return 1.0 - np.abs((y - f) / y)


def effective_degree(accuracy) -> float:
    """Scalar quality score E*(1 - sigma) over an accuracy series.

    sigma is the root of the summed squared deviations divided by N (not
    the usual standard deviation).
    """
    a = as_values(accuracy)
    mean = float(a.mean())
    sigma = float(np.sqrt(np.sum((a - mean) ** 2)) / a.size)
    return mean * (1.0 - sigma)


def effective_weights(degrees) -> HybridWeights:
    """Normalised effective-degree ratios."""
    s = np.asarray(degrees, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise DataError("need effective degrees for at least 2 models")
    if np.any(s <= 0):
        raise DegeneracyError(
            f"effective degrees must all be positive to form weights, got {s.tolist()}"
        )
    return HybridWeights(
        weights=s / s.sum(),
        scheme=SCHEME_EFFECTIVE,
        diagnostics={"degrees": [float(v) for v in s]},
    )


def min_variance_weight(e1, e2, assume_independent: bool = False) -> HybridWeights:
    """Variance-minimising split between two error sequences.

    weights[0] multiplies model 1.  The numerator carries the variance of
    the OTHER model (plus the covariance correction), so the lower-variance
    model receives the larger weight.
    """
    a = as_values(e1, min_len=2)
    b = as_values(e2, min_len=2)
    if a.size != b.size:
        raise DataError(f"error series lengths differ: {a.size} vs {b.size}")
    var1 = float(np.var(a, ddof=1))
    var2 = float(np.var(b, ddof=1))
    cov = 0.0 if assume_independent else float(np.cov(a, b, ddof=1)[0, 1])
    denom = var1 + var2 - 2.0 * cov
    tie = False
    if denom == 0.0:
        rho = 0.5
        tie = True
    else:
        rho = float(np.clip((var2 - cov) / denom, 0.0, 1.0))
    return HybridWeights(
        weights=np.array([rho, 1.0 - rho]),
        scheme=SCHEME_MIN_VARIANCE,
        diagnostics={
            "rho_star": rho,
            "var_e1": var1,
            "var_e2": var2,
            "cov": cov,
            "tie": tie,
            # The variance-minimising split puts var_e2 in the numerator;
            # a var_e1 numerator would maximise the combined variance.
            "numerator": "var_e2",
        },
    )


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _forecast_matrix(actual, forecasts) -> tuple[np.ndarray, np.ndarray]:
    y = as_values(actual)
    columns = [as_values(f) for f in forecasts]
    if len(columns) < 2:
        raise DataError(f"need at least 2 forecasts, got {len(columns)}")
    for j, col in enumerate(columns):
        if col.size != y.size:
            raise DataError(
                f"forecast {j + 1} has length {col.size}, expected {y.size}"
            )
    return y, np.column_stack(columns)


def simplex_ls_weights(actual, forecasts) -> HybridWeights:
    """Least-squares weights on the simplex.

    Projected gradient descent with exact 1/L steps, polished by an
    equality-constrained solve on the active support; the result is also
    checked against every unit vector and the uniform vector, so the
    achieved SSE never exceeds the best single model's.
    """
    y, f = _forecast_matrix(actual, forecasts)
    p = f.shape[1]
    spread = np.max(np.abs(f - f[:, [0]]))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(f)))):
        w = np.full(p, 1.0 / p)
        sse = float(np.sum((y - f @ w) ** 2))
        return HybridWeights(
            weights=w,
            scheme=SCHEME_SIMPLEX_LS,
            diagnostics={"sse": sse, "iterations": 0, "degenerate": True},
        )

    gram = f.T @ f
    rhs = f.T @ y

    def sse(w: np.ndarray) -> float:
        return float(np.sum((y - f @ w) ** 2))

    lipschitz = 2.0 * float(np.linalg.eigvalsh(gram)[-1])
    step = 1.0 / lipschitz
    w = np.full(p, 1.0 / p)
    iterations = 0
    for iterations in range(1, 100_001):
        grad = 2.0 * (gram @ w - rhs)
        w_new = project_to_simplex(w - step * grad)
        if np.max(np.abs(w_new - w)) < 1e-15:
            w = w_new
            break
        w = w_new

    candidates = [w, np.full(p, 1.0 / p)]
    candidates.extend(np.eye(p)[j] for j in range(p))
    support = np.nonzero(w > 1e-10)[0]
    polished = _equality_ls(gram, rhs, support, p)
    if polished is not None:
        candidates.append(polished)
    best = min(candidates, key=sse)
    return HybridWeights(
        weights=best,
        scheme=SCHEME_SIMPLEX_LS,
        diagnostics={"sse": sse(best), "iterations": iterations, "degenerate": False},
    )


def _equality_ls(gram, rhs, support, p) -> np.ndarray | None:
    """Solve min w'Gw - 2w'b s.t. sum(w)=1 on a support; None if infeasible."""
    s = len(support)
    if s == 0:
        return None
    kkt = np.zeros((s + 1, s + 1))
    kkt[:s, :s] = 2.0 * gram[np.ix_(support, support)]
    kkt[:s, s] = 1.0
    kkt[s, :s] = 1.0
    target = np.append(2.0 * rhs[support], 1.0)
    try:
        solution = np.linalg.solve(kkt, target)
    except np.linalg.LinAlgError:
        return None
    w_support = solution[:s]
    if np.any(w_support < -1e-12):
        return None
    w = np.zeros(p)
    w[support] = np.clip(w_support, 0.0, None)
    total = w.sum()
    if total <= 0:
        return None
    return w / total


def grey_relation_degree(actual, predicted, peer_errors=None, cfg: RelationConfig | None = None) -> float:
    """Grey relational degree of one forecast against the zero-error ideal.

    The min/max envelopes are taken jointly over this method's absolute
    errors and every peer error sequence supplied, matching how the degree
    is defined when several candidate methods are compared at once.
    """
    cfg = cfg or RelationConfig()
    y = as_values(actual)
    f = as_values(predicted)
    if y.size != f.size:
        raise DataError(f"series lengths differ: {y.size} vs {f.size}")
    own = np.abs(y - f)
    pools = [own]
    for peer in peer_errors or ():
        pools.append(np.abs(as_values(peer)))
    emin = min(float(p.min()) for p in pools)
    emax = max(float(p.max()) for p in pools)
    if emax == 0.0:
        return 1.0
    coeff = (emin + cfg.rho * emax) / (own + cfg.rho * emax)
    return float(coeff.mean())


def _relation_envelopes(abs_errors: np.ndarray) -> tuple[float, float]:
    return float(abs_errors.min()), float(abs_errors.max())


def _gamma_of_combined(combined_abs, emin, emax, rho) -> float:
    return float(np.mean((emin + rho * emax) / (combined_abs + rho * emax)))


def _golden_max(fn, lo: float, hi: float, iters: int = 120):
    """Golden-section search for a maximum on [lo, hi]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def optimize_relation_weights(actual, forecasts, cfg: RelationConfig | None = None) -> HybridWeights:
    """Maximise the relational degree of the combined error over the simplex.

    The envelopes stay fixed at the individual methods' values, so every
    unit vector scores exactly its own individual degree; the optimum can
    therefore never fall below the best single method.
    """
    cfg = cfg or RelationConfig()
    y, f = _forecast_matrix(actual, forecasts)
    m = f.shape[1]
    errors = y[None, :] - f.T  # (m, N) signed errors
    abs_errors = np.abs(errors)
    emin, emax = _relation_envelopes(abs_errors)
    rho = cfg.rho
    individual = [
        _gamma_of_combined(abs_errors[j], emin, emax, rho) for j in range(m)
    ]

    def diag(gamma: float, tie: bool = False) -> dict:
        return {"gamma": gamma, "gamma_individual": individual, "tie": tie}

    if emax == 0.0:
        w = np.full(m, 1.0 / m)
        return HybridWeights(w, SCHEME_GREY_RELATION, diag(1.0, tie=True))

    spread = np.max(np.abs(f - f[:, [0]]))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(f)))):
        w = np.full(m, 1.0 / m)
        gamma = _gamma_of_combined(np.abs(w @ errors), emin, emax, rho)
        return HybridWeights(w, SCHEME_GREY_RELATION, diag(gamma, tie=True))

    def gamma_of(w: np.ndarray) -> float:
        return _gamma_of_combined(np.abs(w @ errors), emin, emax, rho)

    if m == 2:
        e1, e2 = errors
        delta = e1 - e2

        def gamma1(w1: float) -> float:
            return _gamma_of_combined(np.abs(e2 + w1 * delta), emin, emax, rho)

        grid = np.linspace(0.0, 1.0, 10_001)
        combined = np.abs(e2[None, :] + grid[:, None] * delta[None, :])
        scores = np.mean((emin + rho * emax) / (combined + rho * emax), axis=1)
        best_idx = int(np.argmax(scores))
        candidates = [(float(grid[best_idx]), float(scores[best_idx]))]
        lo = max(0.0, grid[best_idx] - 1e-4)
        hi = min(1.0, grid[best_idx] + 1e-4)
        candidates.append(_golden_max(gamma1, lo, hi))
        # Zeros of the combined error are the only non-smooth points of the
        # objective; include them as candidates.
        movable = delta != 0.0
        kinks = -e2[movable] / delta[movable]
        kinks = kinks[(kinks >= 0.0) & (kinks <= 1.0)]
        candidates.extend((float(kk), gamma1(float(kk))) for kk in kinks)
        w1, gamma = max(candidates, key=lambda pair: pair[1])
        w = np.array([w1, 1.0 - w1])
        return HybridWeights(w, SCHEME_GREY_RELATION, diag(gamma))

    rng = np.random.default_rng(0)
    starts = [np.full(m, 1.0 / m)]
    starts.extend(np.eye(m)[j] for j in range(m))
    while len(starts) < 16:
        starts.append(rng.dirichlet(np.ones(m)))
    best_w, best_gamma = None, -np.inf
    for start in starts:
        w, gamma = _coordinate_search(gamma_of, start)
        if gamma > best_gamma:
            best_w, best_gamma = w, gamma
    for j in range(m):
        unit = np.eye(m)[j]
        if individual[j] > best_gamma:
            best_w, best_gamma = unit, individual[j]
    return HybridWeights(best_w, SCHEME_GREY_RELATION, diag(best_gamma))


def _coordinate_search(fn, start: np.ndarray, initial_step: float = 0.25):
    """Derivative-free coordinate moves projected back onto the simplex."""
    w = project_to_simplex(np.asarray(start, dtype=float))
    best = fn(w)
    step = initial_step
    m = w.size
    while step > 1e-8:
        improved = False
        for i in range(m):
            for sign in (1.0, -1.0):
                trial = w.copy()
                trial[i] += sign * step
                trial = project_to_simplex(trial)
                value = fn(trial)
                if value > best + 1e-15:
                    w, best = trial, value
                    improved = True
        if not improved:
            step *= 0.5
    return w, best


def combine_forecasts(forecasts, w, scheme: str = COMBINE_ARITHMETIC) -> np.ndarray:
    """Weighted arithmetic, geometric, or harmonic combination."""
    if scheme not in COMBINE_SCHEMES:
        raise ConfigError(f"unknown combination scheme {scheme!r}")
    weights = w.weights if isinstance(w, HybridWeights) else np.asarray(w, dtype=float)
    columns = [as_values(f) for f in forecasts]
    if len(columns) != weights.size:
        raise DataError(
            f"got {len(columns)} forecasts for {weights.size} weights"
        )
    n = columns[0].size
    for j, col in enumerate(columns):
        if col.size != n:
            raise DataError(f"forecast {j + 1} has length {col.size}, expected {n}")
    f = np.column_stack(columns)
    if scheme == COMBINE_ARITHMETIC:
        return f @ weights
    if np.any(f <= 0):
        raise DataError(
            f"{scheme} combination requires strictly positive forecasts"
        )
    if scheme == COMBINE_GEOMETRIC:
        return np.exp(np.log(f) @ weights)
    return 1.0 / ((1.0 / f) @ weights)
