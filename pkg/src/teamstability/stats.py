"""Ordinary least squares with the classical diagnostic table.

The fit goes through a thin QR decomposition of the design matrix, never
through an explicit inverse of X'X. Diagnostics per coefficient are the
standard error, the t value and its two-sided p-value; for the model, the
overall F test, R^2 and adjusted R^2.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from teamstability.distributions import f_sf, t_two_sided_p

CONSTANT = "Constant"
RANK_TOL = 1e-10


class RegressionError(ValueError):
    pass


class InputError(RegressionError):
    pass


class SampleSizeError(RegressionError):
    pass


class SingularDesignError(RegressionError):
    """The design matrix is rank deficient; ``column`` is the first dependent column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"design matrix is rank deficient: column {column!r} is collinear")


@dataclass(frozen=True, eq=False)
class RegressionInput:
    response: np.ndarray
    design: tuple[tuple[str, np.ndarray], ...]
    intercept: bool = True

    def __init__(
        self,
        response: Sequence[float],
        design: Mapping[str, Sequence[float]] | Sequence[tuple[str, Sequence[float]]],
        intercept: bool = True,
    ):
        pairs = list(design.items()) if isinstance(design, Mapping) else list(design)
        names = [name for name, _ in pairs]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise InputError(f"duplicated column names: {dupes}")
        if intercept and CONSTANT in names:
            raise InputError(f"{CONSTANT!r} is reserved for the intercept")
        if not pairs:
            raise InputError("at least one predictor column is required")
        y = np.asarray(response, dtype=float)
        cols = tuple((str(name), np.asarray(col, dtype=float)) for name, col in pairs)
        for name, col in (("response", y), *cols):
            if col.ndim != 1 or col.shape != y.shape:
                raise InputError(f"column {name!r} has shape {col.shape}, response has {y.shape}")
            if not np.all(np.isfinite(col)):
                raise InputError(f"column {name!r} contains non-finite values")
        if y.size < len(cols) + 2:
            raise SampleSizeError(
                f"{y.size} observations for {len(cols)} predictors; need at least {len(cols) + 2}"
            )
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "design", cols)
        object.__setattr__(self, "intercept", bool(intercept))

    @property
    def names(self) -> list[str]:
        return ([CONSTANT] if self.intercept else []) + [n for n, _ in self.design]

    def matrix(self) -> np.ndarray:
        cols = [c for _, c in self.design]
        if self.intercept:
            cols.insert(0, np.ones_like(self.response))
        return np.column_stack(cols)


@dataclass(frozen=True)
class RegressionResult:
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_values: dict[str, float]
    p_values: dict[str, float]
    F: float
    F_p: float
    r_squared: float
    adj_r_squared: float
    n_obs: int
    df_resid: int
    fitted: np.ndarray = field(repr=False, compare=False)
    residuals: np.ndarray = field(repr=False, compare=False)

    @property
    def names(self) -> list[str]:
        return list(self.coefficients)

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": self.coefficients,
            "std_errors": self.std_errors,
            "t_values": self.t_values,
            "p_values": self.p_values,
            "F": self.F,
            "F_p": self.F_p,
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "n_obs": self.n_obs,
            "df_resid": self.df_resid,
        }

    def to_json(self) -> str:
        # inf is not valid JSON; t values of exact fits become strings
        def clean(x):
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, float) and not math.isfinite(x):
                return str(x)
            return x

        return json.dumps(clean(self.to_dict()), indent=2)

    def format_table(self, digits: int = 3) -> str:
        """Coefficient / T-value / Sig rows followed by F and R^2 lines."""
        width = max(12, *(len(n) for n in self.names)) + 2

        def num(x: float) -> str:
            if not math.isfinite(x):
                return "inf" if x > 0 else "-inf"
            return f"{x:.{digits}e}" if abs(x) >= 1e7 else f"{x:.{digits}f}"

        lines = [f"{'':<{width}}{'Coefficients':>14}{'T-value':>12}{'Sig':>10}"]
        for name in self.names:
            lines.append(
                f"{name:<{width}}{num(self.coefficients[name]):>14}"
                f"{num(self.t_values[name]):>12}{num(self.p_values[name]):>10}"
            )
        lines.append(f"{'F':<{width}}{num(self.F):>14}{'Sig':>12}{num(self.F_p):>10}")
        lines.append(
            f"{'R²':<{width}}{num(self.r_squared):>14}{'Adj-R²':>12}{num(self.adj_r_squared):>10}"
        )
        lines.append(f"n = {self.n_obs}, residual df = {self.df_resid}")
        return "\n".join(lines)


def ols_fit(data: RegressionInput) -> RegressionResult:
    X = data.matrix()
    y = data.response
    names = data.names
    n, p = X.shape

    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    scale = diag.max() if diag.size else 0.0
    for k, d in enumerate(diag):
        if not d > RANK_TOL * scale:
            raise SingularDesignError(names[k])

    beta = np.linalg.solve(R, Q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    df_resid = n - p
    df_model = p - int(data.intercept)

    if data.intercept:
        tss = float(((y - y.mean()) ** 2).sum())
    else:
        tss = float(y @ y)
    if tss > 0:
        r2 = min(max(1.0 - rss / tss, 0.0), 1.0)
    else:
        r2 = 0.0
    denom = n - 1 if data.intercept else n
    adj = 1.0 - (1.0 - r2) * denom / df_resid

    sigma2 = rss / df_resid
    r_inv = np.linalg.solve(R, np.eye(p))
    se = np.sqrt(sigma2 * (r_inv**2).sum(axis=1))

    t_values, p_values = {}, {}
    for name, b, s in zip(names, beta, se):
        if s > 0:
            t = float(b / s)
        else:
            t = math.copysign(math.inf, b) if b != 0 else 0.0
        t_values[name] = t
        p_values[name] = t_two_sided_p(t, df_resid)

    ess = max(tss - rss, 0.0)
    if tss == 0:
        F, F_p = 0.0, 1.0
    elif rss == 0:
        F, F_p = math.inf, 0.0
    else:
        F = (ess / df_model) / (rss / df_resid)
        F_p = f_sf(F, df_model, df_resid)

    return RegressionResult(
        coefficients={k: float(v) for k, v in zip(names, beta)},
        std_errors={k: float(v) for k, v in zip(names, se)},
        t_values=t_values,
        p_values=p_values,
        F=float(F),
        F_p=float(F_p),
        r_squared=float(r2),
        adj_r_squared=float(adj),
        n_obs=n,
        df_resid=df_resid,
        fitted=fitted,
        residuals=resid,
    )


def multivariate_fit(data: RegressionInput) -> RegressionResult:
    """Fit several named predictors at once (e.g. S, L, E, I).

    Coefficients are keyed by column name. Column names are checked for
    duplicates when the :class:`RegressionInput` is built.
    """
    return ols_fit(data)


def simple_fit(x: Sequence[float], y: Sequence[float], name: str = "S") -> RegressionResult:
    """Regress ``y`` on a single predictor plus an intercept."""
    return ols_fit(RegressionInput(y, [(name, x)]))
