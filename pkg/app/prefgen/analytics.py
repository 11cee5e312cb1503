"""
Analytic model parameters: u_k, R_M, Q_W and the popularity ratios.

Popularity weights are only ever compared through log differences.
"""

import math
from typing import Union

import numpy as np

from app.bounds.schemas import UkSequence
from app.bounds.service import gaussian_uk_sequence
from app.prefgen.schemas import (
    BuiltInstance, GaussianModel, LogWeights, MasterListModel, PopularityModel,
)
from app.shared.errors import ModelParameterError, UnsupportedModelError

AnyModel = Union[PopularityModel, GaussianModel, MasterListModel, BuiltInstance]


def _unwrap(model: AnyModel):
    if isinstance(model, BuiltInstance):
        if model.model is None:
            raise UnsupportedModelError(
                f"u_k is only defined for popularity, master-list and Gaussian models, "
                f"not '{model.descriptor.model.value}'"
            )
        return model.model
    return model


def _dense(rows: tuple[LogWeights, ...], width: int) -> np.ndarray:
    """Rows of log-weights as a matrix, -inf where the partner is unacceptable."""
    table = np.full((len(rows), width), -np.inf)
    for p, weights in enumerate(rows):
        table[p, weights.candidates] = weights.log_weights
    return table


def _weighted_women(model: PopularityModel) -> tuple[LogWeights, ...]:
    if any(weights is None for weights in model.women):
        raise UnsupportedModelError("u_k needs popularity weights for every woman")
    return model.women


def _weighted_men(model: PopularityModel) -> tuple[LogWeights, ...]:
    if model.men is None or any(weights is None for weights in model.men):
        raise ModelParameterError("men-side popularity weights are required")
    return model.men


# ---------------------------------------------------------
# u_k
# ---------------------------------------------------------
def _popularity_log_uk(table: np.ndarray, k: int) -> float:
    if k >= table.shape[1]:
        return -math.inf
    gaps = table[:, k:] - table[:, :-k]
    finite = gaps[np.isfinite(gaps)]
    return float(finite.max()) if finite.size else -math.inf


def compute_uk(model: AnyModel, k: int) -> float:
    """Worst-case odds that some woman ranks m_{i+k} above m_i.

    For popularity women the two-item marginal of the sequential draw gives odds
    D_w(m_{i+k}) / D_w(m_i); only pairs both acceptable to w count.
    """
    if k < 1:
        raise ModelParameterError(f"k must be at least 1, got {k}")
    model = _unwrap(model)
    if isinstance(model, MasterListModel):
        return 0.0
    if isinstance(model, GaussianModel):
        return 2 * math.exp(-((k / (2 * model.sigma)) ** 2))
    if isinstance(model, PopularityModel):
        log_uk = _popularity_log_uk(_dense(_weighted_women(model), model.M), k)
        return math.exp(log_uk) if math.isfinite(log_uk) else 0.0
    raise UnsupportedModelError(f"u_k is not defined for {type(model).__name__}")


def uk_sequence(model: AnyModel) -> UkSequence:
    """The whole sequence; popularity u_k vanish for k >= M."""
    model = _unwrap(model)
    if isinstance(model, MasterListModel):
        return UkSequence.finite(())
    if isinstance(model, GaussianModel):
        return gaussian_uk_sequence(model.sigma)
    if isinstance(model, PopularityModel):
        table = _dense(_weighted_women(model), model.M)
        logs = [_popularity_log_uk(table, k) for k in range(1, model.M)]
        return UkSequence.finite(math.exp(v) if math.isfinite(v) else 0.0 for v in logs)
    raise UnsupportedModelError(f"u_k is not defined for {type(model).__name__}")


# ---------------------------------------------------------
# R_M, Q_W
# ---------------------------------------------------------
def compute_log_RM_QW(model: PopularityModel) -> tuple[float, float]:
    """(ln R_M, ln Q_W) for a complete two-sided popularity model."""
    men = _weighted_men(model)
    women = _weighted_women(model)
    if any(len(weights.candidates) != model.W for weights in men) or any(
        len(weights.candidates) != model.M for weights in women
    ):
        raise ModelParameterError("R_M and Q_W are defined for complete acceptability only")

    log_R_M = max(float(weights.log_weights.max() - weights.log_weights.min()) for weights in men)

    # Q_W: for each pair of women the spread of their log-weight difference over men
    table = _dense(women, model.M)
    log_Q_W = 0.0
    for w0 in range(model.W):
        diff = table[w0] - table
        log_Q_W = max(log_Q_W, float((diff.max(axis=1) - diff.min(axis=1)).max()))
    return log_R_M, log_Q_W


def compute_RM_QW(model: PopularityModel) -> tuple[float, float]:
    log_R_M, log_Q_W = compute_log_RM_QW(model)
    return math.exp(log_R_M), math.exp(log_Q_W)


# ---------------------------------------------------------
# Intrinsic and symmetric popularity ratios
# ---------------------------------------------------------
def compute_idpop_log_ratios(model: PopularityModel) -> np.ndarray:
    """ln r_m per man: spread of the popularity women who accept him give him."""
    table = _dense(_weighted_women(model), model.M)
    ratios = np.zeros(model.M)
    for m in range(model.M):
        column = table[:, m][np.isfinite(table[:, m])]
        if column.size:
            ratios[m] = column.max() - column.min()
    return ratios


def compute_idpop_ratios(model: PopularityModel) -> np.ndarray:
    return np.exp(compute_idpop_log_ratios(model))


def compute_symmetry_log_ratio(model: PopularityModel) -> float:
    """ln r: largest |ln D_w(m) - ln D_m(w)| over mutually acceptable pairs, weights as stored."""
    women = _dense(_weighted_women(model), model.M)
    men = _dense(_weighted_men(model), model.W)
    mutual = np.isfinite(women) & np.isfinite(men.T)
    if not mutual.any():
        return 0.0
    return float(np.abs(women - men.T)[mutual].max())


def compute_symmetry_ratio(model: PopularityModel) -> float:
    return math.exp(compute_symmetry_log_ratio(model))
