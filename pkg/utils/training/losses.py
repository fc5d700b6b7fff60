"""sMAPE and MASE forecast losses with their gradients."""

from __future__ import annotations

import logging

import numpy as np

from utils.validation import DataError, NumericalError

logger = logging.getLogger('depts.training')


def _pair(yhat: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    yhat = np.asarray(yhat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if yhat.shape != y.shape:
        raise DataError(f"Forecast shape {yhat.shape} does not match target shape {y.shape}")
    if yhat.ndim == 0 or yhat.shape[-1] == 0:
        raise DataError("Empty forecast")
    return yhat, y


def smape_terms(yhat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-row sMAPE over the last axis; zero-denominator terms count as 0."""
    yhat, y = _pair(yhat, y)
    denom = np.abs(y) + np.abs(yhat)
    ratio = np.divide(np.abs(yhat - y), denom, out=np.zeros_like(denom), where=denom > 0)
    return 200.0 * ratio.mean(axis=-1)


def smape(yhat: np.ndarray, y: np.ndarray) -> float:
    """(200/H) * sum |yhat - y| / (|y| + |yhat|)."""
    return float(np.mean(smape_terms(yhat, y)))


def smape_grad(yhat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d smape / d yhat, for the mean over rows when batched."""
    yhat, y = _pair(yhat, y)
    err = yhat - y
    denom = np.abs(y) + np.abs(yhat)
    safe = np.where(denom > 0, denom, 1.0)
    grad = np.sign(err) / safe - np.abs(err) * np.sign(yhat) / safe ** 2
    grad = np.where(denom > 0, grad, 0.0)
    rows = 1 if yhat.ndim == 1 else int(np.prod(yhat.shape[:-1]))
    return 200.0 * grad / (yhat.shape[-1] * rows)


def _seasonal_errors(insample: np.ndarray, m: int) -> np.ndarray:
    insample = np.asarray(insample, dtype=np.float64)
    m = int(m)
    if m < 1:
        raise DataError(f"Seasonal lag must be positive, got {m}")
    if insample.shape[-1] <= m:
        raise DataError(f"In-sample window of {insample.shape[-1]} points is too short for lag {m}")
    return np.abs(insample[..., m:] - insample[..., :-m]).mean(axis=-1)


def seasonal_scale(insample: np.ndarray, m: int) -> np.ndarray:
    """mean |insample_t - insample_{t-m}| over the last axis."""
    scale = _seasonal_errors(insample, m)
    if np.any(scale == 0):
        raise NumericalError("MASE seasonal-naive denominator is zero")
    return scale


def mase_terms(yhat: np.ndarray, y: np.ndarray, insample: np.ndarray, m: int) -> np.ndarray:
    yhat, y = _pair(yhat, y)
    return np.abs(yhat - y).mean(axis=-1) / seasonal_scale(insample, m)


def mase(yhat: np.ndarray, y: np.ndarray, insample: np.ndarray, m: int) -> float:
    """mean |yhat - y| scaled by the in-sample seasonal-naive error at lag m."""
    return float(np.mean(mase_terms(yhat, y, insample, m)))


def mase_grad(yhat: np.ndarray, y: np.ndarray, insample: np.ndarray, m: int) -> np.ndarray:
    yhat, y = _pair(yhat, y)
    scale = seasonal_scale(insample, m)
    rows = 1 if yhat.ndim == 1 else int(np.prod(yhat.shape[:-1]))
    return np.sign(yhat - y) / (np.asarray(scale)[..., None] * yhat.shape[-1] * rows)


def batch_mase(yhat: np.ndarray, y: np.ndarray, insample: np.ndarray, m: int) -> tuple[float, np.ndarray]:
    """
    MASE over the windows whose in-sample seasonal scale is non-zero, and its gradient.

    Windows with a flat in-sample stretch are left out of the mean and get a
    zero gradient.

    Raises:
        NumericalError: If every window is flat
    """
    yhat, y = _pair(yhat, y)
    H = yhat.shape[-1]
    insample = np.asarray(insample, dtype=np.float64)
    yhat2, y2 = yhat.reshape(-1, H), y.reshape(-1, H)
    insample2 = insample.reshape(-1, insample.shape[-1])
    if insample2.shape[0] != yhat2.shape[0]:
        raise DataError(f"{insample2.shape[0]} in-sample windows for {yhat2.shape[0]} forecasts")

    scale = _seasonal_errors(insample2, m)
    valid = scale > 0
    kept = int(valid.sum())
    if kept == 0:
        raise NumericalError("MASE seasonal-naive denominator is zero for every window")
    if kept < valid.size:
        logger.debug(f"MASE skipped {valid.size - kept} of {valid.size} windows with a flat in-sample stretch")

    err = yhat2[valid] - y2[valid]
    value = float(np.mean(np.abs(err).mean(axis=-1) / scale[valid]))
    grad = np.zeros_like(yhat2)
    grad[valid] = np.sign(err) / (scale[valid][:, None] * H * kept)
    return value, grad.reshape(yhat.shape)


def loss_and_grad(
    kind: str,
    yhat: np.ndarray,
    y: np.ndarray,
    insample: np.ndarray | None = None,
    m: int = 24,
) -> tuple[float, np.ndarray]:
    """Mean batch loss and its gradient with respect to yhat; MASE skips flat windows."""
    if kind == 'smape':
        return smape(yhat, y), smape_grad(yhat, y)
    if kind == 'mase':
        if insample is None:
            raise DataError("MASE needs an in-sample window")
        return batch_mase(yhat, y, insample, m)
    raise DataError(f"Unknown loss {kind!r}")
