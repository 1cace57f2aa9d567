"""CSV and JSON writers for profiles, kernels, samples and reports."""

import logging
import os
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.utils.quadrature import DEFAULT_ORDER, panel_rule

logger = logging.getLogger(__name__)


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def profile_frame(field) -> pd.DataFrame:
    """Determinant profile with columns x, re_det, im_det, abs_det, cond"""
    return pd.DataFrame(
        {
            "x": field.grid,
            "re_det": field.dets.real,
            "im_det": field.dets.imag,
            "abs_det": np.abs(field.dets),
            "cond": field.conds,
        }
    )


def _spectral_nodes(kset, order: int):
    """Nodes (N, Q) per piece: the stored ones when present, else a Gauss-Legendre rule"""
    stored = getattr(kset, "nodes", None)
    if stored is not None:
        return stored
    edges = -0.5 + np.arange(kset.N + 1) / kset.N
    return np.vstack([panel_rule(lo, hi, 1, order)[0] for lo, hi in zip(edges[:-1], edges[1:])])


def spectra_frame(kset, order: int = DEFAULT_ORDER) -> pd.DataFrame:
    """Columns piece, xi and re_g{n}, im_g{n} for every kernel"""
    nodes = _spectral_nodes(kset, order)
    data = {
        "piece": np.repeat(np.arange(kset.N), nodes.shape[1]),
        "xi": nodes.ravel(),
    }
    stored = getattr(kset, "values", None)
    for n in range(1, kset.N + 1):
        values = stored[n - 1] if stored is not None else kset.spectrum(n, nodes)
        values = np.asarray(values).ravel()
        data[f"re_g{n}"] = values.real
        data[f"im_g{n}"] = values.imag
    return pd.DataFrame(data)


def kernel_frame(kset, x) -> pd.DataFrame:
    """Columns x and re_g{n}, im_g{n} for every kernel"""
    x = np.asarray(x, dtype=float)
    data = {"x": x}
    for n in range(1, kset.N + 1):
        values = np.atleast_1d(kset.evaluate(n, x))
        data[f"re_g{n}"] = values.real
        data[f"im_g{n}"] = values.imag
    return pd.DataFrame(data)


def samples_frame(samples) -> pd.DataFrame:
    """Long format with columns n, m, re, im"""
    N, width = samples.data.shape
    return pd.DataFrame(
        {
            "n": np.repeat(np.arange(1, N + 1), width),
            "m": np.tile(samples.m_values, N),
            "re": samples.data.real.ravel(),
            "im": samples.data.imag.ravel(),
        }
    )


def reconstruction_frame(x, f_true, f_rec) -> pd.DataFrame:
    """Columns x, re_f_true, re_f_rec, abs_error"""
    f_true = np.asarray(f_true)
    f_rec = np.asarray(f_rec)
    return pd.DataFrame(
        {
            "x": np.asarray(x, dtype=float),
            "re_f_true": f_true.real,
            "re_f_rec": f_rec.real,
            "abs_error": np.abs(f_true - f_rec),
        }
    )


def write_csv(frame: pd.DataFrame, path: str) -> str:
    _ensure_parent(path)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_json(report: BaseModel, path: str, indent: Optional[int] = 2) -> str:
    _ensure_parent(path)
    with open(path, "w") as f:
        f.write(report.model_dump_json(indent=indent))
    logger.info(f"Wrote report to {path}")
    return path


def export_profile(field, path: str) -> str:
    return write_csv(profile_frame(field), path)
