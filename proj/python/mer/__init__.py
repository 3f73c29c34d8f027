"""Valence/arousal regression from audio features and lyrics."""

import json as _json
import os as _os

from . import _core
from ._core import (
    ConfigError,
    InfrastructureError,
    MerError,
    Pca,
    Regressor,
    RunConfig,
    SentimentLexicon,
    Vocabulary,
    fit_pca,
    fit_regressor,
    fit_tfidf,
    grid_search,
    lemmatize,
    ols_fit,
    r2_score,
    render_report,
    run_rfe,
    tokenize,
    vader,
)

_bundled = _os.path.join(_os.path.dirname(__file__), "data")
default_data_dir = _bundled if _os.path.isdir(_bundled) else _core.default_data_dir


def load_config(path=None, overrides=None, data_dir=None):
    """Defaults, then the config file, then `overrides` (key -> value strings)."""
    overrides = {k: str(v) for k, v in (overrides or {}).items()}
    return _core.load_config(path, overrides, data_dir or default_data_dir)


def build_features(config):
    """Writes the feature files and returns the manifest."""
    return _json.loads(_core.build_features(config))


def evaluate(config):
    """Runs the full evaluation and returns the report as a dict."""
    return _json.loads(_core.evaluate(config))


def train(config):
    return _json.loads(_core.train(config))


__all__ = [n for n in dir() if not n.startswith("_")]
