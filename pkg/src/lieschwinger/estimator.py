"""Estimator-style front end over the sweep engine.

Follows the scikit-learn parameter protocol (constructor hyperparameters,
``fit`` returning self, fitted attributes with trailing underscores,
``get_params`` / ``set_params``) so runs compose with grid tooling.  There
is no transform or predict surface: the accumulated global unitary is never
materialized, so the fitted artifacts are the state, the gap report, and
the optional oracle comparison.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .certify import certify
from .errors import ValidationError
from .model import ChainModel, validate_chain_model
from .oracle import GUARD, compare
from .sweep import SeriesControls, sweep


class BlockDiagonalizer:
    """Fit the block-diagonalizing sweep to a chain model and certify it.

    Parameters mirror SeriesControls plus the oracle policy: "auto" runs
    exact diagonalization when the full space fits the dense guard, "force"
    always runs it, "off" never does.
    """

    def __init__(self, jmax=20, tol_series=1e-14, tol_od=1e-8, gap_min=0.5,
                 oracle="auto"):
        self.jmax = jmax
        self.tol_series = tol_series
        self.tol_od = tol_od
        self.gap_min = gap_min
        self.oracle = oracle

    _param_names = ("jmax", "tol_series", "tol_od", "gap_min", "oracle")

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self._param_names:
                raise ValueError(f"invalid parameter {name!r} for BlockDiagonalizer")
            setattr(self, name, value)
        return self

    def controls(self) -> SeriesControls:
        return SeriesControls(jmax=self.jmax, tol_series=self.tol_series,
                              tol_od=self.tol_od, gap_min=self.gap_min)

    def fit(self, model: ChainModel):
        if self.oracle not in ("auto", "force", "off"):
            raise ValidationError(f"oracle policy {self.oracle!r} not in auto/force/off")
        validate_chain_model(model)
        self.model_ = model
        self.state_ = sweep(model, self.controls())
        self.report_ = certify(self.state_, model, self.tol_od)
        run_oracle = self.oracle == "force" or (
            self.oracle == "auto" and model.M ** model.N <= GUARD
        )
        self.comparison_ = (
            compare(self.state_, model, self.report_.ground_energy)
            if run_oracle else None
        )
        if self.comparison_ is not None:
            self.report_ = dataclasses.replace(self.report_, oracle=self.comparison_)
        return self

    @property
    def ground_energy_(self) -> float:
        return self.report_.ground_energy

    @property
    def gap_(self) -> float:
        return self.report_.gap

    @property
    def per_step_gaps_(self) -> np.ndarray:
        return np.array([g for _, g in self.report_.per_step_gaps])
