"""scikit-learn style wrappers around the lift and the statistics.

Sequences passed to these estimators are 0-based: element i holds the value
at index i + 1 (a(t (i+1)^2), A(i+1), ...).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    check_positive_int,
    check_unit_interval_values,
    check_unit_residue,
    one_indexed,
)
from .characters import DirichletCharacter, parse_label, principal
from .density import SignFunction, progression_sign_counts
from .satotate import Restriction, chi_square_statistic, default_partition, error_term_fit, ks_statistic, st_measure
from .shimura import invert_lift, lift
from .halfint import HalfIntegralForm


class ShimuraLift(TransformerMixin, BaseEstimator):
    """Maps a(t n^2) to A_t(n); ``inverse_transform`` goes back."""

    def __init__(self, t=1, level=4, k=6, character=None):
        self.t = t
        self.level = level
        self.k = k
        self.character = character

    def fit(self, X=None, y=None):
        check_positive_int(self.t, "t")
        check_positive_int(self.k, "k", minimum=2)
        if self.level % 4:
            raise ValueError(f"level must be divisible by 4, got {self.level}")
        chi = self.character
        if chi is None:
            chi = principal(self.level)
        elif isinstance(chi, str):
            chi = parse_label(chi)
        if not isinstance(chi, DirichletCharacter) or chi.modulus != self.level:
            raise ValueError("character must be a Dirichlet character modulo level")
        self.character_ = chi
        return self

    def transform(self, X):
        check_is_fitted(self, "character_")
        values = one_indexed(X)
        form = HalfIntegralForm.from_square_class(values, self.t, self.level, self.k, self.character_)
        return list(lift(form, self.t, len(values) - 1).coeffs[1:])

    def inverse_transform(self, X):
        check_is_fitted(self, "character_")
        A = one_indexed(X)
        return invert_lift(A, self.t, self.character_, self.level, self.k)[1:]


class ErrorTermRegressor(RegressorMixin, BaseEstimator):
    """Fits |E(x)| ~ C x^-alpha on checkpoints (x, E(x))."""

    def fit(self, X, y):
        x = np.asarray(X, dtype=float).ravel()
        e = np.asarray(y, dtype=float).ravel()
        if x.shape != e.shape:
            raise ValueError("X and y differ in length")
        fit = error_term_fit(list(zip(x, e)))
        self.C_, self.alpha_, self.residual_ = fit.C, fit.alpha, fit.residual
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        return self.C_ * np.asarray(X, dtype=float).ravel() ** (-self.alpha_)


class SatoTateGoodnessOfFit(BaseEstimator):
    """KS and chi-square agreement of normalized eigenvalues with the semicircle law.

    ``fit(B, primes)`` keeps the values whose prime meets the restriction
    p = d mod q (all primes when q = 1).
    """

    def __init__(self, q=1, d=1, bins=20):
        self.q = q
        self.d = d
        self.bins = bins

    def _select(self, B, primes):
        values = check_unit_interval_values(B, "B")
        if primes is None:
            if self.q != 1:
                raise ValueError("primes are required for a progression restriction")
            return values
        primes = np.asarray(primes).ravel()
        if primes.shape != values.shape:
            raise ValueError("B and primes differ in length")
        return values[primes % self.q == self.d % self.q]

    def fit(self, B, primes=None):
        check_unit_residue(self.d, self.q)
        check_positive_int(self.bins, "bins")
        sample = np.sort(self._select(B, primes))
        if sample.size == 0:
            raise ValueError("restriction selects an empty sample")
        self.restriction_ = Restriction() if self.q == 1 else Restriction.progression(self.d, self.q)
        self.n_sample_ = int(sample.size)
        self.ks_ = ks_statistic(sample)
        self.chi_square_, self.dof_ = chi_square_statistic(sample, self.bins)
        table = []
        for a, b in default_partition(self.bins):
            share = np.count_nonzero((sample >= a) & (sample < b)) / sample.size
            table.append((a, b, share, st_measure(a, b)))
        # top bin is closed
        a, b, _, mu = table[-1]
        table[-1] = (a, b, np.count_nonzero(sample >= a) / sample.size, mu)
        self.interval_table_ = table
        return self

    def score(self, B, primes=None):
        """Negative KS distance (higher is better)."""
        return -ks_statistic(self._select(B, primes))


class ProgressionSignDensity(BaseEstimator):
    """Sign counts of a(t n^2)/chi(n) over n = d mod q, gcd(n, N) = 1."""

    def __init__(self, q=5, d=1, level=4, character=None):
        self.q = q
        self.d = d
        self.level = level
        self.character = character

    def fit(self, X, y=None):
        check_unit_residue(self.d, self.q)
        chi = parse_label(self.character) if isinstance(self.character, str) else self.character
        f = SignFunction.from_values(one_indexed(X), self.level, chi)
        report = progression_sign_counts(f, self.q, self.d)
        self.report_ = report
        self.positive_, self.negative_, self.zero_ = report.positive, report.negative, report.zero
        self.pos_ratio_, self.neg_ratio_, self.radius_ = report.pos_ratio, report.neg_ratio, report.radius
        return self
