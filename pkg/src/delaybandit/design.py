"""Regularized Gram accumulator Z = lam*I + sum u u^T with inverse queries.

Full mode keeps the p x p matrix and its inverse, updated by Sherman-Morrison
with a periodic direct refresh; Diagonal mode keeps only the diagonal and is
meant for parameter counts where p x p storage is infeasible.
"""

import numpy as np

from .errors import ConfigurationError

REFRESH_PERIOD = 512  # Sherman-Morrison drift control


class DesignMatrix:
    def __init__(self, p: int, lam: float, mode: str = "full"):
        if lam <= 0:
            raise ConfigurationError(f"lambda must be > 0, got {lam}")
        if p < 1:
            raise ConfigurationError(f"dimension must be >= 1, got {p}")
        if mode not in ("full", "diag"):
            raise ConfigurationError(f"unknown design-matrix mode {mode!r}")
        self.p = p
        self.lam = float(lam)
        self.mode = mode
        self.update_count = 0
        if mode == "full":
            self._z = lam * np.eye(p)
            self._zinv = np.eye(p) / lam
            self._logdet = p * np.log(lam)
        else:
            self._diag = np.full(p, lam)

    def _check_dim(self, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.p,):
            raise ValueError(f"vector has shape {u.shape}, expected ({self.p},)")
        return u

    def rank1_update(self, u: np.ndarray) -> None:
        u = self._check_dim(u)
        if self.mode == "diag":
            self._diag += u * u
        else:
            zu = self._zinv @ u
            denom = 1.0 + float(u @ zu)
            self._z += np.outer(u, u)
            self._zinv -= np.outer(zu, zu) / denom
            self._logdet += np.log(denom)
        self.update_count += 1
        if self.mode == "full" and self.update_count % REFRESH_PERIOD == 0:
            self._refresh()

    def _refresh(self):
        self._zinv = np.linalg.inv(self._z)
        sign, logdet = np.linalg.slogdet(self._z)
        self._logdet = logdet

    def quad_form(self, u: np.ndarray) -> float:
        """u^T Z^{-1} u, clipped at 0 against roundoff."""
        u = self._check_dim(u)
        if self.mode == "diag":
            val = float(np.sum(u * u / self._diag))
        else:
            val = float(u @ (self._zinv @ u))
        return max(val, 0.0)

    def logdet_ratio(self) -> float:
        """log det(Z) - p*log(lam), always >= 0."""
        if self.mode == "diag":
            val = float(np.sum(np.log(self._diag / self.lam)))
        else:
            val = self._logdet - self.p * np.log(self.lam)
        return max(val, 0.0)
