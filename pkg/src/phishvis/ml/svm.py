"""C-SVM with an RBF kernel, one-vs-one, trained by SMO.

The binary solver follows the LIBSVM scheme: second-order working-set
selection, analytic two-variable updates with box clipping, and a stopping
rule on the maximal KKT violation ``m(a) - M(a) < tol``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from ..errors import TrainingError

log = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class SvmParams:
    cost: float = 40.0
    gamma: float | None = None  # default 1 / dim
    tol: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not self.cost > 0:
            raise ValueError("cost must be positive")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def gamma_for(self, dim: int) -> float:
        return self.gamma if self.gamma is not None else 1.0 / dim

    def to_dict(self) -> dict:
        return asdict(self)


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class BinarySolution:
    alpha: np.ndarray
    rho: float
    iterations: int


def solve_binary(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3) -> BinarySolution:
    """Solve ``min 1/2 a'Qa - e'a`` s.t. ``0 <= a <= C``, ``y'a = 0``, ``Q = yy' * K``.

    ``y`` holds +1/-1 labels. Decision function is ``sum(a*y*K(x_i, x)) - rho``.
    """
    n = y.size
    y = y.astype(np.float64)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    max_iter = max(10_000_000, 100 * n)
    pos = y > 0

    it = 0
    while it < max_iter:
        # i: maximal violator in I_up, scored by -y*G
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        score = -y * grad
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        g_max = score[i]
        g_min = np.min(np.where(low, score, np.inf))
        if g_max - g_min < tol:
            break

        # j: second-order choice among I_low with score below g_max
        b = g_max - score
        cand = low & (b > 0)
        if not cand.any():
            break
        quad = diag[i] + diag - 2.0 * K[i]
        quad = np.where(quad > 0, quad, TAU)
        obj = np.where(cand, -(b * b) / quad, np.inf)
        j = int(np.argmin(obj))

        old_i, old_j = alpha[i], alpha[j]
        Qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            q = diag[i] + diag[j] + 2.0 * Qij
            q = q if q > 0 else TAU
            delta = (-grad[i] - grad[j]) / q
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + diff
        else:
            q = diag[i] + diag[j] - 2.0 * Qij
            q = q if q > 0 else TAU
            delta = (grad[i] - grad[j]) / q
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, total
            if total > C:
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, total

        d_i, d_j = alpha[i] - old_i, alpha[j] - old_j
        grad += y * (y[i] * d_i * K[i] + y[j] * d_j * K[j])
        it += 1
    else:
        log.warning("SMO stopped at the iteration cap (%d) before reaching tol=%g", max_iter, tol)

    return BinarySolution(alpha, _rho(alpha, grad, y, C), it)


def _rho(alpha, grad, y, C) -> float:
    yg = y * grad
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        return float(yg[free].mean())
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


def fit_svm(X: np.ndarray, y: np.ndarray, n_classes: int, p: SvmParams) -> dict[str, np.ndarray]:
    """Train all class pairs; returns the arrays stored in the model file.

    ``support`` holds the union of support vectors, ``coef[k]`` the signed
    dual weights ``alpha*y`` of pair ``k`` over that union, ``rho[k]`` its
    offset and ``pairs[k]`` the (positive, negative) class indices.
    """
    present = np.unique(y)
    gamma = p.gamma_for(X.shape[1])
    if n_classes < 2:
        # nothing to separate: a constant model with no support vectors
        return {
            "support": np.zeros((0, X.shape[1])),
            "coef": np.zeros((0, 0)),
            "rho": np.zeros(0),
            "pairs": np.zeros((0, 2), dtype=np.int64),
            "gamma": np.array([gamma]),
        }
    if present.size < 2:
        raise TrainingError(f"SVM training needs at least two classes present, got {present.size}")
    K = rbf_kernel(X, X, gamma)

    pairs = list(combinations(range(n_classes), 2))
    coef_full = np.zeros((len(pairs), X.shape[0]))
    rho = np.zeros(len(pairs))
    for k, (a, b) in enumerate(pairs):
        rows = np.flatnonzero((y == a) | (y == b))
        if not ((y[rows] == a).any() and (y[rows] == b).any()):
            # class absent from the training data: that pair always votes for the present one
            rho[k] = -1.0 if (y[rows] == a).any() else 1.0
            continue
        yy = np.where(y[rows] == a, 1.0, -1.0)
        sol = solve_binary(K[np.ix_(rows, rows)], yy, p.cost, p.tol)
        coef_full[k, rows] = sol.alpha * yy
        rho[k] = sol.rho

    sv = np.flatnonzero(np.any(coef_full != 0, axis=0))
    return {
        "support": X[sv],
        "coef": coef_full[:, sv],
        "rho": rho,
        "pairs": np.array(pairs, dtype=np.int64).reshape(-1, 2),
        "gamma": np.array([gamma]),
    }


def svm_decision(arrays: dict[str, np.ndarray], X: np.ndarray) -> np.ndarray:
    Kx = rbf_kernel(X, arrays["support"], float(arrays["gamma"][0]))
    return Kx @ arrays["coef"].T - arrays["rho"][None, :]


def svm_scores(arrays: dict[str, np.ndarray], X: np.ndarray, n_classes: int) -> np.ndarray:
    """Fraction of pairwise contests won by each class."""
    if n_classes == 1:
        return np.ones((X.shape[0], 1))
    dec = svm_decision(arrays, X)
    pairs = arrays["pairs"]
    votes = np.zeros((X.shape[0], n_classes))
    for k, (a, b) in enumerate(pairs):
        win_a = dec[:, k] > 0
        votes[:, a] += win_a
        votes[:, b] += ~win_a
    return votes / max(len(pairs), 1)
