"""Iterative principal-component decomposition of a vector set.

Given n row vectors, each component is found by a normalized power
iteration: starting from uniform mixing coefficients, alternate

    Y(i)   = sum_k alpha_k(i) X^k
    a*_k   = <Y(i), X^k>
    alpha(i+1) = a* / ||a*||

until the coefficients stabilize, then subtract each row's rank-one
reconstruction (deflation) and repeat on the residual.  The coefficient
vectors come out orthonormal and the squared component norms equal the
eigenvalues of the Gram matrix [<X^i, X^j>] in decreasing order, which is
what every test oracle in this package checks against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ZeroDataError

# Residuals whose Frobenius norm falls below this fraction of the input's
# are treated as exhausted rank, not as another component to extract.
RESIDUAL_RANK_TOL = 1e-9


@dataclass(frozen=True)
class IterationConfig:
    """Stopping rule for the per-component power iteration.

    The iteration stops when the largest coefficient change (after sign
    alignment, since the iterate may flip sign while converging) drops below
    `tolerance`, or after `max_iterations` updates.  Hitting the cap is not
    an error; the iteration count is reported in the basis diagnostics.
    """

    max_iterations: int = 100
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class PrincipalBasis:
    """Components, mixing coefficients and diagnostics of a decomposition.

    components[mu] is the mu-th component (length `dimension`); alpha[mu] is
    its unit coefficient vector (length `source_count`); norms_sq[mu] is
    ||components[mu]||^2, non-increasing in mu.
    """

    components: np.ndarray  # (m, d)
    alpha: np.ndarray  # (m, n), unit rows
    norms_sq: np.ndarray  # (m,)
    source_count: int
    dimension: int
    iterations: list[int] = field(default_factory=list)
    rank_deficient: bool = False

    def __len__(self) -> int:
        return int(self.components.shape[0])


def _as_matrix(data) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionMismatchError(f"expected a 2-d data matrix, got shape {x.shape}")
    return x


def first_component(data, cfg: IterationConfig | None = None):
    """Extract the single best rank-one component of `data`.

    Returns (component, alpha, iterations_used) with sum(alpha^2) = 1 and the
    sign fixed so alpha's largest-magnitude entry is positive.
    """
    cfg = cfg or IterationConfig()
    x = _as_matrix(data)
    n = x.shape[0]
    frob_sq = float(np.sum(x * x))
    if frob_sq == 0.0:
        raise ZeroDataError("all rows are zero")

    alpha = np.full(n, 1.0 / np.sqrt(n))
    iterations = 0
    for _ in range(cfg.max_iterations):
        y = x.T @ alpha
        a_star = x @ y
        norm = float(np.linalg.norm(a_star))
        if norm <= frob_sq * 1e-15:
            # The uniform start cancelled (possible for sign-symmetric rows).
            # Restart from the largest row, which cannot cancel.
            alpha = np.zeros(n)
            alpha[int(np.argmax(np.einsum("ij,ij->i", x, x)))] = 1.0
            iterations += 1
            continue
        new_alpha = a_star / norm
        if float(new_alpha @ alpha) < 0.0:
            delta = float(np.max(np.abs(new_alpha + alpha)))
        else:
            delta = float(np.max(np.abs(new_alpha - alpha)))
        alpha = new_alpha
        iterations += 1
        if delta < cfg.tolerance:
            break

    k = int(np.argmax(np.abs(alpha)))
    if alpha[k] < 0.0:
        alpha = -alpha
    return x.T @ alpha, alpha, iterations


def deflate(data, component, alpha) -> np.ndarray:
    """Subtract each row's rank-one reconstruction: row k -> X^k - alpha_k * Y."""
    x = _as_matrix(data)
    y = np.asarray(component, dtype=np.float64)
    a = np.asarray(alpha, dtype=np.float64)
    if y.shape != (x.shape[1],):
        raise DimensionMismatchError(f"component length {y.shape} != row dimension {x.shape[1]}")
    if a.shape != (x.shape[0],):
        raise DimensionMismatchError(f"alpha length {a.shape} != row count {x.shape[0]}")
    return x - np.outer(a, y)


def decompose(data, m: int, cfg: IterationConfig | None = None) -> PrincipalBasis:
    """Extract `m` components by repeated first_component + deflate.

    If a residual vanishes before `m` components are found, the basis is
    truncated at the achieved rank and flagged `rank_deficient` instead of
    raising: low-rank inputs are routine for small text classes.
    """
    x = _as_matrix(data)
    n, d = x.shape
    if not 1 <= m <= n:
        raise ValueError(f"m must be in 1..{n}, got {m}")
    cfg = cfg or IterationConfig()
    frob0 = float(np.linalg.norm(x))
    if frob0 == 0.0:
        raise ZeroDataError("all rows are zero")

    components: list[np.ndarray] = []
    alphas: list[np.ndarray] = []
    iterations: list[int] = []
    rank_deficient = False
    residual = x.copy()
    for _ in range(m):
        if float(np.linalg.norm(residual)) <= RESIDUAL_RANK_TOL * frob0:
            rank_deficient = True
            break
        try:
            y, a, used = first_component(residual, cfg)
        except ZeroDataError:
            rank_deficient = True
            break
        components.append(y)
        alphas.append(a)
        iterations.append(used)
        residual = residual - np.outer(a, y)

    comp = np.array(components)
    return PrincipalBasis(
        components=comp,
        alpha=np.array(alphas),
        norms_sq=np.einsum("ij,ij->i", comp, comp),
        source_count=n,
        dimension=d,
        iterations=iterations,
        rank_deficient=rank_deficient,
    )


def reconstruct(basis: PrincipalBasis, m: int, v: int) -> np.ndarray:
    """Truncated reconstruction of row `v` from the first `m` components."""
    if not 0 <= v < basis.source_count:
        raise IndexError(f"row index {v} out of range 0..{basis.source_count - 1}")
    if not 0 <= m <= len(basis):
        raise IndexError(f"m={m} out of range 0..{len(basis)}")
    if m == 0:
        return np.zeros(basis.dimension)
    return basis.alpha[:m, v] @ basis.components[:m]


def tail_energy(basis: PrincipalBasis, m: int) -> float:
    """Sum of squared norms of components m, m+1, ...: the total truncation error."""
    if not 0 <= m <= len(basis):
        raise IndexError(f"m={m} out of range 0..{len(basis)}")
    return float(basis.norms_sq[m:].sum())
