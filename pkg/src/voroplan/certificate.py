"""Finite-time certificate machinery.

A *parameter ladder* fixes, level by level, the polynomial concentration
exponents that the corrected exploration bonus must respect as estimates are
backed up a depth-``L`` tree: level 0 is the leaf exponent and each parent
level pays ``xi -> (xi + 1) / (eta * (1 - eta))``. From a validated ladder the
module derives one-sided tail bounds, a root estimation-error term, and a
partition-loss term evaluated on the cell counts realized by a Voronoi
search; their sum is the confidence bound reported by the harness.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Any


class InvalidLadderError(ValueError):
    """A ladder level violates the recursion constraints; names the level."""


class InvalidCountsError(ValueError):
    """Realized cell/history counts unusable for the partition term."""


@dataclass(frozen=True)
class ParameterLadder:
    """Concentration exponents per backup level.

    ``xi`` has one entry per level 0..L (leaf to root distance), ``alpha`` one
    entry per level 1..L. ``eta`` is the bonus shape parameter shared by all
    levels and ``beta0`` the leaf tail coefficient.
    """

    eta: float
    xi: tuple[float, ...]
    alpha: tuple[float, ...]
    beta0: float

    def __post_init__(self) -> None:
        if len(self.xi) != len(self.alpha) + 1:
            raise InvalidLadderError(f"need one xi per level 0..L: got {len(self.xi)} xi, {len(self.alpha)} alpha")

    @property
    def horizon(self) -> int:
        return len(self.alpha)

    @property
    def kappa(self) -> float:
        return self.eta * (1.0 - self.eta)

    @property
    def xi0(self) -> float:
        return self.xi[0]

    def xi_at(self, level: int) -> float:
        """xi for backup level 0..L."""
        return self.xi[level]

    def alpha_at(self, level: int) -> float:
        """alpha for backup level 1..L."""
        return self.alpha[level - 1]


def validate_ladder(ladder: ParameterLadder) -> list[dict[str, Any]]:
    """Check every level against the recursion constraints.

    Per level ``l`` in 1..L the exponents must satisfy
    ``kappa * xi_l <= alpha_l < (1 - eta) * xi_l`` and
    ``xi_{l-1} = alpha_l - 1``; additionally ``alpha_1 > 2`` so the root
    estimate has a finite-variance tail. Returns one row per check (used by
    the CLI report) and raises ``InvalidLadderError`` naming the first level
    that fails.
    """
    if not 0.5 <= ladder.eta < 1.0:
        raise InvalidLadderError(f"eta must be in [0.5, 1), got {ladder.eta}")
    if ladder.beta0 <= 1.0:
        raise InvalidLadderError(f"beta0 must be > 1, got {ladder.beta0}")
    if ladder.xi0 <= 1.0:
        raise InvalidLadderError(f"level 0: xi0 must be > 1, got {ladder.xi0}")
    rows: list[dict[str, Any]] = []
    kappa = ladder.kappa
    tol = 1e-9
    for level in range(1, ladder.horizon + 1):
        xi = ladder.xi_at(level)
        alpha = ladder.alpha_at(level)
        scale = max(1.0, abs(alpha))
        lower_ok = alpha >= kappa * xi - tol * scale
        upper_ok = alpha < (1.0 - ladder.eta) * xi
        chain_ok = math.isclose(ladder.xi_at(level - 1), alpha - 1.0, rel_tol=1e-9, abs_tol=1e-9)
        rows.append(
            {
                "level": level,
                "xi": xi,
                "alpha": alpha,
                "lower": kappa * xi,
                "upper": (1.0 - ladder.eta) * xi,
                "lower_ok": lower_ok,
                "upper_ok": upper_ok,
                "chain_ok": chain_ok,
            }
        )
        if not lower_ok:
            raise InvalidLadderError(f"level {level}: alpha={alpha} below kappa*xi={kappa * xi}")
        if not upper_ok:
            raise InvalidLadderError(f"level {level}: alpha={alpha} not below (1-eta)*xi={(1.0 - ladder.eta) * xi}")
        if not chain_ok:
            raise InvalidLadderError(f"level {level}: xi at level {level - 1} must equal alpha-1={alpha - 1.0}")
    if ladder.horizon >= 1 and ladder.alpha_at(1) <= 2.0:
        raise InvalidLadderError(f"level 1: alpha must exceed 2, got {ladder.alpha_at(1)}")
    return rows


def build_ladder(xi0: float, eta: float, horizon: int, beta0: float = 2.0) -> ParameterLadder:
    """Closed-form ladder: ``xi_{l+1} = (xi_l + 1) / (eta (1 - eta))`` with
    ``alpha_{l+1} = xi_l + 1``, then validated level by level."""
    if horizon < 1:
        raise InvalidLadderError(f"horizon must be >= 1, got {horizon}")
    kappa = eta * (1.0 - eta)
    if kappa <= 0.0:
        raise InvalidLadderError(f"eta={eta} gives nonpositive kappa")
    xi = [float(xi0)]
    alpha = []
    for _ in range(horizon):
        alpha.append(xi[-1] + 1.0)
        xi.append((xi[-1] + 1.0) / kappa)
    ladder = ParameterLadder(eta=float(eta), xi=tuple(xi), alpha=tuple(alpha), beta0=float(beta0))
    validate_ladder(ladder)
    return ladder


def ladder_eta_preservation(ladder: ParameterLadder, tol: float = 1e-9) -> bool:
    """True when every level's implied shape parameter
    ``alpha_{l} / (xi_{l} * (1 - eta))`` equals ``eta`` (so the same bonus
    shape works at every depth)."""
    for level in range(1, ladder.horizon + 1):
        implied = ladder.alpha_at(level) / (ladder.xi_at(level) * (1.0 - ladder.eta))
        if not math.isclose(implied, ladder.eta, rel_tol=tol, abs_tol=tol):
            return False
    return True


def tail_bound(ladder: ParameterLadder, n: int, z: float) -> float:
    """One-sided bound on ``P(+/- (estimate - target) * n^(1-eta) >= z)``:
    ``min(1, beta0 * z^(-xi0))``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if z < 1.0:
        raise ValueError(f"tail threshold must be >= 1, got {z}")
    return min(1.0, ladder.beta0 * z ** (-ladder.xi0))


def estimation_term(n: int, ladder: ParameterLadder, delta1: float) -> float:
    """Root estimation error holding with probability ``1 - delta1``:
    ``n^-(1-eta) * (2 beta0 / delta1)^(1/xi0)``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < delta1 < 1.0:
        raise ValueError(f"delta1 must be in (0, 1), got {delta1}")
    return n ** (-(1.0 - ladder.eta)) * (2.0 * ladder.beta0 / delta1) ** (1.0 / ladder.xi0)


@dataclass(frozen=True)
class CertificateInputs:
    """Everything the combined bound needs besides the ladder.

    ``m_list`` holds the realized per-(history, action) cell counts the
    partition term should be evaluated on, ``h_l_size`` the number of
    depth-``horizon`` histories the union bound ranges over. ``cover_c`` and
    ``cover_k`` are the covering constants of the observation space
    (scale and dimension), ``radius_cap`` the worst-case cell radius.
    ``l_v``/``l_psi``/``alpha_h``/``beta_h`` are the value- and
    belief-continuity constants.
    """

    n: int
    delta: float
    delta1: float
    delta2: float
    gamma: float
    horizon: int
    l_v: float = 1.0
    l_psi: float = 1.0
    alpha_h: float = 1.0
    beta_h: float = 1.0
    cover_c: float = 20.0
    cover_k: float = 1.0
    radius_cap: float = 1.0
    m_list: tuple[int, ...] = ()
    h_l_size: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        for name in ("delta", "delta1", "delta2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if abs(self.delta1 + self.delta2 - self.delta) > 1e-12:
            raise ValueError(f"delta1 + delta2 must equal delta ({self.delta1} + {self.delta2} != {self.delta})")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        for name in ("l_v", "l_psi", "alpha_h", "beta_h", "cover_c", "cover_k", "radius_cap"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.cover_k == 0.0 or self.beta_h == 0.0:
            raise ValueError("cover_k and beta_h must be positive")


def partition_term(inputs: CertificateInputs) -> float:
    """Discounted partition-loss term.

    For each realized cell count ``m`` the covering-radius proxy is
    ``min(radius_cap, cover_c * (log(m * h_l_size / delta2) / m)^(1/cover_k))``;
    the largest proxy, raised to ``alpha_h * beta_h`` and scaled by the
    discounted depth weight and continuity constants, bounds the value lost to
    lumping observations into cells.
    """
    if not inputs.m_list:
        raise InvalidCountsError("m_list must contain at least one realized cell count")
    if inputs.h_l_size < 1:
        raise InvalidCountsError(f"h_l_size must be >= 1, got {inputs.h_l_size}")
    g = inputs.gamma
    if g == 1.0:
        depth_weight = float(inputs.horizon)
    else:
        depth_weight = g * (1.0 - g**inputs.horizon) / (1.0 - g)
    worst = 0.0
    for m in inputs.m_list:
        if m < 1:
            raise InvalidCountsError(f"cell counts must be >= 1, got {m}")
        arg = m * inputs.h_l_size / inputs.delta2
        if arg <= 1.0:
            raise InvalidCountsError(f"log argument m*h_l/delta2 = {arg} must exceed 1")
        proxy = min(inputs.radius_cap, inputs.cover_c * (math.log(arg) / m) ** (1.0 / inputs.cover_k))
        worst = max(worst, proxy ** (inputs.alpha_h * inputs.beta_h))
    return depth_weight * inputs.l_v * inputs.l_psi**inputs.beta_h * worst


@dataclass(frozen=True)
class Certificate:
    """Combined bound: with probability ``1 - delta`` the root estimate is
    within ``bound`` of the optimal depth-``horizon`` value."""

    bound: float
    estimation: float
    partition: float
    inputs: CertificateInputs
    assumptions: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        d = {
            "bound": self.bound,
            "estimation": self.estimation,
            "partition": self.partition,
            "assumptions": list(self.assumptions),
        }
        for field_name in (
            "n",
            "delta",
            "delta1",
            "delta2",
            "gamma",
            "horizon",
            "l_v",
            "l_psi",
            "alpha_h",
            "beta_h",
            "cover_c",
            "cover_k",
            "radius_cap",
            "h_l_size",
        ):
            d[field_name] = getattr(self.inputs, field_name)
        d["m_list"] = list(self.inputs.m_list)
        return d


def certificate(inputs: CertificateInputs, ladder: ParameterLadder) -> Certificate:
    """Evaluate the full certificate (estimation + partition terms)."""
    validate_ladder(ladder)
    est = estimation_term(inputs.n, ladder, inputs.delta1)
    if inputs.m_list:
        part = partition_term(inputs)
    elif inputs.l_v == 0.0:
        part = 0.0
    else:
        raise InvalidCountsError("m_list is empty but the partition constants are nonzero")
    assumptions = []
    if inputs.l_v == inputs.l_psi == inputs.alpha_h == inputs.beta_h == 1.0:
        assumptions.append("continuity-constants-defaulted-to-1")
    return Certificate(
        bound=est + part,
        estimation=est,
        partition=part,
        inputs=inputs,
        assumptions=tuple(assumptions),
    )
