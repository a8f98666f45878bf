"""Closed-form code fidelities under correlated dephasing.

All formulas are functions of the single-use damping g (equivalently the
single-use error probability epsilon = (1-g)/2) and of the use-correlation
coefficients mu1 (adjacent uses) and mu2 (next-to-adjacent).  For the
three-qubit phase code transmitted in order Q, A, B the pair correlations
are mu_QA = mu_AB = mu1 and mu_QB = mu2.

``fe_tqc_via_circuit`` re-derives the closed form by running the full
encode / channel / decode pipeline exactly (no sampling); agreement to
machine precision is part of the acceptance suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .channel import apply_channel
from .circuit import (
    JointState,
    entanglement_fidelity,
    prepare_bell_with_ancillas,
    tqc_decode,
    tqc_encode,
)
from .correlation import PhaseCovariance, check_mu_feasible, epsilon_from_g
from .errors import DimensionMismatch, DomainError, FeasibilityWarning

__all__ = [
    "CodePoint",
    "fe_single",
    "fe_tqc_general",
    "fe_tqc_memory",
    "pe_tqc_memory",
    "fe_tqc_approx",
    "pe_two_qubit",
    "mu2_opt",
    "fe_tqc_via_circuit",
]


def _check_g(g: float) -> None:
    if not 0.0 < g <= 1.0:
        raise DomainError(f"damping g must be in (0, 1], got {g}")


@dataclass(frozen=True)
class CodePoint:
    """One operating point (g, mu1, mu2) of a code sweep."""

    g: float
    mu1: float
    mu2: float
    code: str = "tqc"

    @property
    def epsilon(self) -> float:
        return epsilon_from_g(self.g)

    @property
    def feasible(self) -> bool:
        return check_mu_feasible(self.mu1, self.mu2).feasible


def fe_single(g: float) -> float:
    """Entanglement fidelity of one uncoded channel use: (1 + g)/2."""
    _check_g(g)
    return 0.5 * (1.0 + g)


def fe_tqc_general(g: float, mu_qa: float, mu_qb: float, mu_ab: float) -> float:
    """Three-qubit-code fidelity for arbitrary pair correlations.

    1/2 + (3/4) g - (g^3/16) [ g^(2 mu_QA - 2 mu_QB - 2 mu_AB)
                             + g^(-2 mu_QA + 2 mu_QB - 2 mu_AB)
                             + g^(-2 mu_QA - 2 mu_QB + 2 mu_AB)
                             + g^(2 mu_QA + 2 mu_QB + 2 mu_AB) ]
    """
    _check_g(g)
    bracket = (
        g ** (2 * mu_qa - 2 * mu_qb - 2 * mu_ab)
        + g ** (-2 * mu_qa + 2 * mu_qb - 2 * mu_ab)
        + g ** (-2 * mu_qa - 2 * mu_qb + 2 * mu_ab)
        + g ** (2 * mu_qa + 2 * mu_qb + 2 * mu_ab)
    )
    return 0.5 + 0.75 * g - g**3 / 16.0 * bracket


def fe_tqc_memory(g: float, mu1: float, mu2: float) -> float:
    """Three-qubit-code fidelity with stationary use correlations.

    1/2 + (3/4) g - (g^3/16) [2 g^(-2 mu2) + g^(2 mu2 - 4 mu1)
                              + g^(2 mu2 + 4 mu1)]

    Infeasible (mu1, mu2) pairs warn but still evaluate: the formula is a
    well-defined function everywhere.
    """
    _check_g(g)
    verdict = check_mu_feasible(mu1, mu2)
    if not verdict.feasible:
        warnings.warn(
            f"(mu1={mu1}, mu2={mu2}) violates {verdict.violation} "
            f"(band [{verdict.mu2_lower:.6g}, {verdict.mu2_upper:.6g}])",
            FeasibilityWarning,
            stacklevel=2,
        )
    bracket = 2.0 * g ** (-2 * mu2) + g ** (2 * mu2 - 4 * mu1) + g ** (2 * mu2 + 4 * mu1)
    return 0.5 + 0.75 * g - g**3 / 16.0 * bracket


def pe_tqc_memory(g: float, mu1: float, mu2: float) -> float:
    """Code error probability 1 - F of the correlated three-qubit code."""
    return 1.0 - fe_tqc_memory(g, mu1, mu2)


def fe_tqc_approx(epsilon: float, mu1: float, mu2: float) -> float:
    """Small-epsilon expansion: 1 - (3 + 4 mu1^2 + 2 mu2^2) epsilon^2.

    Documented validity range is epsilon <= 0.05; outside it the quadratic
    truncation simply degrades.
    """
    return 1.0 - (3.0 + 4.0 * mu1 * mu1 + 2.0 * mu2 * mu2) * epsilon * epsilon


def pe_two_qubit(g: float, mu1: float) -> float:
    """Error probability of the two-qubit {|01>, |10>} subspace code.

    The logical coherence carries weights (+1, -1), so it decays by
    g^(2 - 2 mu1) and the error probability is (1 - g^(2 - 2 mu1))/2;
    decoherence-free at mu1 = 1.
    """
    _check_g(g)
    return 0.5 * (1.0 - g ** (2.0 * (1.0 - mu1)))


def mu2_opt(g: float, mu1: float) -> float:
    """Location of the error-probability minimum in mu2 at fixed (g, mu1).

    mu2_opt = -0.25 * log_g[ (g^(4 mu1) + g^(-4 mu1)) / 2 ].

    May fall outside the feasible band [max(0, 2 mu1^2 - 1), mu1]; that
    case is reported with a ``FeasibilityWarning`` and the raw value is
    still returned.
    """
    if not 0.0 < g < 1.0:
        raise DomainError(f"log base g must be in (0, 1), got {g}")
    if not 0.0 <= mu1 <= 1.0:
        raise DomainError(f"mu1 must be in [0, 1], got {mu1}")
    value = -0.25 * math.log(0.5 * (g ** (4 * mu1) + g ** (-4 * mu1))) / math.log(g)
    verdict = check_mu_feasible(mu1, value)
    if not verdict.feasible:
        warnings.warn(
            f"mu2_opt={value:.6g} lies outside the feasible band "
            f"[{verdict.mu2_lower:.6g}, {verdict.mu2_upper:.6g}] at mu1={mu1}",
            FeasibilityWarning,
            stacklevel=2,
        )
    return value


def fe_tqc_via_circuit(cov: PhaseCovariance) -> float:
    """Code fidelity from the explicit gate pipeline (exact, no sampling).

    Prepares the purified source, encodes, sends (Q, A, B) through the
    channel in that order, decodes, traces out the ancillas and evaluates
    the overlap with the ideal pair.
    """
    if cov.n_uses != 3:
        raise DimensionMismatch(
            f"three-qubit code needs a 3-use covariance, got {cov.n_uses}"
        )
    state = prepare_bell_with_ancillas()
    state = tqc_encode(state)
    rho = apply_channel(state.rho, cov, (JointState.Q, JointState.A, JointState.B))
    state = tqc_decode(JointState(rho))
    return entanglement_fidelity(state)
