"""
Smoothness indicators for five-point WENO stencils.

Every kernel takes a window array ``w`` whose leading axis holds the five
cell averages ``(u[j-2], u[j-1], u[j], u[j+1], u[j+2])`` of the left-biased
reconstruction at ``x[j+1/2]``. Trailing axes are arbitrary, so one call
evaluates a whole grid of interfaces at once. Local indicators come back with
a leading axis of length 3 (one value per substencil).
"""
import logging
from enum import Enum
from typing import NamedTuple

import numpy as np

from src.config import Config

logger = logging.getLogger(__name__)


class IndicatorFamily(str, Enum):
    """Which local smoothness indicator a SmoothnessSet holds."""

    BETA_JS = "beta_js"
    ETA = "eta"
    BETA_ZA = "beta_za"
    CHI_NIP = "chi_nip"


class GlobalKind(str, Enum):
    TAU5_JS = "tau5_js"
    TAU5_ETA = "tau5_eta"
    TAU6_ETA = "tau6_eta"
    TAU81 = "tau81"
    TAU82 = "tau82"
    TAU6_ZA = "tau6_za"
    A_ZA = "a_za"
    PHI_D = "phi_d"
    TAU_NIP = "tau_nip"


# Local family each global indicator is built from
_REQUIRED_FAMILY = {
    GlobalKind.TAU5_JS: IndicatorFamily.BETA_JS,
    GlobalKind.PHI_D: IndicatorFamily.BETA_JS,
    GlobalKind.TAU5_ETA: IndicatorFamily.ETA,
    GlobalKind.TAU6_ETA: IndicatorFamily.ETA,
    GlobalKind.TAU81: IndicatorFamily.ETA,
    GlobalKind.TAU82: IndicatorFamily.ETA,
    GlobalKind.TAU6_ZA: IndicatorFamily.BETA_ZA,
    GlobalKind.A_ZA: IndicatorFamily.BETA_ZA,
    GlobalKind.TAU_NIP: None,
}


class SmoothnessSet(NamedTuple):
    local: np.ndarray  # shape (3, ...)
    kind: IndicatorFamily


class GlobalIndicator(NamedTuple):
    value: np.ndarray
    kind: GlobalKind


def as_window(values) -> np.ndarray:
    """Coerce input to a float window array with a leading axis of five."""
    w = np.asarray(values, dtype=float)
    if w.shape[0] != 5:
        raise ValueError(f"a stencil window needs exactly 5 cell averages, got {w.shape[0]}")
    return w


def _first_differences(w):
    """One-sided/central first differences of the three substencils (unscaled)."""
    return (
        w[0] - 4.0 * w[1] + 3.0 * w[2],
        w[1] - w[3],
        3.0 * w[2] - 4.0 * w[3] + w[4],
    )


def _second_differences(w):
    return (
        w[0] - 2.0 * w[1] + w[2],
        w[1] - 2.0 * w[2] + w[3],
        w[2] - 2.0 * w[3] + w[4],
    )


def beta_js(w) -> SmoothnessSet:
    """Jiang-Shu indicators: 13/12 (second difference)^2 + 1/4 (first difference)^2."""
    w = as_window(w)
    d1 = _first_differences(w)
    d2 = _second_differences(w)
    local = np.stack([13.0 / 12.0 * d2[s] ** 2 + 0.25 * d1[s] ** 2 for s in range(3)])
    return SmoothnessSet(local, IndicatorFamily.BETA_JS)


def eta_shen_zha(w) -> SmoothnessSet:
    """Shen-Zha indicators: 1/4 (first difference)^2 + (second difference)^2."""
    w = as_window(w)
    d1 = _first_differences(w)
    d2 = _second_differences(w)
    local = np.stack([0.25 * d1[s] ** 2 + d2[s] ** 2 for s in range(3)])
    return SmoothnessSet(local, IndicatorFamily.ETA)


def _za_differences(w):
    u1 = (
        (w[0] - 4.0 * w[1] + 3.0 * w[2]) / 2.0,
        (-w[1] + w[3]) / 2.0,
        (-3.0 * w[2] + 4.0 * w[3] - w[4]) / 2.0,
    )
    return u1, _second_differences(w)


def beta_za(w, gamma1: float = Config.ZA_GAMMA1, gamma2: float = Config.ZA_GAMMA2) -> SmoothnessSet:
    w = as_window(w)
    u1, u2 = _za_differences(w)
    local = np.stack([gamma1 * u1[s] ** 2 + gamma2 * u2[s] ** 2 for s in range(3)])
    return SmoothnessSet(local, IndicatorFamily.BETA_ZA)


def chi_nip(w, theta: float = Config.THETA) -> SmoothnessSet:
    """Absolute-value indicators; homogeneous of degree one in the data."""
    w = as_window(w)
    jump = np.abs(w[3] - w[2])
    local = np.stack([
        theta * np.abs(w[0] - 3.0 * w[1] + 2.0 * w[2]) + np.abs(w[0] - 2.0 * w[1] + w[2]),
        theta * jump + np.abs(w[1] - 2.0 * w[2] + w[3]),
        theta * jump + np.abs(w[2] - 2.0 * w[3] + w[4]),
    ])
    return SmoothnessSet(local, IndicatorFamily.CHI_NIP)


def _eta5(w):
    # The fourth-order first-derivative term has no u[j] contribution.
    first = w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]
    second = w[0] - 16.0 * w[1] + 30.0 * w[2] - 16.0 * w[3] + w[4]
    return (first ** 2 + second ** 2) / 144.0


def _p_terms(w):
    """(|P0'| - |P2'|, P0'' - 2 P1'' + P2'') shared by tau81 and tau82."""
    p0 = 0.5 * w[0] - 2.0 * w[1] + 1.5 * w[2]
    p2 = -1.5 * w[2] + 2.0 * w[3] - 0.5 * w[4]
    d2 = _second_differences(w)
    return np.abs(p0) - np.abs(p2), d2[0] - 2.0 * d2[1] + d2[2]


def fourth_difference(w):
    w = as_window(w)
    return w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4]


def global_indicator(
    kind,
    w,
    local: SmoothnessSet = None,
    epsilon: float = Config.EPSILON,
    dx: float = None,
    nip_exponent: float = Config.NIP_EXPONENT,
    gamma1: float = Config.ZA_GAMMA1,
    gamma2: float = Config.ZA_GAMMA2,
) -> GlobalIndicator:
    """
    Evaluate one global smoothness indicator.

    ``local`` must come from the family the indicator is defined over
    (eta for the Z-eta indicators, beta_za for tau6_za/A, beta_js for
    tau5_js/Phi); tau_nip needs only the window. ``dx`` is accepted for a
    uniform signature; none of the indicators is scaled by the mesh size.
    """
    kind = GlobalKind(kind)
    w = as_window(w)
    required = _REQUIRED_FAMILY[kind]
    if required is not None:
        if local is None:
            local = {
                IndicatorFamily.BETA_JS: beta_js,
                IndicatorFamily.ETA: eta_shen_zha,
                IndicatorFamily.BETA_ZA: lambda x: beta_za(x, gamma1, gamma2),
            }[required](w)
        elif local.kind != required:
            raise ValueError(f"{kind.value} is defined over {required.value}, got {local.kind.value}")
    b = None if local is None else local.local

    if kind in (GlobalKind.TAU5_JS, GlobalKind.TAU5_ETA):
        value = np.abs(b[0] - b[2])
    elif kind is GlobalKind.TAU6_ETA:
        value = np.abs(_eta5(w) - (b[0] + 4.0 * b[1] + b[2]) / 6.0)
    elif kind is GlobalKind.TAU81:
        first, second = _p_terms(w)
        value = np.abs(first * second)
    elif kind is GlobalKind.TAU82:
        first, second = _p_terms(w)
        value = first ** 2 + second ** 2
    elif kind in (GlobalKind.TAU6_ZA, GlobalKind.A_ZA):
        u1, u2 = _za_differences(w)
        tau6 = gamma1 * (np.abs(u1[0]) - np.abs(u1[2])) ** 2 + gamma2 * (np.abs(u2[0]) - np.abs(u2[2])) ** 2
        if kind is GlobalKind.TAU6_ZA:
            value = tau6
        else:
            value = _za_amplification(tau6, b, epsilon)
    elif kind is GlobalKind.PHI_D:
        value = np.minimum(1.0, np.sqrt(np.abs(b[0] - 2.0 * b[1] + b[2])))
    else:
        value = np.abs(fourth_difference(w)) ** nip_exponent
    return GlobalIndicator(np.asarray(value, dtype=float), kind)


def _za_amplification(tau6, b, epsilon):
    """A = tau6 / (b0 + b2 - tau6 + eps), clamped to 0 where the denominator is not positive."""
    denominator = b[0] + b[2] - tau6 + epsilon
    degenerate = denominator <= 0.0
    if np.any(degenerate):
        logger.debug("A_za denominator non-positive at %d interface(s); clamped to 0", int(np.count_nonzero(degenerate)))
    safe = np.where(degenerate, 1.0, denominator)
    return np.where(degenerate, 0.0, tau6 / safe)
