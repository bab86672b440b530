"""
Nonlinear WENO weights through one uniform mapping formula.

Every scheme is expressed as a table of three per-substencil terms and a
mapping H applied to the Jiang-Shu weights:

    alpha[s] = psi1[s] + H(omega_js[s], d[s]) * psi2[s] + psi3[s]

The order-preserving variant (``mop-gm`` prefix) swaps whole psi rows
between substencils so that a substencil whose JS weight sits nearest a
larger ideal weight always receives the larger alpha.

Arrays follow the stencil_core convention: leading axis is the substencil
(length 3), trailing axes index interfaces.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd

from src.config import Config
from src.stencil_core import (
    GlobalKind,
    IndicatorFamily,
    SmoothnessSet,
    as_window,
    beta_js,
    beta_za,
    chi_nip,
    eta_shen_zha,
    global_indicator,
)

logger = logging.getLogger(__name__)

IDEAL_WEIGHTS = np.array([0.1, 0.6, 0.3])


class InvalidWeightsError(ValueError):
    """Raised when unnormalized weights cannot be normalized."""


class SchemeError(ValueError):
    """Raised for unknown scheme names and unsupported scheme combinations."""


class WeightFamily(str, Enum):
    JS = "js"
    M = "m"
    ILW = "ilw"
    Z = "z"
    ZETA_TAU5 = "zeta-tau5"
    ZETA_TAU81 = "zeta-tau81"
    ZETA_TAU82 = "zeta-tau82"
    ZPLUS = "zplus"
    ZA = "za"
    D = "d"
    A = "a"
    NIP = "nip"


Z_TYPE = frozenset({
    WeightFamily.Z,
    WeightFamily.ZETA_TAU5,
    WeightFamily.ZETA_TAU81,
    WeightFamily.ZETA_TAU82,
    WeightFamily.ZPLUS,
    WeightFamily.ZA,
    WeightFamily.D,
    WeightFamily.A,
    WeightFamily.NIP,
})

_ZETA_GSI = {
    WeightFamily.ZETA_TAU5: GlobalKind.TAU5_ETA,
    WeightFamily.ZETA_TAU81: GlobalKind.TAU81,
    WeightFamily.ZETA_TAU82: GlobalKind.TAU82,
}

BASE_PREFIX = "weno-"
MOP_PREFIX = "mop-gmweno-"


class HKind(str, Enum):
    IDENTITY = "identity"
    HENRICK = "henrick"


@dataclass(frozen=True)
class SchemeId:
    """A weight family, optionally with the order-preserving row swap."""

    base: WeightFamily
    mop: bool = False

    def __post_init__(self):
        if self.mop and self.base not in Z_TYPE:
            raise SchemeError(
                f"the order-preserving mapping is only defined for Z-type schemes, not weno-{self.base.value}"
            )

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        """Parse ``weno-<family>`` or ``mop-gmweno-<family>``."""
        key = name.strip().lower()
        if key.startswith(MOP_PREFIX):
            mop, family = True, key[len(MOP_PREFIX):]
        elif key.startswith(BASE_PREFIX):
            mop, family = False, key[len(BASE_PREFIX):]
        else:
            raise SchemeError(f"unknown scheme '{name}'; valid schemes: {', '.join(scheme_names())}")
        try:
            base = WeightFamily(family)
        except ValueError:
            raise SchemeError(f"unknown scheme '{name}'; valid schemes: {', '.join(scheme_names())}") from None
        return cls(base, mop)

    @property
    def name(self) -> str:
        return (MOP_PREFIX if self.mop else BASE_PREFIX) + self.base.value

    @property
    def is_z_type(self) -> bool:
        return self.base in Z_TYPE

    def __str__(self):
        return self.name


def scheme_names() -> list:
    """Every valid scheme name, base schemes first."""
    names = [BASE_PREFIX + family.value for family in WeightFamily]
    names += [MOP_PREFIX + family.value for family in WeightFamily if family in Z_TYPE]
    return names


@dataclass(frozen=True)
class SchemeParams:
    epsilon: float = Config.EPSILON
    p: float = Config.P
    theta: float = Config.THETA
    nip_exponent: float = Config.NIP_EXPONENT
    za_gamma1: float = Config.ZA_GAMMA1
    za_gamma2: float = Config.ZA_GAMMA2
    dx: Optional[float] = None
    # Overrides the dx**(2/3) default of WENO-Z+
    zplus_lambda: Optional[float] = None

    def zplus_scale(self) -> float:
        if self.zplus_lambda is not None:
            return self.zplus_lambda
        if self.dx is None or self.dx <= 0:
            raise SchemeError("weno-zplus needs the mesh size dx (lambda = dx**(2/3))")
        return self.dx ** (2.0 / 3.0)


class PsiTable(NamedTuple):
    psi1: np.ndarray
    psi2: np.ndarray
    psi3: np.ndarray
    h_kind: HKind


class WeightResult(NamedTuple):
    omega: np.ndarray
    omega_js: np.ndarray
    alpha: np.ndarray


def _ideal(shape, d=IDEAL_WEIGHTS):
    """Ideal weights broadcast against a (3, ...) array shape."""
    d = np.asarray(d, dtype=float)
    return d.reshape((3,) + (1,) * (len(shape) - 1))


def weights_js(beta, epsilon: float = Config.EPSILON, d=IDEAL_WEIGHTS):
    """Jiang-Shu weights alpha = d / (eps + beta)^2; returns (omega, alpha)."""
    b = np.asarray(getattr(beta, "local", beta), dtype=float)
    alpha = _ideal(b.shape, d) / (epsilon + b) ** 2
    return alpha / alpha.sum(axis=0), alpha


def map_henrick(omega, d):
    """
    Henrick mapping fraction (omega - d)^3 / ((omega - d)^2 + omega (1 - omega)).

    Returns the fraction alone; the full mapped weight is d plus this value.
    The 0/0 limits at (0, 0) and (1, 1) evaluate to 0.
    """
    omega = np.asarray(omega, dtype=float)
    d = np.asarray(d, dtype=float)
    shift = omega - d
    denominator = shift ** 2 + omega * (1.0 - omega)
    zero = denominator == 0.0
    if np.any(zero):
        logger.debug("Henrick map evaluated at its 0/0 limit for %d weight(s)", int(np.count_nonzero(zero)))
    value = np.where(zero, 0.0, shift ** 3 / np.where(zero, 1.0, denominator))
    return value if value.ndim else float(value)


def apply_h(h_kind: HKind, omega_js, d):
    if h_kind is HKind.HENRICK:
        return map_henrick(omega_js, d)
    return omega_js


def _decompose(scheme: SchemeId, w, beta, alpha_js, params: SchemeParams) -> PsiTable:
    """Psi rows for a window whose JS indicators and weights are already known."""
    eps = params.epsilon
    shape = beta.shape
    d = np.broadcast_to(_ideal(shape), shape)
    zeros = np.zeros(shape)
    base = scheme.base

    if base is WeightFamily.JS:
        return PsiTable(zeros, np.ones(shape), zeros, HKind.IDENTITY)
    if base is WeightFamily.M:
        return PsiTable(d, np.ones(shape), zeros, HKind.HENRICK)
    if base is WeightFamily.ILW:
        return PsiTable(d, zeros, zeros, HKind.IDENTITY)

    total = alpha_js.sum(axis=0)
    beta_eps = beta + eps
    psi1, psi3 = d, zeros

    if base is WeightFamily.Z:
        tau5 = global_indicator(GlobalKind.TAU5_JS, w, _js_set(beta)).value
        psi2 = total * tau5 ** params.p * beta_eps ** (2.0 - params.p)
    elif base in _ZETA_GSI:
        eta = eta_shen_zha(w)
        tau = global_indicator(_ZETA_GSI[base], w, eta, eps).value
        psi2 = total * beta_eps ** 2 / (eta.local + eps) ** 2 * tau ** 2
    elif base is WeightFamily.ZPLUS:
        tau5 = global_indicator(GlobalKind.TAU5_JS, w, _js_set(beta)).value
        psi2 = total * (tau5 + eps) ** 2
        psi3 = d * params.zplus_scale() * beta_eps / (tau5 + eps)
    elif base is WeightFamily.ZA:
        za = beta_za(w, params.za_gamma1, params.za_gamma2)
        tau6 = global_indicator(GlobalKind.TAU6_ZA, w, za, eps, gamma1=params.za_gamma1, gamma2=params.za_gamma2).value
        amp = global_indicator(GlobalKind.A_ZA, w, za, eps, gamma1=params.za_gamma1, gamma2=params.za_gamma2).value
        psi2 = total * beta_eps ** 2 / (za.local + eps) * amp * tau6
    elif base in (WeightFamily.D, WeightFamily.A):
        js = _js_set(beta)
        tau5 = global_indicator(GlobalKind.TAU5_JS, w, js).value
        phi = global_indicator(GlobalKind.PHI_D, w, js).value
        psi2 = total * phi * tau5 ** params.p * beta_eps ** (2.0 - params.p)
        if base is WeightFamily.A:
            linear = (phi * (tau5 / beta_eps) ** params.p <= 1.0).astype(float)
            psi1 = d * linear
            psi2 = psi2 * (1.0 - linear)
    elif base is WeightFamily.NIP:
        chi = chi_nip(w, params.theta)
        tau = global_indicator(GlobalKind.TAU_NIP, w, nip_exponent=params.nip_exponent).value
        psi2 = total * tau * beta_eps ** 2 / (chi.local + eps) ** 2
    else:
        raise SchemeError(f"no weight decomposition for {scheme.name}")

    return PsiTable(
        np.broadcast_to(psi1, shape),
        np.broadcast_to(psi2, shape),
        np.broadcast_to(psi3, shape),
        HKind.IDENTITY,
    )


def _js_set(beta) -> SmoothnessSet:
    return SmoothnessSet(beta, IndicatorFamily.BETA_JS)


def psi_decomposition(scheme: SchemeId, w, params: SchemeParams = SchemeParams()) -> PsiTable:
    """Numeric psi table of ``scheme`` for one window (or a batch of windows)."""
    w = as_window(w)
    beta = beta_js(w).local
    _, alpha_js = weights_js(beta, params.epsilon)
    return _decompose(scheme, w, beta, alpha_js, params)


def uniform_alpha(omega_js, psi: PsiTable, d) -> np.ndarray:
    """alpha = psi1 + H(omega_js, d) * psi2 + psi3."""
    return psi.psi1 + apply_h(psi.h_kind, omega_js, d) * psi.psi2 + psi.psi3


def raw_alpha(scheme: SchemeId, w, params: SchemeParams = SchemeParams()) -> np.ndarray:
    """Unnormalized weights of the base scheme (no row swap)."""
    w = as_window(w)
    beta = beta_js(w).local
    omega_js, alpha_js = weights_js(beta, params.epsilon)
    psi = _decompose(scheme, w, beta, alpha_js, params)
    return uniform_alpha(omega_js, psi, _ideal(beta.shape))


def nearest_ideal(omega, d=IDEAL_WEIGHTS):
    """
    Index of the ideal weight nearest to ``omega``.

    Scans d in its original order and moves only on strict improvement, so
    an exact tie goes to the earlier index (0.45 maps to index 1, not 2).
    """
    omega = np.asarray(omega, dtype=float)
    d = np.asarray(d, dtype=float)
    best = np.zeros(omega.shape, dtype=np.intp)
    best_distance = np.abs(omega - d[0])
    for j in range(1, d.size):
        distance = np.abs(omega - d[j])
        closer = distance < best_distance
        best = np.where(closer, j, best)
        best_distance = np.where(closer, distance, best_distance)
    return best if best.ndim else int(best)


def order_by_cell(alpha, cell) -> np.ndarray:
    """
    Rearrange the values of ``alpha`` over the substencils so that a
    substencil in a higher cell always holds a larger value.

    Substencils sharing a cell keep their relative order. An ``alpha`` that
    already follows the cell order is returned unchanged.
    """
    alpha = np.asarray(alpha, dtype=float)
    cell = np.asarray(cell)
    ranked = np.take_along_axis(alpha, np.argsort(alpha, axis=0, kind="stable"), axis=0)
    position = np.zeros(alpha.shape, dtype=np.intp)
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            before = (cell[b] < cell[a]) | ((cell[b] == cell[a]) & ((alpha[b] < alpha[a]) | ((alpha[b] == alpha[a]) & (b < a))))
            position[a] += before
    reordered = np.take_along_axis(ranked, position, axis=0)
    return np.where(np.all(np.isfinite(alpha), axis=0), reordered, alpha)


def mop_transform(omega_js, psi: PsiTable, d=IDEAL_WEIGHTS) -> np.ndarray:
    """
    Order-preserving alpha: substencil s takes the whole psi row of the
    substencil whose ideal weight is nearest to omega_js[s].

    Rows whose psi2/psi3 carry substencil-local indicator factors can still
    come out of the swap out of cell order; those values are then rearranged
    with ``order_by_cell``. Row-uniform tables (Z with p = 2) never need it.

    When every omega_js[s] is nearest to its own d[s] and the scheme's own
    alpha already follows the cell order, the result equals
    ``uniform_alpha`` bit for bit.
    """
    omega_js = np.asarray(omega_js, dtype=float)
    d = np.asarray(d, dtype=float)
    target = np.asarray(nearest_ideal(omega_js, d))
    swapped = PsiTable(
        np.take_along_axis(np.asarray(psi.psi1), target, axis=0),
        np.take_along_axis(np.asarray(psi.psi2), target, axis=0),
        np.take_along_axis(np.asarray(psi.psi3), target, axis=0),
        psi.h_kind,
    )
    alpha = uniform_alpha(omega_js, swapped, d[target])
    cell = np.argsort(np.argsort(d))[target]
    reordered = order_by_cell(alpha, cell)
    if logger.isEnabledFor(logging.DEBUG):
        moved = np.count_nonzero(np.any(reordered != alpha, axis=0))
        if moved:
            logger.debug("Order-preserving rearrangement applied at %d interface(s)", moved)
    return reordered


def normalize(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    total = alpha.sum(axis=0)
    bad = ~np.isfinite(total) | (total <= 0.0)
    if np.any(bad):
        where = np.argwhere(np.atleast_1d(bad))
        raise InvalidWeightsError(
            f"unnormalizable weights at {len(where)} interface(s), first at index {where[0].tolist()}: "
            f"sum = {np.atleast_1d(total)[tuple(where[0])]!r}"
        )
    return alpha / total


def nonlinear_weights(scheme: SchemeId, w, params: SchemeParams = SchemeParams()) -> WeightResult:
    """Final normalized weights of any scheme, plus the JS weights and raw alpha."""
    w = as_window(w)
    beta = beta_js(w).local
    omega_js, alpha_js = weights_js(beta, params.epsilon)
    psi = _decompose(scheme, w, beta, alpha_js, params)
    if scheme.mop:
        alpha = mop_transform(omega_js, psi)
    else:
        alpha = uniform_alpha(omega_js, psi, _ideal(beta.shape))
    return WeightResult(normalize(alpha), omega_js, alpha)


def _pair_failures(omega_js, alpha, d=IDEAL_WEIGHTS) -> np.ndarray:
    """Per interface, the number of order-preserving pair checks that fail."""
    omega_js = np.asarray(omega_js, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    rank = np.argsort(np.argsort(np.asarray(d, dtype=float)))
    cell = rank[np.asarray(nearest_ideal(omega_js, d))]
    failures = np.zeros(omega_js.shape[1:], dtype=int)
    for a in range(3):
        for b in range(3):
            if a != b:
                failures += (cell[a] > cell[b]) & ~(alpha[a] > alpha[b])
    return failures


def op_violations(omega_js, alpha, d=IDEAL_WEIGHTS) -> int:
    """
    Count ordered substencil pairs (a, b) whose JS weights fall in strictly
    ordered ideal-weight cells while alpha[a] > alpha[b] fails.
    """
    return int(_pair_failures(omega_js, alpha, d).sum())


def imr_sample(scheme: SchemeId, windows, params: SchemeParams = SchemeParams()) -> pd.DataFrame:
    """
    Implicit mapping relation samples: one row per (interface, substencil)
    with the JS weight and the final weight of ``scheme``.
    """
    result = nonlinear_weights(scheme, windows, params)
    omega_js = result.omega_js.reshape(3, -1)
    omega = result.omega.reshape(3, -1)
    return pd.DataFrame({
        "substencil": np.tile(np.arange(3), omega.shape[1]),
        "omega_js": omega_js.T.ravel(),
        "omega_x": omega.T.ravel(),
    })


def imr_summary(scheme: SchemeId, windows, params: SchemeParams = SchemeParams()) -> dict:
    """Sample count and number of interfaces whose mapping is not order preserving."""
    result = nonlinear_weights(scheme, windows, params)
    failures = _pair_failures(result.omega_js.reshape(3, -1), result.alpha.reshape(3, -1))
    return {
        "scheme": scheme.name,
        "samples": int(result.omega_js.size),
        "non_op_points": int(np.count_nonzero(failures)),
    }
