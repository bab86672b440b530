"""Fifth-order WENO interface values from cell averages."""
from typing import NamedTuple

import numpy as np

from src.stencil_core import as_window
from src.weight_engine import SchemeId, SchemeParams, nonlinear_weights


class InterfaceStates(NamedTuple):
    u_minus: np.ndarray
    u_plus: np.ndarray


def substencil_values(w) -> np.ndarray:
    """The three third-order candidate values at x[j+1/2]."""
    w = as_window(w)
    return np.stack([
        (2.0 * w[0] - 7.0 * w[1] + 11.0 * w[2]) / 6.0,
        (-w[1] + 5.0 * w[2] + 2.0 * w[3]) / 6.0,
        (2.0 * w[2] + 5.0 * w[3] - w[4]) / 6.0,
    ])


def reconstruct_minus(w, scheme: SchemeId, params: SchemeParams = SchemeParams()) -> np.ndarray:
    """Left-biased value at x[j+1/2] from cells j-2..j+2."""
    w = as_window(w)
    omega = nonlinear_weights(scheme, w, params).omega
    return np.sum(omega * substencil_values(w), axis=0)


def reconstruct_pair(w6, scheme: SchemeId, params: SchemeParams = SchemeParams()) -> InterfaceStates:
    """
    Both one-sided values at x[j+1/2] from the six cells j-2..j+3.

    The right-biased value is the left-biased formula applied to the window
    mirrored through the interface (cells j+3 down to j-1).
    """
    w6 = np.asarray(w6, dtype=float)
    if w6.shape[0] != 6:
        raise ValueError(f"an interface pair needs 6 cell averages, got {w6.shape[0]}")
    u_minus = reconstruct_minus(w6[0:5], scheme, params)
    u_plus = reconstruct_minus(w6[5:0:-1], scheme, params)
    return InterfaceStates(u_minus, u_plus)
