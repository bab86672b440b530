"""
Flux functions, wave speeds and characteristic transforms.

States are arrays whose leading axis is the conserved component; any
trailing axes index cells or interfaces. ``axis`` selects the flux
direction (0 for x, 1 for y).
"""
import logging

import numpy as np

from src.config import Config

logger = logging.getLogger(__name__)


class UnphysicalStateError(ValueError):
    """Raised when a state has non-positive density or pressure."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


def char_project(left, stencil):
    """Apply left eigenvectors (n, n, ...) to a stencil of states (n, k, ...)."""
    return np.einsum("ij...,jk...->ik...", left, stencil)


def char_unproject(right, values):
    """Map characteristic values (n, ...) back to conserved variables."""
    return np.einsum("ij...,j...->i...", right, values)


class LinearAdvection:
    """u_t + u_x = 0 with unit speed."""

    name = "advection"
    ncomp = 1
    ndim = 1
    components = ("u",)
    has_characteristics = False

    def flux(self, U, axis=0):
        return np.array(U, dtype=float, copy=True)

    def max_wavespeed(self, U, axis=0) -> float:
        return float(np.max(np.abs(self.eigenvalues(U, axis))))

    def eigenvalues(self, U, axis=0):
        return np.ones_like(np.asarray(U, dtype=float))

    def check_state(self, U):
        return None


class Euler1D:
    """Ideal-gas Euler equations in (rho, rho u, E)."""

    name = "euler1d"
    ncomp = 3
    ndim = 1
    components = ("rho", "mom", "E")
    has_characteristics = True

    def __init__(self, gamma: float = Config.GAMMA):
        self.gamma = gamma

    def conserved(self, rho, u, p):
        rho, u, p = (np.asarray(v, dtype=float) for v in (rho, u, p))
        return np.stack([rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u ** 2])

    def primitive(self, U):
        """(rho, u, p) with a physical-state check."""
        U = np.asarray(U, dtype=float)
        rho = U[0]
        u = U[1] / rho
        p = (self.gamma - 1.0) * (U[2] - 0.5 * rho * u ** 2)
        _require_physical(rho, p)
        return rho, u, p

    def check_state(self, U):
        self.primitive(U)

    def sound_speed(self, rho, p):
        return np.sqrt(self.gamma * p / rho)

    def flux(self, U, axis=0):
        rho, u, p = self.primitive(U)
        E = np.asarray(U, dtype=float)[2]
        return np.stack([rho * u, rho * u ** 2 + p, u * (E + p)])

    def max_wavespeed(self, U, axis=0) -> float:
        rho, u, p = self.primitive(U)
        return float(np.max(np.abs(u) + self.sound_speed(rho, p)))

    def eigenvalues(self, U, axis=0):
        rho, u, p = self.primitive(U)
        c = self.sound_speed(rho, p)
        return np.stack([u - c, u, u + c])

    def eigenvectors(self, U, axis=0):
        """Left and right eigenvectors of the flux Jacobian, each (3, 3, ...)."""
        rho, u, p = self.primitive(U)
        E = np.asarray(U, dtype=float)[2]
        c = self.sound_speed(rho, p)
        H = (E + p) / rho
        b1 = (self.gamma - 1.0) / c ** 2
        b2 = 0.5 * b1 * u ** 2
        one = np.ones_like(u)
        zero = np.zeros_like(u)

        right = np.stack([
            np.stack([one, one, one]),
            np.stack([u - c, u, u + c]),
            np.stack([H - u * c, 0.5 * u ** 2, H + u * c]),
        ])
        left = np.stack([
            np.stack([0.5 * (b2 + u / c), -0.5 * (b1 * u + 1.0 / c), 0.5 * b1 + zero]),
            np.stack([1.0 - b2, b1 * u, -b1 + zero]),
            np.stack([0.5 * (b2 - u / c), -0.5 * (b1 * u - 1.0 / c), 0.5 * b1 + zero]),
        ])
        return left, right


# Swaps the two momentum components, relabelling y as x
_AXIS_SWAP = [0, 2, 1, 3]


class Euler2D:
    """Ideal-gas Euler equations in (rho, rho u, rho v, E)."""

    name = "euler2d"
    ncomp = 4
    ndim = 2
    components = ("rho", "momx", "momy", "E")
    has_characteristics = True

    def __init__(self, gamma: float = Config.GAMMA):
        self.gamma = gamma

    def conserved(self, rho, u, v, p):
        rho, u, v, p = (np.asarray(a, dtype=float) for a in (rho, u, v, p))
        return np.stack([rho, rho * u, rho * v, p / (self.gamma - 1.0) + 0.5 * rho * (u ** 2 + v ** 2)])

    def primitive(self, U):
        U = np.asarray(U, dtype=float)
        rho = U[0]
        u = U[1] / rho
        v = U[2] / rho
        p = (self.gamma - 1.0) * (U[3] - 0.5 * rho * (u ** 2 + v ** 2))
        _require_physical(rho, p)
        return rho, u, v, p

    def check_state(self, U):
        self.primitive(U)

    def sound_speed(self, rho, p):
        return np.sqrt(self.gamma * p / rho)

    def flux(self, U, axis=0):
        if axis == 1:
            U = np.asarray(U, dtype=float)[_AXIS_SWAP]
            return self.flux(U, axis=0)[_AXIS_SWAP]
        rho, u, v, p = self.primitive(U)
        E = np.asarray(U, dtype=float)[3]
        return np.stack([rho * u, rho * u ** 2 + p, rho * u * v, u * (E + p)])

    def max_wavespeed(self, U, axis=0) -> float:
        rho, u, v, p = self.primitive(U)
        normal = v if axis == 1 else u
        return float(np.max(np.abs(normal) + self.sound_speed(rho, p)))

    def eigenvalues(self, U, axis=0):
        rho, u, v, p = self.primitive(U)
        normal = v if axis == 1 else u
        c = self.sound_speed(rho, p)
        return np.stack([normal - c, normal, normal, normal + c])

    def eigenvectors(self, U, axis=0):
        """Left and right eigenvectors (4, 4, ...) for the x or y flux Jacobian."""
        if axis == 1:
            left, right = self.eigenvectors(np.asarray(U, dtype=float)[_AXIS_SWAP], axis=0)
            return left[:, _AXIS_SWAP], right[_AXIS_SWAP]
        rho, u, v, p = self.primitive(U)
        E = np.asarray(U, dtype=float)[3]
        c = self.sound_speed(rho, p)
        H = (E + p) / rho
        q2 = u ** 2 + v ** 2
        b1 = (self.gamma - 1.0) / c ** 2
        b2 = 0.5 * b1 * q2
        one = np.ones_like(u)
        zero = np.zeros_like(u)

        right = np.stack([
            np.stack([one, one, zero, one]),
            np.stack([u - c, u, zero, u + c]),
            np.stack([v, v, one, v]),
            np.stack([H - u * c, 0.5 * q2, v, H + u * c]),
        ])
        left = np.stack([
            np.stack([0.5 * (b2 + u / c), -0.5 * (b1 * u + 1.0 / c), -0.5 * b1 * v, 0.5 * b1 + zero]),
            np.stack([1.0 - b2, b1 * u, b1 * v, -b1 + zero]),
            np.stack([-v, zero, one, zero]),
            np.stack([0.5 * (b2 - u / c), -0.5 * (b1 * u - 1.0 / c), -0.5 * b1 * v, 0.5 * b1 + zero]),
        ])
        return left, right


def _require_physical(rho, p):
    bad = ~(rho > 0.0) | ~(p > 0.0)
    if np.any(bad):
        index = tuple(int(i) for i in np.argwhere(np.atleast_1d(bad))[0])
        rho_at = np.atleast_1d(rho)[index]
        p_at = np.atleast_1d(p)[index]
        raise UnphysicalStateError(f"unphysical state at index {index}: rho={rho_at!r}, p={p_at!r}", index)


SYSTEMS = {
    LinearAdvection.name: LinearAdvection,
    Euler1D.name: Euler1D,
    Euler2D.name: Euler2D,
}
