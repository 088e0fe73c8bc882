"""Jones matrices for the polarization optics and their lift to qutrit space.

Matrices act on the mode pair ``(a, b) = (H, V)``. All angles here are in
radians and measured from the vertical axis, positive counterclockwise
looking into the beam.
"""

from dataclasses import dataclass

import numpy as np

UNITARY_TOL = 1e-9
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PlateSpec:
    delta: float  # optical thickness (retardance / 2)
    alpha: float  # axis angle from vertical

    def __post_init__(self):
        if not (np.isfinite(self.delta) and np.isfinite(self.alpha)):
            raise ValueError("plate parameters must be finite")


@dataclass(frozen=True, eq=False)
class Jones2:
    matrix: np.ndarray
    unitary: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Jones matrix must be 2x2, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, Jones2):
            return Jones2(self.matrix @ other.matrix, self.unitary and other.unitary)
        return self.matrix @ np.asarray(other)

    @property
    def t(self):
        return self.matrix[0, 0]

    @property
    def r(self):
        return self.matrix[0, 1]


def plate_coefficients(delta, alpha):
    t = np.cos(delta) + 1j * np.sin(delta) * np.cos(2 * alpha)
    r = 1j * np.sin(delta) * np.sin(2 * alpha)
    return t, r


def _from_tr(t, r):
    return np.array([[t, r], [-np.conj(r), np.conj(t)]], dtype=complex)


def waveplate(spec):
    t, r = plate_coefficients(spec.delta, spec.alpha)
    return Jones2(_from_tr(t, r), unitary=True)


def qwp(chi):
    return waveplate(PlateSpec(np.pi / 4, chi))


def hwp(theta):
    return waveplate(PlateSpec(np.pi / 2, theta))


def polarizer_vertical():
    return Jones2(np.diag([0.0, 1.0]), unitary=False)


def beamsplitter():
    """One output port of a lossless non-polarizing 50:50 splitter."""
    return Jones2(np.eye(2) / SQRT2, unitary=False)


def rotation(angle):
    """Real frame rotation taking the vertical axis onto ``angle``.

    Its second column is the unit vector ``(sin angle, cos angle)`` in
    (H, V) components.
    """
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def polarizer(beta):
    """Linear polarizer transmitting the direction ``beta`` from vertical."""
    rot = rotation(beta)
    return Jones2(rot @ np.diag([0.0, 1.0]) @ rot.T, unitary=False)


def arm_covector(chi, beta):
    """Coefficients ``(u, v)`` of the detected mode ``u*a + v*b`` for one arm.

    The arm is beam splitter, quarter-wave plate at ``chi`` and a polarizer
    at ``beta``. The detector sees the field component along the polarizer's
    transmission axis, i.e. the bottom row of
    ``G_V . R(-beta) . G_qwp(chi) . G_BS``; ``R(-beta)`` only relabels the
    detector frame and does not change any moment.
    """
    axis = rotation(beta)[:, 1]
    row = axis @ qwp(chi).matrix @ beamsplitter().matrix
    return complex(row[0]), complex(row[1])


def is_unitary(m, tol=UNITARY_TOL):
    m = np.asarray(m)
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0)


def lift_su2(j):
    """3x3 action on (c1, c2, c3) induced by a unitary mode transformation.

    Equals the symmetric square of ``j`` in the basis |2,0>, |1,1>, |0,2>.
    For a wave plate ``[[t, r], [-r*, t*]]`` this is::

        [[ t^2,        sqrt2 t r,      r^2       ],
         [-sqrt2 t r*,  |t|^2-|r|^2,    sqrt2 t* r],
         [ r*^2,       -sqrt2 t* r*,    t*^2      ]]
    """
    m = j.matrix if isinstance(j, Jones2) else np.asarray(j, dtype=complex)
    if isinstance(j, Jones2) and not j.unitary or not is_unitary(m):
        raise ValueError("lift_su2 needs a unitary Jones matrix")
    (p, q), (x, y) = m
    # creation operators transform by the columns of m
    return np.array([
        [p * p, SQRT2 * p * q, q * q],
        [SQRT2 * p * x, p * y + q * x, SQRT2 * q * y],
        [x * x, SQRT2 * x * y, y * y],
    ], dtype=complex)
