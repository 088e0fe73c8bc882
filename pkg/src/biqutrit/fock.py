"""Brute-force two-mode Fock-space operator algebra.

This is the ground truth used to check every closed-form moment in the
package. Operators are dense matrices on the truncated space spanned by
``|nH, nV>`` with ``nH + nV <= N``; states are density matrices on that space.

Basis order is lexicographic in (total photon number, nH)::

    N = 2:  (0,0) (0,1) (1,0) (0,2) (1,1) (2,0)

where each pair is ``(nH, nV)``.
"""

from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

TOL = 1e-9

# accepted spellings for the four ladder symbols
_SYMBOLS = {
    "a†": ("a", True), "a+": ("a", True), "ad": ("a", True), "a^": ("a", True),
    "b†": ("b", True), "b+": ("b", True), "bd": ("b", True), "b^": ("b", True),
    "a": ("a", False),
    "b": ("b", False),
}

# the defining words of the six coherency-matrix moments
K4_WORDS = {
    "A": ("a†", "a†", "a", "a"),
    "B": ("b†", "b†", "b", "b"),
    "C": ("a†", "b†", "a", "b"),
    "D": ("a†", "a†", "a", "b"),
    "E": ("a†", "a†", "b", "b"),
    "F": ("a†", "b†", "b", "b"),
}


@dataclass(frozen=True)
class FockSpace:
    max_total_photons: int = 2
    basis: tuple = field(init=False)

    def __post_init__(self):
        n = int(self.max_total_photons)
        if n < 2:
            raise ValueError(f"cutoff {n} cannot hold a two-photon qutrit (need >= 2)")
        object.__setattr__(self, "max_total_photons", n)
        pairs = tuple((nh, tot - nh) for tot in range(n + 1) for nh in range(tot + 1))
        object.__setattr__(self, "basis", pairs)

    @property
    def dim(self):
        return len(self.basis)

    def index(self, nh, nv):
        return self.basis.index((nh, nv))

    @cached_property
    def qutrit_indices(self):
        """Positions of |2,0>, |1,1>, |0,2> (qutrit order c1, c2, c3)."""
        return np.array([self.index(2, 0), self.index(1, 1), self.index(0, 2)])

    @cached_property
    def a(self):
        return self._lowering(0)

    @cached_property
    def b(self):
        return self._lowering(1)

    def _lowering(self, mode):
        op = np.zeros((self.dim, self.dim), dtype=complex)
        for col, occ in enumerate(self.basis):
            n = occ[mode]
            if n == 0:
                continue
            lowered = list(occ)
            lowered[mode] -= 1
            op[self.index(*lowered), col] = np.sqrt(n)
        return op

    def operator(self, word):
        """Matrix of a product of ladder symbols, leftmost symbol applied last."""
        mats = []
        for sym in word:
            try:
                mode, dagger = _SYMBOLS[sym]
            except KeyError:
                raise ValueError(f"unknown operator symbol {sym!r}") from None
            m = self.a if mode == "a" else self.b
            mats.append(m.conj().T if dagger else m)
        if not mats:
            return np.eye(self.dim, dtype=complex)
        return reduce(np.matmul, mats)


def build_space(max_total_photons=2):
    return FockSpace(max_total_photons)


@dataclass(frozen=True)
class FockState:
    space: FockSpace
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if rho.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"density shape {rho.shape} does not match space dim {self.space.dim}")
        if not np.allclose(rho, rho.conj().T, atol=TOL, rtol=0):
            raise ValueError("density operator is not Hermitian")
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evals.min() < -TOL:
            raise ValueError(f"density operator has negative eigenvalue {evals.min():.3e}")
        if abs(np.trace(rho).real - 1) > TOL:
            raise ValueError(f"density operator trace {np.trace(rho).real:.12g} != 1")


def embed_qutrit(state, space=None):
    """Place a qutrit on the two-photon sector of ``space``.

    ``state`` may be a ``QutritState``, a length-3 amplitude vector or a
    3x3 density matrix. Amplitudes map as ``c1|2,0> + c2|1,1> + c3|0,2>``.
    """
    space = space or FockSpace(2)
    rho3 = _as_rho3(state)
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    idx = space.qutrit_indices
    rho[np.ix_(idx, idx)] = rho3
    return FockState(space, rho)


def _as_rho3(state):
    rho = getattr(state, "rho", None)
    if rho is not None:
        return np.asarray(rho, dtype=complex)
    arr = np.asarray(state, dtype=complex)
    if arr.shape == (3,):
        norm = np.vdot(arr, arr).real
        if abs(norm - 1) > TOL:
            raise ValueError(f"amplitudes not normalized: sum |c|^2 = {norm:.12g}")
        return np.outer(arr, arr.conj())
    if arr.shape == (3, 3):
        return arr
    raise ValueError(f"cannot interpret object of shape {arr.shape} as a qutrit")


def is_normally_ordered(word):
    seen_annihilator = False
    for sym in word:
        if sym not in _SYMBOLS:
            raise ValueError(f"unknown operator symbol {sym!r}")
        dagger = _SYMBOLS[sym][1]
        if dagger and seen_annihilator:
            return False
        seen_annihilator |= not dagger
    return True


def expect_moment(state, word):
    """Tr(rho * word) for a normally ordered word such as ``("a†", "b†", "a", "b")``."""
    if not is_normally_ordered(word):
        raise ValueError(f"word {' '.join(word)} is not normally ordered")
    return complex(np.trace(state.rho @ state.space.operator(word)))


def mode_operator(space, u, v):
    """The analysed mode ``u*a + v*b``."""
    return u * space.a + v * space.b


def coincidence_rate(state, arm1, arm2):
    """<B1† B2† B1 B2> with ``Bi = ui*a + vi*b``.

    ``arm1`` and ``arm2`` are the detected-mode covectors (see
    :func:`biqutrit.jones.arm_covector`), beam-splitter factor included.
    """
    b1 = mode_operator(state.space, *arm1)
    b2 = mode_operator(state.space, *arm2)
    op = b1.conj().T @ b2.conj().T @ b1 @ b2
    val = np.trace(state.rho @ op)
    if val.real < -TOL:
        raise ArithmeticError(f"negative coincidence rate {val.real:.3e}")
    return float(val.real)


def transformed_moment(state, word, jones):
    """Moment of ``word`` after the mode substitution ``(a, b) -> jones @ (a, b)``."""
    if not is_normally_ordered(word):
        raise ValueError(f"word {' '.join(word)} is not normally ordered")
    sp = state.space
    jones = np.asarray(jones, dtype=complex)
    new = {
        "a": jones[0, 0] * sp.a + jones[0, 1] * sp.b,
        "b": jones[1, 0] * sp.a + jones[1, 1] * sp.b,
    }
    mats = []
    for sym in word:
        mode, dagger = _SYMBOLS[sym]
        mats.append(new[mode].conj().T if dagger else new[mode])
    return complex(np.trace(state.rho @ reduce(np.matmul, mats)))


def k4_moments(state, jones=None):
    """All six K4 moments by brute force, as a dict keyed 'A'..'F'."""
    if jones is None:
        return {k: expect_moment(state, w) for k, w in K4_WORDS.items()}
    return {k: transformed_moment(state, w, jones) for k, w in K4_WORDS.items()}
