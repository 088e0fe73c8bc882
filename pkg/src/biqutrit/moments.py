"""Qutrit states and the fourth-order coherency matrix K4.

The biphoton qutrit ``c1|2,0> + c2|1,1> + c3|0,2>`` is fully described by six
normally ordered moments::

    A = <a†a† a a>   B = <b†b† b b>   C = <a†b† a b>
    D = <a†a† a b>   E = <a†a† b b>   F = <a†b† b b>

arranged as ``K4 = [[A, D, E], [D*, C, F], [E*, F*, B]]``. The map between
K4 and the density matrix is linear, so everything here works for mixed
states too.
"""

from dataclasses import dataclass, field

import numpy as np

TOL = 1e-9
SQRT2 = np.sqrt(2.0)
QUOTIENT_GUARD = 1e-8
PURITY_THRESHOLD = 1e-6


@dataclass(frozen=True, eq=False)
class QutritState:
    """A qutrit density matrix, optionally remembering its amplitudes.

    Build with :meth:`from_amplitudes` or :meth:`from_rho`; both validate.
    """

    rho: np.ndarray
    amplitudes: np.ndarray = None

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if self.amplitudes is not None:
            amp = np.array(self.amplitudes, dtype=complex)
            amp.setflags(write=False)
            object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_amplitudes(cls, c, tol=TOL):
        c = np.asarray(c, dtype=complex)
        if c.shape != (3,):
            raise ValueError(f"expected three amplitudes, got shape {c.shape}")
        norm = np.vdot(c, c).real
        if abs(norm - 1) > tol:
            raise ValueError(f"amplitudes not normalized: sum |c|^2 = {norm:.12g}")
        return cls(np.outer(c, c.conj()), c)

    @classmethod
    def from_rho(cls, rho, tol=TOL):
        rho = np.asarray(rho, dtype=complex)
        validate_rho(rho, tol)
        return cls(rho)

    @property
    def is_pure_vector(self):
        return self.amplitudes is not None

    def purity(self):
        return float(np.trace(self.rho @ self.rho).real)

    def to_dict(self):
        out = {"rho": encode_matrix(self.rho)}
        if self.amplitudes is not None:
            out["amplitudes"] = encode_vector(self.amplitudes)
        return out

    @classmethod
    def from_dict(cls, data, validate=True):
        """Inverse of :meth:`to_dict`; ``amplitudes`` wins if both are present."""
        if "amplitudes" in data:
            amp = decode_vector(data["amplitudes"])
            if validate:
                return cls.from_amplitudes(amp)
            return cls(np.outer(amp, amp.conj()), amp)
        if "rho" in data:
            rho = decode_matrix(data["rho"])
            if rho.shape != (3, 3):
                raise ValueError(f"rho must be 3x3, got {rho.shape}")
            return cls.from_rho(rho) if validate else cls(rho)
        raise ValueError("state JSON needs an 'amplitudes' or 'rho' entry")


def validate_rho(rho, tol=TOL):
    if rho.shape != (3, 3):
        raise ValueError(f"rho must be 3x3, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise ValueError("rho is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise ValueError(f"rho trace {tr:.12g} != 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -tol:
        raise ValueError(f"rho has negative eigenvalue {lo:.3e}")


@dataclass(frozen=True)
class CoherencyMatrix:
    A: float
    B: float
    C: float
    D: complex = 0j
    E: complex = 0j
    F: complex = 0j

    def __post_init__(self):
        for name in "ABC":
            object.__setattr__(self, name, float(np.real(getattr(self, name))))
        for name in "DEF":
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def matrix(self):
        A, B, C, D, E, F = self.A, self.B, self.C, self.D, self.E, self.F
        return np.array([
            [A, D, E],
            [np.conj(D), C, F],
            [np.conj(E), np.conj(F), B],
        ], dtype=complex)

    @property
    def trace_residual(self):
        return self.A + self.B + 2 * self.C - 2

    def scaled(self, s):
        return CoherencyMatrix(s * self.A, s * self.B, s * self.C, s * self.D, s * self.E, s * self.F)

    def as_dict(self):
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D, "E": self.E, "F": self.F}

    def to_dict(self):
        out = {k: getattr(self, k) for k in "ABC"}
        out.update({k: encode_complex(getattr(self, k)) for k in "DEF"})
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(data["A"], data["B"], data["C"],
                   *(decode_complex(data[k]) for k in "DEF"))


def _rho_of(state):
    if isinstance(state, QutritState):
        return state.rho
    return np.asarray(state, dtype=complex)


def k4_from_rho(state, validate=True):
    rho = _rho_of(state)
    if validate:
        validate_rho(rho)
    return CoherencyMatrix(
        A=2 * rho[0, 0].real,
        B=2 * rho[2, 2].real,
        C=rho[1, 1].real,
        D=SQRT2 * np.conj(rho[0, 1]),
        E=2 * np.conj(rho[0, 2]),
        F=SQRT2 * np.conj(rho[1, 2]),
    )


def rho_matrix_from_k4(k):
    """Raw linear inversion of K4 (no trace or positivity enforcement)."""
    rho = np.empty((3, 3), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2] = k.A / 2, k.C, k.B / 2
    rho[0, 1] = np.conj(k.D) / SQRT2
    rho[0, 2] = np.conj(k.E) / 2
    rho[1, 2] = np.conj(k.F) / SQRT2
    for i, j in ((0, 1), (0, 2), (1, 2)):
        rho[j, i] = np.conj(rho[i, j])
    return rho


class NormalizationError(ValueError):
    def __init__(self, residual):
        super().__init__(f"A + B + 2C - 2 = {residual:.3e} exceeds tolerance")
        self.residual = residual


def rho_from_k4(k, tol=TOL):
    """Density matrix from K4. Positivity is not enforced."""
    if abs(k.trace_residual) > tol:
        raise NormalizationError(k.trace_residual)
    return QutritState(rho_matrix_from_k4(k))


@dataclass
class ConstraintReport:
    normalization: float
    pure_hypothesis: bool
    purity: float = None  # ||rho^2 - rho||_F
    f_identity: float = None  # |F|^2 - BC
    d_identity: float = None  # |D|^2 - C(2 - B - 2C)
    e_quotient: float = None  # |E* - ABC/(DF)|, None when guarded out
    tolerances: dict = field(default_factory=lambda: {
        "normalization": 1e-9, "purity": PURITY_THRESHOLD,
        "identities": 1e-9, "e_quotient": 1e-7,
    })

    @property
    def passed(self):
        tol = self.tolerances
        ok = abs(self.normalization) <= tol["normalization"]
        if self.pure_hypothesis:
            ok &= self.purity <= tol["purity"]
            ok &= abs(self.f_identity) <= tol["identities"]
            ok &= abs(self.d_identity) <= tol["identities"]
            if self.e_quotient is not None:
                ok &= self.e_quotient <= tol["e_quotient"]
        return bool(ok)

    def to_dict(self):
        return {
            "normalization_residual": self.normalization,
            "pure_hypothesis": self.pure_hypothesis,
            "purity_residual": self.purity,
            "f_identity_residual": self.f_identity,
            "d_identity_residual": self.d_identity,
            "e_quotient_residual": self.e_quotient,
            "passed": self.passed,
        }


def e_from_quotient(k, guard=QUOTIENT_GUARD):
    """E implied by purity, ``E* = ABC / (DF)``; None when |D||F| <= guard."""
    if abs(k.D) * abs(k.F) <= guard:
        return None
    return np.conj(k.A * k.B * k.C / (k.D * k.F))


def check_constraints(k, pure_hypothesis=False):
    report = ConstraintReport(normalization=k.trace_residual, pure_hypothesis=pure_hypothesis)
    if pure_hypothesis:
        rho = rho_matrix_from_k4(k)
        report.purity = float(np.linalg.norm(rho @ rho - rho))
        report.f_identity = abs(k.F) ** 2 - k.B * k.C
        report.d_identity = abs(k.D) ** 2 - k.C * (2 - k.B - 2 * k.C)
        e = e_from_quotient(k)
        if e is not None:
            report.e_quotient = float(abs(k.E - e))
    return report


def apply_unitary(state, u, tol=TOL):
    u = np.asarray(u, dtype=complex)
    if u.shape != (3, 3) or not np.allclose(u.conj().T @ u, np.eye(3), atol=tol, rtol=0):
        raise ValueError("apply_unitary needs a 3x3 unitary")
    if state.amplitudes is not None:
        return QutritState.from_amplitudes(u @ state.amplitudes)
    return QutritState(u @ state.rho @ u.conj().T)


@dataclass(frozen=True)
class PureExtraction:
    """Moduli and phases of a pure qutrit.

    ``phases[j]`` is the phase of c_{j+1} relative to basis state
    ``reference`` (1-based). The reference is 2 unless |c2| is negligible, in
    which case the most populated basis state is used and the phase of c2 is
    reported as 0.
    """

    moduli: tuple
    phases: tuple
    reference: int = 2

    @property
    def populations(self):
        return tuple(m * m for m in self.moduli)

    @property
    def phi12(self):
        return _wrap(self.phases[0] - self.phases[1])

    @property
    def phi32(self):
        return _wrap(self.phases[2] - self.phases[1])

    def to_dict(self):
        return {
            "moduli": list(self.moduli),
            "phases": list(self.phases),
            "reference": self.reference,
            "phi12": self.phi12,
            "phi32": self.phi32,
        }


def _wrap(phi):
    """Map to (-pi, pi]."""
    w = -((-phi + np.pi) % (2 * np.pi) - np.pi)
    return float(w) + 0.0  # no negative zero


class MixedStateError(ValueError):
    def __init__(self, residual):
        super().__init__(f"state is not pure: ||rho^2 - rho|| = {residual:.3e}")
        self.residual = residual


def extract_pure(state, threshold=PURITY_THRESHOLD, tol=TOL):
    rho = _rho_of(state)
    residual = float(np.linalg.norm(rho @ rho - rho))
    if residual > threshold:
        raise MixedStateError(residual)
    pops = np.clip(np.diag(rho).real, 0, None)
    moduli = tuple(float(x) for x in np.sqrt(pops))
    ref = 1 if pops[1] >= tol else int(np.argmax(pops))
    phases = []
    for j in range(3):
        if j == ref or pops[j] < tol:
            phases.append(0.0)
        else:
            phases.append(_wrap(np.angle(rho[j, ref])))
    return PureExtraction(moduli, tuple(phases), ref + 1)


def fidelity(rho, sigma):
    """Uhlmann fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2."""
    rho = _rho_of(rho)
    sigma = _rho_of(sigma)
    w, v = np.linalg.eigh(sigma)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(root @ rho @ root)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


def random_pure(rng):
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    return QutritState.from_amplitudes(c / np.linalg.norm(c))


def random_mixed(rng, rank=3):
    g = rng.normal(size=(3, rank)) + 1j * rng.normal(size=(3, rank))
    rho = g @ g.conj().T
    return QutritState.from_rho(rho / np.trace(rho).real)


# JSON helpers: complex numbers as [re, im], matrices row-major

def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(x):
    if isinstance(x, (int, float)):
        return complex(x)
    re, im = x
    return complex(re, im)


def encode_vector(v):
    return [encode_complex(z) for z in v]


def decode_vector(v):
    return np.array([decode_complex(z) for z in v], dtype=complex)


def encode_matrix(m):
    return [encode_vector(row) for row in np.asarray(m)]


def decode_matrix(m):
    return np.array([[decode_complex(z) for z in row] for row in m], dtype=complex)
