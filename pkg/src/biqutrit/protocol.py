"""Nine-setting coincidence protocol: forward simulation and linear inversion.

Each setting puts a quarter-wave plate (angle ``chi``) and a polarizer
(angle ``beta``) in both arms of a Brown-Twiss interferometer; angles are in
degrees from vertical. Arm 1 always carries ``(chi1, beta1)``.

Rows 8 and 9 of the commonly printed table do not agree with the operator
algebra. The forms used here were derived with the Fock-space oracle::

    row 8:  (A + B + 4C - 2 Im E + 2 sqrt2 (Re D - Im D + Re F - Im F)) / 16
    row 9:  (A + B - 2 Re E) / 16

The printed versions are kept in ``PRINTED_FORMS`` for comparison.
"""

from dataclasses import dataclass

import numpy as np

from . import fock, jones
from .moments import (
    QUOTIENT_GUARD,
    PURITY_THRESHOLD,
    CoherencyMatrix,
    MixedStateError,
    NormalizationError,
    QutritState,
    check_constraints,
    e_from_quotient,
    encode_matrix,
    extract_pure,
    rho_matrix_from_k4,
)

SQRT2 = np.sqrt(2.0)
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementSetting:
    chi1: float
    beta1: float
    chi2: float
    beta2: float
    label: int = None

    @property
    def angles(self):
        return (self.chi1, self.beta1, self.chi2, self.beta2)

    def covectors(self):
        d = np.deg2rad
        return (jones.arm_covector(d(self.chi1), d(self.beta1)),
                jones.arm_covector(d(self.chi2), d(self.beta2)))

    def swapped(self):
        return MeasurementSetting(self.chi2, self.beta2, self.chi1, self.beta1, self.label)


_TABLE1 = (
    (0, 90, 0, 90),
    (0, 90, 0, 0),
    (0, 0, 0, 0),
    (45, 0, 0, 0),
    (45, -45, 0, 0),
    (45, -45, 0, 90),
    (45, 0, 0, 90),
    (-45, 22.5, -45, 22.5),
    (45, 45, 45, -45),
)


def table1_settings():
    return [MeasurementSetting(*map(float, row), label=i) for i, row in enumerate(_TABLE1, 1)]


def _row8(k):
    cross = k.D.real - k.D.imag + k.F.real - k.F.imag
    return (k.A + k.B + 4 * k.C - 2 * k.E.imag + 2 * SQRT2 * cross) / 16


ROW_FORMS = {
    1: lambda k: k.A / 4,
    2: lambda k: k.C / 4,
    3: lambda k: k.B / 4,
    4: lambda k: (k.B + k.C + 2 * k.F.imag) / 8,
    5: lambda k: (k.B + k.C - 2 * k.F.real) / 8,
    6: lambda k: (k.A + k.C - 2 * k.D.real) / 8,
    7: lambda k: (k.A + k.C + 2 * k.D.imag) / 8,
    8: _row8,
    9: lambda k: (k.A + k.B - 2 * k.E.real) / 16,
}

PRINTED_FORMS = dict(ROW_FORMS)
PRINTED_FORMS[8] = lambda k: (k.A + k.C - 2 * k.E.imag) / 16
PRINTED_FORMS[9] = lambda k: (k.A + k.C - 2 * k.E.real) / 16


def protocol_row(setting):
    """Table row number of ``setting`` (either arm order), or None."""
    for i, row in enumerate(_TABLE1, 1):
        for angles in (setting.angles, setting.swapped().angles):
            if np.allclose(angles, row, atol=ANGLE_TOL, rtol=0):
                return i
    return None


def predicted_moment(setting, k, printed=False):
    """Closed-form coincidence rate of a protocol row.

    With ``printed=True`` rows 8 and 9 use the table's literal expressions,
    which disagree with :func:`simulate` for general states.
    """
    row = protocol_row(setting)
    if row is None:
        raise ValueError(f"setting {setting.angles} is not a protocol row; "
                         "use simulate() for arbitrary settings")
    forms = PRINTED_FORMS if printed else ROW_FORMS
    return float(forms[row](k))


@dataclass(frozen=True)
class MomentVector:
    rates: tuple
    counts: tuple = None
    total_per_setting: int = None
    seed: int = None

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if not all(np.isfinite(rates)):
            raise ValueError("rates must be finite")
        object.__setattr__(self, "rates", rates)
        if self.counts is not None:
            object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    def to_dict(self):
        out = {"rates": list(self.rates)}
        if self.counts is not None:
            out["counts"] = list(self.counts)
        if self.total_per_setting is not None:
            out["total_per_setting"] = self.total_per_setting
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data):
        if "rates" not in data:
            raise ValueError("moment JSON needs a 'rates' list")
        return cls(data["rates"], data.get("counts"), data.get("total_per_setting"), data.get("seed"))


def exact_rates(state, settings):
    fs = fock.embed_qutrit(state)
    return [fock.coincidence_rate(fs, *s.covectors()) for s in settings]


def simulate(state, settings=None, mode="exact", total_per_setting=None, seed=None):
    """Coincidence rates for ``settings`` (the nine protocol settings by default).

    ``mode="poisson"`` draws counts ~ Poisson(total_per_setting * rate), one
    independent generator per setting spawned from ``seed``, and returns the
    frequencies ``counts / total_per_setting`` as rates.
    """
    settings = table1_settings() if settings is None else list(settings)
    rates = exact_rates(state, settings)
    if mode == "exact":
        return MomentVector(rates)
    if mode != "poisson":
        raise ValueError(f"unknown simulation mode {mode!r}")
    if total_per_setting is None or total_per_setting <= 0:
        raise ValueError(f"total_per_setting must be positive, got {total_per_setting}")
    children = np.random.SeedSequence(seed).spawn(len(settings))
    counts = [int(np.random.default_rng(ss).poisson(total_per_setting * r))
              for ss, r in zip(children, rates)]
    freqs = [c / total_per_setting for c in counts]
    return MomentVector(freqs, counts, int(total_per_setting), seed)


def project_physical(rho):
    """Closest unit-trace PSD matrix in Frobenius norm.

    Eigenvalues of the Hermitian part are shifted and clipped so they sum to
    one (Smolin, Gambetta & Smith, PRL 108, 070502).
    """
    rho = np.asarray(rho, dtype=complex)
    herm = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    # project the spectrum onto the probability simplex
    mu = evals[::-1]
    cums = np.cumsum(mu)
    ks = np.arange(1, len(mu) + 1)
    valid = mu - (cums - 1) / ks > 0
    last = ks[valid][-1]
    shift = (cums[last - 1] - 1) / last
    new = np.clip(evals - shift, 0, None)
    out = (evecs * new) @ evecs.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass
class ReconstructionResult:
    k4: CoherencyMatrix
    rho_raw: np.ndarray
    rho_physical: np.ndarray
    residuals: object
    scale: float
    e_source: str = "rows"
    pure_extraction: object = None

    def to_dict(self):
        return {
            "k4": self.k4.to_dict(),
            "scale": self.scale,
            "e_source": self.e_source,
            "rho_raw": encode_matrix(self.rho_raw),
            "rho_physical": encode_matrix(self.rho_physical),
            "residuals": self.residuals.to_dict(),
            "pure_extraction": None if self.pure_extraction is None else self.pure_extraction.to_dict(),
        }


class UndeterminedError(ValueError):
    pass


def k4_from_rates(rates, pure=False):
    """Unnormalized K4 from seven or nine rates, plus where E came from."""
    r = np.asarray(rates, dtype=float)
    if len(r) not in (7, 9):
        raise ValueError(f"expected 7 or 9 rates, got {len(r)}")
    if len(r) == 7 and not pure:
        raise ValueError("seven rates only determine a pure state; pass pure=True")
    if np.any(r < 0):
        raise ValueError(f"negative rates at rows {list(np.flatnonzero(r < 0) + 1)}")
    A, C, B = 4 * r[0], 4 * r[1], 4 * r[2]
    F = complex((B + C - 8 * r[4]) / 2, (8 * r[3] - B - C) / 2)
    D = complex((A + C - 8 * r[5]) / 2, (8 * r[6] - A - C) / 2)
    k = CoherencyMatrix(A, B, C, D, 0j, F)
    if len(r) == 9:
        cross = D.real - D.imag + F.real - F.imag
        E = complex((A + B - 16 * r[8]) / 2,
                    (A + B + 4 * C + 2 * SQRT2 * cross - 16 * r[7]) / 2)
        source = "rows"
    if pure:
        # the quotient identity is homogeneous of degree one, so it is safe on raw rates
        e_pure = e_from_quotient(k, guard=QUOTIENT_GUARD * (A + B + 2 * C) ** 2)
        if e_pure is not None:
            E, source = e_pure, "quotient"
        elif len(r) == 7:
            raise UndeterminedError("E is undetermined for this state (|D||F| ~ 0); "
                                    "measure rows 8 and 9")
    return CoherencyMatrix(A, B, C, D, E, F), source


def invert(m, pure=False, purity_threshold=PURITY_THRESHOLD, tol=1e-9):
    """Linear-inversion reconstruction of K4 and rho from protocol rates.

    The rates are rescaled so that A + B + 2C = 2 before inverting; the
    applied factor is returned as ``scale``.
    """
    rates = m.rates if isinstance(m, MomentVector) else m
    raw, source = k4_from_rates(rates, pure=pure)
    norm = raw.A + raw.B + 2 * raw.C
    if norm <= 0:
        raise NormalizationError(norm - 2)
    scale = 2.0 / norm
    k = raw.scaled(scale)
    if abs(k.trace_residual) > tol:
        raise NormalizationError(k.trace_residual)
    rho_raw = rho_matrix_from_k4(k)
    rho_phys = project_physical(rho_raw)
    try:
        extraction = extract_pure(rho_phys, threshold=purity_threshold)
    except MixedStateError:
        extraction = None
    return ReconstructionResult(
        k4=k,
        rho_raw=rho_raw,
        rho_physical=rho_phys,
        residuals=check_constraints(k, pure_hypothesis=pure),
        scale=scale,
        e_source=source,
        pure_extraction=extraction,
    )


def reconstruct(state, **simulate_kwargs):
    """Convenience: simulate the full protocol on ``state`` and invert it."""
    if not isinstance(state, QutritState):
        raise TypeError("reconstruct expects a QutritState")
    return invert(simulate(state, **simulate_kwargs))
