"""Simulation and linear-inversion tomography of biphoton polarization qutrits."""

from .fock import FockSpace, FockState, build_space, coincidence_rate, embed_qutrit, expect_moment
from .jones import (
    Jones2,
    PlateSpec,
    arm_covector,
    beamsplitter,
    hwp,
    lift_su2,
    polarizer,
    polarizer_vertical,
    qwp,
    waveplate,
)
from .moments import (
    CoherencyMatrix,
    QutritState,
    apply_unitary,
    check_constraints,
    extract_pure,
    fidelity,
    k4_from_rho,
    rho_from_k4,
)
from .protocol import (
    MeasurementSetting,
    MomentVector,
    ReconstructionResult,
    invert,
    predicted_moment,
    project_physical,
    simulate,
    table1_settings,
)
from .experiment import SweepConfig, SweepRecord, emit, prepare, run_sweep

__version__ = "0.1.0"
