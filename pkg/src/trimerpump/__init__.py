"""Simulator for adiabatic pumping of spin excitations through trimerized chain arrays."""

__version__ = "0.1.0"

from .lattice import (
    ArrayTopology,
    ChainSpec,
    EdgeCoupling,
    RegionSpec,
    TopologyError,
    bethe_topology,
    build_topology,
    fig1c_topology,
)
from .drive import (
    DisorderRealization,
    DriveParams,
    GapClosingError,
    TrimerCurve,
    onsite_frequency,
    protection_certificate,
    sample_disorder,
    trimer_curve,
    winding_number,
)
from .hamiltonian import (
    DenseSolverRefused,
    HamiltonianSnapshot,
    assemble,
    instantaneous_spectrum,
)
from .evolution import (
    IntegratorConfig,
    IntegratorError,
    Trajectory,
    chain_center_of_mass,
    propagate,
    region_population,
    step,
)
from .invariants import (
    BandTouchingError,
    BlochModel,
    ChernResult,
    bloch_hamiltonian,
    fhs_chern,
    min_gap,
)
