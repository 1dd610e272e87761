"""Discrete-time quantum walks on a 2D lattice in synthetic gauge fields."""

from .disorder import DisorderConfig, DisorderRealization, derive_seed, dress, sample_disorder
from .estimators import GaugeFieldWalk, QuasienergyButterfly, TwoPhotonObservables
from .lattice import LatticeError, LatticeSpec, SiteCoord, edge_mask, is_edge, site_coord, site_index
from .operators import (
    StepOperator,
    apply_step,
    beam_splitter_x,
    beam_splitter_y,
    build_step,
    build_step_nonabelian,
    dense_matrix,
    plaquette_holonomy,
    wilson_loop,
)
from .single_photon import (
    AbsorberModel,
    ObservableSeries,
    PhotonState,
    edge_probability,
    ensemble_run,
    evolve,
    transport_efficiency,
    variance,
)
from .spectrum import QuasienergySpectrum, butterfly_sweep, quasienergies
from .two_photon import (
    TwoPhotonState,
    both_edge_probability,
    correlation_matrix,
    evolve_pair,
    init_pair,
    mean_distance,
)

__version__ = "0.1.0"
