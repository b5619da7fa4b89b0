"""Quantum-Darwinism observables of a qubit dephasing into a disordered spin ring.

Library layers, bottom up: ``basis`` (magnetization sectors), ``operators``
(Heisenberg ring, dephasing coupling), ``spectral`` (diagonalization,
eigenstate targeting, half-chain entanglement), ``dynamics`` (branch
evolution, decoherence factor), ``qinfo`` (fragment mutual information and
redundancy), ``analysis`` (disorder ensembles, crossings, scaling collapse)
and ``cli`` (protocol runner producing CSV tables and JSON manifests).
"""

__version__ = "0.1.0"

from .basis import (
    SectorBasis,
    build_sector_basis,
    default_sector,
    embed_full,
    project_sector,
)
from .operators import (
    DisorderRealization,
    OperatorMatrix,
    build_env_hamiltonian,
    build_hse,
    build_total_hamiltonian,
    draw_fields,
    total_sz,
)
from .spectral import (
    DegenerateSpectrumWidthError,
    DimensionCapError,
    EigenstateSelection,
    SectorSpectrum,
    bipartite_entropy,
    diagonalize,
    halfchain_entropy,
    select_eigenstate,
)
from .dynamics import (
    BranchState,
    DecoherenceResult,
    KrylovConvergenceError,
    decoherence_factor,
    overlap_surrogate_diagnostic,
    expm_krylov,
    propagate_krylov,
    propagate_lambda0,
)
from .qinfo import (
    DegenerateSystemEntropyError,
    DensityMatrix,
    SampleCountError,
    FragmentPolicy,
    RedundancyCurve,
    averaged_mi,
    lack_of_redundancy,
    mutual_information,
    reduced_system_fragment,
    vn_entropy,
)
from .analysis import (
    CrossingEstimate,
    DisorderCurve,
    InsufficientOverlapError,
    NoCrossingError,
    RealizationError,
    PointParams,
    RealizationRecord,
    ScalingCollapse,
    SweepRecord,
    collapse,
    collapse_search,
    curve_from_sweeps,
    derive_seed,
    estimate_crossing,
    run_realization,
    run_sweep,
)
from .config import ConfigError, ExperimentConfig, parse_config, serialize_config
