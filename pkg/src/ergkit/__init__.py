"""Edge-triangle exponential random graphs: scalar free-energy landscape,
exact mean-field laws, Glauber sampling and limit-law checks."""

__version__ = "0.1.0"

from .landscape import (
    ALPHA_C,
    CRITICAL_POINT,
    H_C,
    U_C,
    BracketError,
    CriticalCurve,
    CriticalPoint,
    DomainError,
    Gaussian,
    GeneralizedGaussian,
    Mixture,
    ModelParams,
    Uniqueness,
    classify_phase,
    critical_curve_point,
    find_maximizers,
    free_energy,
    limit_law_clique,
    limit_law_triangle,
    q,
    rate_function,
    trace_critical_curve,
)
from .graph import AdjacencyState, Clique, SubgraphKind, hamiltonian_et, hamiltonian_mf, hom_density, new_state
from .meanfield import EdgeDensityPmf, WindowSpec, build_pmf, conditional_pmf, mixture_mass, riemann_D
from .glauber import ChainConfig, SampleBatch, detailed_balance_check, glauber_step, run_chain, run_chains
from .limitlab import brute_force, concentration_check, ks_distance, moment_report, standardize, tv_distance
