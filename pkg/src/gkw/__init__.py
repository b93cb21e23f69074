"""Spectral constants and distribution dynamics of the maps x -> {p/x}."""

from .auxfun import aux_g, aux_H, aux_xi, v_image_of_xi
from .evolution import (EvolutionTrace, InterpolationCheck, WirsingProfile,
                        build_Psi, delta, estimate_Theta, evolve_cdf,
                        interpolation_check, montecarlo_cdf)
from .funcspace import (DEFAULT_DEGREE, FuncRep, fit, integrate_function,
                        lobatto_nodes)
from .gauss import (DigitSeq, MapParam, apply_map, digits, from_digits,
                    hurwitz_zeta, kuzmin_rate, kuzmin_rate_bound,
                    stationary_cdf, stationary_density, zeta_tail)
from .operators import (DEFAULT_POLICY, TruncationPolicy,
                        UnderResolvedWarning, apply_evolution_step, apply_gkw,
                        apply_U, apply_V, apply_V_via_U, operator_matrix)
from .spectral import (AuxAnalysis, EigenResult, LEstimate, SandwichResult,
                       SpectrumResult, alpha_root, analyze_aux, aux_functions,
                       bounds, functional_F, functional_L, lambda_by_power,
                       lambda_by_ratio, min_max_ratio, rho, rho_expanded,
                       spectrum_collocation, tau_bound, verify_sandwich)

__version__ = "0.1.0"
