"""Exact thermodynamics and series expansions for multi-length hard rods."""
from .errors import (CapExceeded, DivergentSeries, DomainError, HardRodsError,
                     InfiniteAbscissa, InvalidIndex, NotFluid, OverPacked, SchemaError,
                     Unstable, ZeroLengthSpecies)
from .model import (ActivityModel, EnsembleKind, FiniteList, PowerLawExp, Scaled,
                    StretchedExp, TailBound, abscissa, boundary_values, eval_g, load_model,
                    model_from_dict, model_to_dict)
from .regime import (FixedPointSolution, Regime, RegimeKind, classify, legendre_phi,
                     packing_fraction, pressure, rate_function)
from .expansions import (CriterionReport, GradedSeries, MultiIndex, activity_coefficient,
                         degree_partial_sums, exact_criterion, fps_fixed_point_residual,
                         iter_multi_indices, sufficient_criteria, tree_weight_sum,
                         truncated_pressure)
from .virial import (DensityVector, activities_from_densities, corollary2_report, densities,
                     model_from_activities, virial_pressure)
from .finite_volume import (PackingHistogram, PartitionValue, canonical_Z_continuous,
                            packing_distribution, renewal_asymptotics_check, xi_continuous,
                            xi_discrete, xi_discrete_bruteforce)

__version__ = "0.1.0"
