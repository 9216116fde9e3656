"""Exact densities of primes p for which a rational point on an elliptic curve
has reduction of order coprime to m, with brute-force oracles and an
empirical prime-sieve check."""
from .arboreal import (ArborealLevelGroup, KummerAssumptions, build_full_arboreal, coset_integrate,
                       direct_integrate, finite_level_density, kummer_constant, w_fiber, w_level)
from .characters import QuadraticFieldData, epsilon_d, fixes_sqrt, jacobi, psi, squarefree_part
from .classmeasure import (ClassMeasureTable, Constraint, brute_force_measure, class_fraction, eps,
                           fix_ratio, fixes, measure_class, measure_class_char, psi_eps, psi_sign)
from .density import (DensityBreakdown, SerreDensityInput, dens_ell_char, dens_ell_maximal, dens_product,
                      dens_serre_composite, dens_truncated_bounds)
from .empirical import (CurveConfig, CurveOverQ, EmpiricalReport, RationalPoint, estimate_density,
                        estimate_density_multiples, load_curve_config, point_order, point_orders)
from .modmat import (EnumerationBoundError, KernelClass, ResidueMatrix, class_det_histogram, det,
                     gl2_order, kernel_class, lift_count, smith_exponents)

__version__ = "0.1.0"
