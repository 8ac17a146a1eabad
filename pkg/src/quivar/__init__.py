"""Quiver polytopes over exact arithmetic and the deformation invariants of
the associated toric Gorenstein singularities."""

from .quiver import (Arrow, Quiver, Subquiver, FlagData, QuiverStructureError,
                     contract, gamma_dbl, gamma_opp, gamma_perm,
                     is_flag_quiver, is_polystable, is_semistable, is_stable,
                     is_tight, ladder_flag, maximal_polystable,
                     quiver_isomorphic, tighten)
from .polytope import (Degree, Face, FStarLattice, InstanceSizeError,
                       LatticePolytope, classify_small_face, conifold_check,
                       contraction_face, enumerate_polystable, flow_polytope,
                       is_reflexive, quiver_polytope, restrict_to_hyperplane)
from .cohomology import (CochainComplex, build_complex, d_invariant,
                         d2_vanishing_criterion, minkowski_dimension,
                         nontrivial_d1_faces, t_invariant)
from .flagdeform import (SimpleKnot, is_t1_degree, multipaths,
                         obstruction_probe, simple_knots,
                         smoothability_verdict, t1_height0)
from .divisors import (AbelianGroupPresentation, blocking_knots, flag_picard,
                       picard_group, polystable_trees, weil_class_group)
from .quiverfile import QuiverInputError, parse_quiver, serialize_quiver

__version__ = "0.1.0"
