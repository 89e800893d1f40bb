"""Subgroups of free products and amalgamated products of finite groups:
subgroup graphs, exact ranks of intersections, and the extremal pairs that
attain the intersection bound."""

from .automaton import (
    Automaton, Indeterminate, NotFactorFree, brute_force_elements, cayley_automaton,
    check_eq2_bound, core, euler_data, express_in_basis, fold, free_basis, index, intersect,
    is_factor_free, membership, normal_closure_automaton, product_covers_group, subgroup,
)
from .groups import (
    FiniteGroup, GroupError, GroupHom, coefficient, construct_group, cyclic, dihedral,
    direct_product, q_star, quotient, subgroup_order_spectrum,
)
from .words import FreeProduct, free_product

__version__ = "0.1.0"
