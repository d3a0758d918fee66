"""Compatibility graphs of ideal measurements and quantum contextuality.

A set of ideal measurements can produce contextual correlations exactly
when its compatibility graph is not chordal. The modules cover both
directions: chordality certificates and scenario classification
(``graphs``), global extensions of chordal marginals (``marginals``),
noncontextual polytope membership with witnesses (``polytope``) and
explicit quantum realizations for nonchordal graphs (``quantum``).
"""
from .graphs import CompatibilityGraph, classify, enumerate_scenarios, is_chordal
from .marginals import ContextMarginals, JointDistribution, OutcomeSpace, vorobyev_extend
from .polytope import membership
from .quantum import born_behavior, compatibility_graph, embed_add_vertex, realize_nonchordal
from .seesaw import seesaw_max

__all__ = [
    "CompatibilityGraph",
    "ContextMarginals",
    "JointDistribution",
    "OutcomeSpace",
    "born_behavior",
    "classify",
    "compatibility_graph",
    "embed_add_vertex",
    "enumerate_scenarios",
    "is_chordal",
    "membership",
    "realize_nonchordal",
    "seesaw_max",
    "vorobyev_extend",
]
