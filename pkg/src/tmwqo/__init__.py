"""Tree decompositions, topological minors and the machinery around
well-quasi-ordering graphs with no long Robertson chain."""
__version__ = "0.1.0"

from .graph import Multigraph, graph_from_obj, graph_to_obj, make_graph
from .qorder import FiniteQuasiOrder, chain_order, antichain_order
from .separations import Separation, make_separation
from .treedecomp import RootedDecomposition, decomposition_from_obj, decomposition_to_obj, metrics, validate
from .topominor import March, contains_rc, find_embedding, robertson_chain
from .strips import depth_and_elevation, find_strips
from .refine import refine_driver, signature
from .decorated import DecoratedTree, is_decorated
from .assemblage import QAssemblage, AnchoredDecomposition, encoding_at, simulates

__all__ = [
    "Multigraph", "graph_from_obj", "graph_to_obj", "make_graph",
    "FiniteQuasiOrder", "chain_order", "antichain_order",
    "Separation", "make_separation",
    "RootedDecomposition", "decomposition_from_obj", "decomposition_to_obj", "metrics", "validate",
    "March", "contains_rc", "find_embedding", "robertson_chain",
    "depth_and_elevation", "find_strips",
    "refine_driver", "signature",
    "DecoratedTree", "is_decorated",
    "QAssemblage", "AnchoredDecomposition", "encoding_at", "simulates",
    "__version__",
]
