"""Google matrix spectra, fractal Weyl scaling and cluster-growing dimension
of directed networks, with a C procedure-call network extractor."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DataError,
    EmptyGraphError,
    FormatError,
    LexError,
    NetSpectraError,
    NumericalError,
    ParameterError,
    ParseError,
    SizeError,
)
from .graph import (
    DirectedGraph,
    NodeMap,
    generate_chain,
    generate_cycle,
    generate_grid,
    generate_preferential,
    invert_links,
    load_edge_list,
    read_graph,
    to_undirected,
    write_graph,
)
from .gmatrix import GoogleOperator, PageRankVector, apply, build_operator, order_by_pagerank, pagerank
from .spectral import SpectrumResult, arnoldi_spectrum, dense_spectrum, residual
