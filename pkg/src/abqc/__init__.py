"""Arbitrable blind quantum computation: protocol simulator and soundness toolkit."""

from .graph import Graph
from .pauli import PauliString, pauli_multiply
from .protocol import (
    AliceStrategy,
    BobStrategy,
    Mode,
    ProtocolParams,
    StateSpec,
    Verdict,
    run_private_mode,
    run_protocol,
)
from .states import DensityState, PureState, make_graph_state
from .tableau import StabilizerTableau, tableau_from_graph

__version__ = "0.1.0"
