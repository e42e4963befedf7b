"""Numerical toolkit for coherence monotones of quantum channels."""

from . import channel, cli, coherence, linalg, monotones, sdp
from .channel import (FreeSuperOp, QChannel, QState, apply, basis_state,
                      compose, constant_channel, dephasing_channel, from_choi,
                      from_kraus, identity_channel, mix_channels, pure_state,
                      random_channel, random_state, rotation_unitary,
                      superop_apply, tensor, unitary_channel)
from .coherence import (c_r, dephase, is_incoherent, is_mio, rel_entropy,
                        sample_free_channel, von_neumann_entropy)
from .linalg import EigDecomposition, herm_eig, kron, partial_trace, trace_norm
from .monotones import (MonotoneReport, MonotonicityReport, SearchConfig,
                        analyze, c_max, c_max_tensor, c_r_b_lower, c_r_i,
                        diamond_distance, diamond_norm, verify_monotonicity)
from .sdp import (SdpProblem, SdpSolution, complex_to_real_embedding,
                  real_embedding_to_complex, solve)

__all__ = [
    "channel", "cli", "coherence", "linalg", "monotones", "sdp",
    "FreeSuperOp", "QChannel", "QState", "apply", "basis_state", "compose",
    "constant_channel", "dephasing_channel", "from_choi", "from_kraus",
    "identity_channel", "mix_channels", "pure_state", "random_channel",
    "random_state", "rotation_unitary", "superop_apply", "tensor",
    "unitary_channel", "c_r", "dephase", "is_incoherent", "is_mio",
    "rel_entropy", "sample_free_channel", "von_neumann_entropy",
    "EigDecomposition", "herm_eig", "kron", "partial_trace", "trace_norm",
    "MonotoneReport", "MonotonicityReport", "SearchConfig", "analyze",
    "c_max", "c_max_tensor", "c_r_b_lower", "c_r_i", "diamond_distance",
    "diamond_norm", "verify_monotonicity", "SdpProblem", "SdpSolution",
    "complex_to_real_embedding", "real_embedding_to_complex", "solve",
]

__version__ = "0.1.0"
