"""Bucket elimination, mini-bucket and belief-propagation decoders for linear block codes."""
from .bench import CodeSpec, DecoderKind, ExperimentConfig, ReportRow, emit_report, run_experiment
from .coding import (
    GeneratorMatrix,
    build_decoding_instance,
    encode,
    hamming_code,
    random_code,
    structured_code,
    transmit,
)
from .elimination import elim_bel, elim_map, elim_mpe
from .errors import BcodeError
from .factors import Factor
from .graph import Ordering, find_ordering, moral_graph
from .ibp import run_ibp
from .kernels import backend
from .minibucket import approx_mpe
from .network import BeliefNetwork, Evidence, Variable, build_network

__version__ = "0.1.0"

__all__ = [
    "BcodeError", "BeliefNetwork", "CodeSpec", "DecoderKind", "Evidence", "ExperimentConfig",
    "Factor", "GeneratorMatrix", "Ordering", "ReportRow", "Variable", "approx_mpe", "backend",
    "build_decoding_instance", "build_network", "elim_bel", "elim_map", "elim_mpe", "emit_report",
    "encode", "find_ordering", "hamming_code", "moral_graph", "random_code", "run_experiment",
    "run_ibp", "structured_code", "transmit",
]
