"""Universal type-based source codes for generalized complementary delivery networks.

One encoder broadcasts a single codeword; decoder ``j`` already holds some of
the sources and must recover the rest.  Codes are built per joint type by
coloring a graph whose cliques are the sets each decoder must tell apart.
"""

__version__ = "0.1.0"

from .analysis import AnalysisReport, exact_error_prob, error_exponent, fv_length_stats, full_report
from .codec import FF, FV, Codebook, build_codebook, decode_ff, decode_fv, encode_ff, encode_fv
from .errors import (
    ConfigError,
    ConfigurationTooLarge,
    FormatError,
    GCDError,
    InvalidNetwork,
    MalformedBits,
    NoMatchingVertex,
    TypeMismatch,
    VersionMismatch,
    WrongDecoderCount,
)
from .graphcode import admissible_types, color_bipartite, color_greedy, verify_coloring
from .network import NetworkSpec, rf_rate, rv_rate, validate
from .typekit import AlphabetSpec, Distribution, JointType, enumerate_types, type_of

__all__ = [
    "AlphabetSpec",
    "AnalysisReport",
    "Codebook",
    "ConfigError",
    "ConfigurationTooLarge",
    "Distribution",
    "FF",
    "FV",
    "FormatError",
    "GCDError",
    "InvalidNetwork",
    "JointType",
    "MalformedBits",
    "NetworkSpec",
    "NoMatchingVertex",
    "TypeMismatch",
    "VersionMismatch",
    "WrongDecoderCount",
    "admissible_types",
    "build_codebook",
    "color_bipartite",
    "color_greedy",
    "decode_ff",
    "decode_fv",
    "encode_ff",
    "encode_fv",
    "enumerate_types",
    "error_exponent",
    "exact_error_prob",
    "full_report",
    "fv_length_stats",
    "rf_rate",
    "rv_rate",
    "type_of",
    "validate",
    "verify_coloring",
]
