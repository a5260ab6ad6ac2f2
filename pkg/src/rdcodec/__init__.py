"""Random-codebook / random-database lossy compression workbench."""

from .bitio import BitReader, Bitstream, BitWriter
from .codecs import (
    EncodeReport,
    GvwParams,
    HybParams,
    LlzParams,
    PhraseRecord,
    gvw_decode,
    gvw_encode,
    hyb_decode,
    hyb_encode,
    llz_decode,
    llz_encode,
    llz_description_length,
)
from .matching import MatchResult, NearestResult, longest_match, nearest_window
from .model import DistortionSpec, SourceModel
from .params import (
    GuaranteeConstants,
    complexity_schedule,
    guarantee_constants,
    guaranteed_block_length,
    heuristic_params,
)
from .rd import (
    RdCurve,
    RdPoint,
    binary_entropy,
    d_max,
    distortion_rate,
    rate_distortion,
    rd_curve,
    rd_slope,
)
from .sampling import (
    DEFAULT_SYMBOL_CAP,
    SymbolBlock,
    derived_message_seed,
    generate_database,
    sample_block,
)

__version__ = "0.1.0"

__all__ = [
    "BitReader", "Bitstream", "BitWriter",
    "DistortionSpec", "SourceModel", "SymbolBlock",
    "EncodeReport", "PhraseRecord",
    "GvwParams", "HybParams", "LlzParams",
    "gvw_encode", "gvw_decode", "hyb_encode", "hyb_decode",
    "llz_encode", "llz_decode", "llz_description_length",
    "MatchResult", "NearestResult", "longest_match", "nearest_window",
    "GuaranteeConstants", "guarantee_constants", "guaranteed_block_length",
    "complexity_schedule", "heuristic_params",
    "RdCurve", "RdPoint", "binary_entropy", "d_max", "distortion_rate",
    "rate_distortion", "rd_curve", "rd_slope",
    "DEFAULT_SYMBOL_CAP", "derived_message_seed", "generate_database",
    "sample_block",
    "__version__",
]
