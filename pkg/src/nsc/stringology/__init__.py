"""Keystreams as symbolic strings: exact matching, m-gram statistics and the feature map."""
from .bitstring import as_bits
from .features import (
    DENSITY_BLOCKS,
    MGRAM_LENGTHS,
    SCHEMA_V1,
    SCHEMAS,
    FeatureMatrix,
    FeatureSchema,
    FeatureVector,
    extract_features,
    extract_matrix,
    get_schema,
    read_csv,
    read_nscf,
    write_csv,
    write_nscf,
)
from .matching import bm_search, count_occurrences, kmp_search, naive_search
from .ngrams import (
    CollisionStats,
    NgramHistogram,
    chi_square_uniform,
    chi_square_zscore,
    collision_stats,
    ngram_histogram,
    shannon_entropy,
    window_values,
)
from .positional import SERIAL_LAGS, BlockDensity, block_density, serial_correlation
from .repeats import longest_repeated_substring
