import numpy as np

from .errors import ParameterError

# Stream tags keep independent draws apart for a single user seed.
SOURCE = 0
DESCRIPTION = 1
ERASURE = 2

_MAX_SEED = 2**64


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ParameterError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for the sub-stream ``stream`` of ``seed``."""
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(seed: int, *stream: int) -> int:
    """Deterministic 64-bit child seed, e.g. one per Monte Carlo trial."""
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(stream))
    return int(seq.generate_state(1, np.uint64)[0])
