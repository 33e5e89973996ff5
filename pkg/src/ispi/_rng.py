"""Counter-based random words keyed by (seed, stream domain).

Every consumer addresses the Philox stream by block index, so any value is a
pure function of its seed and ordinal and can be regenerated out of order.
"""

import numpy as np

DOMAIN_PATTERN = 1
DOMAIN_DETECTOR = 2
DOMAIN_FLICKER = 3

_U53 = 1.0 / 9007199254740992.0  # 2**-53


def philox_words(seed, domain, start_block, n_blocks):
    """Return an (n_blocks, 4) uint64 array of Philox output.

    Row ``i`` depends only on ``(seed, domain, start_block + i)``.
    """
    if n_blocks < 0 or start_block < 0:
        raise ValueError("block indices must be non-negative")
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, domain], dtype=np.uint64)
    counter = np.array([int(start_block), 0, 0, 0], dtype=np.uint64)
    bitgen = np.random.Philox(key=key, counter=counter)
    return bitgen.random_raw(4 * n_blocks).reshape(n_blocks, 4)


def to_unit(words, open_low=False):
    """Map uint64 words to doubles in [0, 1), or (0, 1) if ``open_low``."""
    top = (words >> np.uint64(11)).astype(np.float64)
    if open_low:
        return (top + 0.5) * _U53
    return top * _U53
