"""Sequence-matching kernels with a compiled fast path.

The compiled extension is used when it imported cleanly and the
SAYREA_PURE_PYTHON environment variable is unset; otherwise the
pure-Python implementation serves the same contract.
"""

import os
from array import array

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built on this platform
    _ckernels = None

USING_COMPILED = _ckernels is not None and os.environ.get("SAYREA_PURE_PYTHON") != "1"


def _code(tokens, codes):
    out = array("i")
    for tok in tokens:
        code = codes.get(tok)
        if code is None:
            code = len(codes)
            codes[tok] = code
        out.append(code)
    return out


def window_distance(window_tokens, label_seq, compiled=None):
    """Levenshtein distance with free deletion on the window side."""
    use_compiled = USING_COMPILED if compiled is None else (compiled and _ckernels is not None)
    if not use_compiled:
        return _pykernels.window_distance(list(window_tokens), list(label_seq))
    codes = {}
    return _ckernels.window_distance_coded(_code(window_tokens, codes), _code(label_seq, codes))


def batch_min_distance(window_tokens, label_seqs, compiled=None):
    """Smallest window_distance across alternative labeled sequences."""
    return min(window_distance(window_tokens, seq, compiled=compiled) for seq in label_seqs)
