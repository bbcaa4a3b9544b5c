"""Pure-Python sequence kernels; same contract as the compiled extension."""


def window_distance(window_tokens, label_seq):
    """Edit distance between a sliding window and a labeled sequence where
    deleting a window token costs 0, insertion and substitution cost 1.

    Equals len(label_seq) - LCS(window_tokens, label_seq).
    """
    n = len(label_seq)
    if n == 0:
        return 0
    # dp[j]: cost of matching label_seq[:j] against the window prefix so far
    dp = list(range(n + 1))
    for tok in window_tokens:
        prev_diag = dp[0]
        # deleting a window token is free, so dp[0] stays 0
        for j in range(1, n + 1):
            cur = dp[j]
            if tok == label_seq[j - 1]:
                cand = prev_diag
            else:
                cand = min(prev_diag + 1, dp[j - 1] + 1, cur)
            dp[j] = min(cand, cur)  # cur = skip this window token for free
            prev_diag = cur
    return dp[n]


def batch_min_distance(window_tokens, label_seqs):
    """Smallest window_distance across alternative labeled sequences."""
    return min(window_distance(window_tokens, seq) for seq in label_seqs)
