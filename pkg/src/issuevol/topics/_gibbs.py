"""Collapsed Gibbs sweep kernel.

Compiled with numba when available; the same source runs as plain Python
otherwise, with identical floating-point results.  Randomness comes in as a
pre-drawn array of uniforms so the kernel itself is deterministic.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


@njit(cache=True, nogil=True)
def gibbs_sweep(words, docs, z, topic_word, doc_topic, topic_totals,
                alpha, beta, uniforms, frozen):
    """Resample every token's topic once, in token order.

    When *frozen* is true the topic-word counts and topic totals are read but
    never updated (held-out inference).
    """
    k = topic_totals.shape[0]
    vbeta = topic_word.shape[1] * beta
    cum = np.empty(k)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        t = z[i]
        doc_topic[d, t] -= 1
        if not frozen:
            topic_word[t, w] -= 1
            topic_totals[t] -= 1
        total = 0.0
        for j in range(k):
            total += (doc_topic[d, j] + alpha) * (topic_word[j, w] + beta) / (topic_totals[j] + vbeta)
            cum[j] = total
        u = uniforms[i] * total
        t = 0
        while t < k - 1 and cum[t] <= u:
            t += 1
        z[i] = t
        doc_topic[d, t] += 1
        if not frozen:
            topic_word[t, w] += 1
            topic_totals[t] += 1
