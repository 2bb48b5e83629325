"""Independent reference routines for right-angled Artin groups.

Equality of group elements is decided by projections: a word is trivial
iff its exponent sums vanish and, for every pair of non-commuting
generators, the subword on those two generators freely reduces to the
empty word.  Nothing here calls the library's normal forms.
"""
from collections import deque
from itertools import combinations


def _free_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def projection_key(preset, letters):
    n = preset.rank
    sums = [0] * n
    for x in letters:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    pairs = []
    for s, t in combinations(range(n), 2):
        if t in preset.adj[s]:
            continue
        sub = [x for x in letters if abs(x) - 1 in (s, t)]
        pairs.append(_free_reduce(sub))
    return tuple(sums), tuple(pairs)


def cayley_ball(preset, radius):
    """BFS over words, identifying vertices by projection key.

    Returns (dist, word) dicts keyed by projection key.
    """
    start = projection_key(preset, ())
    dist = {start: 0}
    word = {start: ()}
    q = deque([start])
    letters = preset.letters()
    while q:
        k = q.popleft()
        if dist[k] == radius:
            continue
        w = word[k]
        for x in letters:
            w2 = w + (x,)
            k2 = projection_key(preset, w2)
            if k2 not in dist:
                dist[k2] = dist[k] + 1
                word[k2] = w2
                q.append(k2)
    return dist, word
