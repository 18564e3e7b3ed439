"""Compiled CART kernels used by the forest module.

A tree is stored as parallel arrays indexed by node id (root is 0):

    feature[i]    split feature, or -1 for a leaf
    threshold[i]  split threshold (go left when value <= threshold)
    left/right[i] child node ids, -1 for leaves
    leaf[i]       class label at a leaf (majority, ties -> 0), else -1
    n_samples[i]  bag rows (with multiplicity) reaching the node
    gain[i]       Gini gain of the node's split, 0.0 at leaves

Split selection: at each impure node exactly ``mtry`` candidate features
are drawn without replacement (a partial Fisher-Yates shuffle consuming
pre-drawn uniforms, so the kernel itself holds no RNG state); candidate
thresholds are midpoints between adjacent distinct sorted values; the
split with the largest Gini gain wins, ties broken by lowest feature
index then lowest threshold. Nodes where no candidate yields positive
gain become leaves.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def grow_tree(X, y, bag, feat_u, mtry, min_node_size):
    """Grow one tree on bootstrap rows ``bag`` of (X, y).

    ``feat_u`` must hold at least (2 * len(bag) + 1) * mtry uniforms in
    [0, 1); feature subsets are consumed from it one split attempt at a
    time.
    """
    n = bag.shape[0]
    p = X.shape[1]
    max_nodes = 2 * n + 1

    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    leaf = np.full(max_nodes, -1, np.int64)
    n_samples = np.zeros(max_nodes, np.int64)
    gain = np.zeros(max_nodes, np.float64)

    idx = bag.copy()
    stack = np.zeros((max_nodes, 3), np.int64)  # (start, end, node id)
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    top = 1
    n_nodes = 1
    attempt = 0

    pool = np.empty(p, np.int64)
    vals = np.empty(n, np.float64)
    scratch = np.empty(n, np.int64)

    while top > 0:
        top -= 1
        s = stack[top, 0]
        e = stack[top, 1]
        node = stack[top, 2]
        m = e - s
        c1 = 0
        for i in range(s, e):
            c1 += y[idx[i]]
        c0 = m - c1
        n_samples[node] = m

        if c0 == 0 or c1 == 0 or m <= min_node_size:
            leaf[node] = 1 if c1 > c0 else 0
            continue

        # draw mtry distinct candidate features, then sort them ascending
        for j in range(p):
            pool[j] = j
        for j in range(mtry):
            r = j + int(feat_u[attempt * mtry + j] * (p - j))
            tmp = pool[j]
            pool[j] = pool[r]
            pool[r] = tmp
        attempt += 1
        for a in range(1, mtry):
            v = pool[a]
            b = a - 1
            while b >= 0 and pool[b] > v:
                pool[b + 1] = pool[b]
                b -= 1
            pool[b + 1] = v

        parent_gini = 1.0 - (c0 * c0 + c1 * c1) / (m * m)
        best_gain = 0.0
        best_feature = -1
        best_threshold = 0.0
        for fi in range(mtry):
            f = pool[fi]
            for i in range(m):
                vals[i] = X[idx[s + i], f]
            order = np.argsort(vals[:m], kind="mergesort")
            left_pos = 0
            for cut in range(m - 1):
                left_pos += y[idx[s + order[cut]]]
                if vals[order[cut]] < vals[order[cut + 1]]:
                    ln = cut + 1
                    rn = m - ln
                    l1 = left_pos
                    l0 = ln - l1
                    r1 = c1 - l1
                    r0 = rn - r1
                    gini_l = 1.0 - (l0 * l0 + l1 * l1) / (ln * ln)
                    gini_r = 1.0 - (r0 * r0 + r1 * r1) / (rn * rn)
                    g = parent_gini - (ln * gini_l + rn * gini_r) / m
                    if g > best_gain:
                        best_gain = g
                        best_feature = f
                        best_threshold = 0.5 * (vals[order[cut]] + vals[order[cut + 1]])

        if best_feature < 0:
            leaf[node] = 1 if c1 > c0 else 0
            continue

        feature[node] = best_feature
        threshold[node] = best_threshold
        gain[node] = best_gain

        nl = 0
        for i in range(s, e):
            if X[idx[i], best_feature] <= best_threshold:
                scratch[nl] = idx[i]
                nl += 1
        nr = nl
        for i in range(s, e):
            if X[idx[i], best_feature] > best_threshold:
                scratch[nr] = idx[i]
                nr += 1
        for i in range(m):
            idx[s + i] = scratch[i]

        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        stack[top, 0] = s
        stack[top, 1] = s + nl
        stack[top, 2] = left_id
        top += 1
        stack[top, 0] = s + nl
        stack[top, 1] = e
        stack[top, 2] = right_id
        top += 1

    return (
        feature[:n_nodes],
        threshold[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        leaf[:n_nodes],
        n_samples[:n_nodes],
        gain[:n_nodes],
    )


@njit(cache=True, nogil=True)
def predict_rows(feature, threshold, left, right, leaf, X):
    """Class label of every row of X under one tree."""
    n = X.shape[0]
    out = np.empty(n, np.int8)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf[node]
    return out
