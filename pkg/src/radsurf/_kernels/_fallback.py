"""Vectorized numpy implementations of the Monte Carlo counting kernels.

Semantically identical to the compiled core in radsurf._kernels._core; the
compiled version performs the same comparisons with early exit per sample.
Counts are exact integers, so chunking never changes results.  (The two
backends may disagree on a sample sitting within one ulp of a constraint
boundary, since BLAS and the scalar loop order floating-point sums
differently; for continuous samplers this is a probability-zero event.)
"""

import numpy as np


def facet_accept_count(dirs, scales, normals, base, offsets):
    """Count samples y_k = anchor + scales[k] * dirs[k] satisfying every
    constraint  base[j] + scales[k] * <dirs[k], normals[j]> <= offsets[j].
    """
    if normals.shape[0] == 0:
        return int(dirs.shape[0])
    g = dirs @ normals.T
    ok = np.all(base[None, :] + scales[:, None] * g <= offsets[None, :], axis=1)
    return int(np.count_nonzero(ok))


def polytope_shell_counts(pts, normals, offsets, eps):
    """Classify points against the polytope {x : <x, normals[j]> <= offsets[j]}.

    Returns (inside, shell) where shell counts points with maximal
    constraint violation in (0, eps] -- i.e. inside the offset-relaxed
    polytope but outside the polytope itself.
    """
    v = (pts @ normals.T - offsets[None, :]).max(axis=1)
    inside = int(np.count_nonzero(v <= 0.0))
    shell = int(np.count_nonzero((v > 0.0) & (v <= eps)))
    return inside, shell
