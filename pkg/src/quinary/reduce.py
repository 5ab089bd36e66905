"""Gram-matrix reduction used to keep lattice bases small."""

from __future__ import annotations

import flint

from ._linalg import congruent, transpose


def lll_gram(h) -> tuple[list[list[int]], list[list[int]]]:
    """LLL-reduce a positive-definite Gram matrix exactly.

    Returns (h_red, r) where the columns of r are the new basis in old
    coordinates, so h_red = r^T h r and det r = +-1.
    """
    red, t = flint.fmpz_mat([[int(x) for x in row] for row in h]).lll(
        transform=True, rep="gram", gram="exact")
    # flint returns t with t h t^T = red (rows are the new basis vectors).
    r = transpose([[int(x) for x in row] for row in t.tolist()])
    h_red = [[int(x) for x in row] for row in red.tolist()]
    # Put shorter vectors first; LLL leaves them nearly sorted already.
    order = sorted(range(len(h_red)), key=lambda i: (h_red[i][i], i))
    r = [[row[i] for i in order] for row in r]
    return congruent(h, r), r
