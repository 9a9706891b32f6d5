"""Numpy reference implementation of the hot kernels.

Semantics match ``_core.pyx``; this module is selected when the
compiled extension is unavailable (or forced via SUBMAX_PURE_PYTHON=1).
Each function is deterministic run-to-run, though last-ulp rounding may
differ from the compiled kernels because numpy reductions are pairwise.

Term-array convention used throughout: a polynomial's nonconstant terms
are flattened into ``coeffs`` (one per term), ``flat`` (concatenated
variable indices) and ``offsets`` (term t occupies
``flat[offsets[t]:offsets[t+1]]``; every stored term has a nonempty
support, constants are carried separately by callers).
"""

import numpy as np

LINK_LOG1P = 0
LINK_QGAIN = 1


def _factors(flat, y, complement):
    f = y[flat]
    return 1.0 - f if complement else f


def poly_value(coeffs, flat, offsets, y, complement):
    """sum_t coeffs[t] * prod_{i in A_t} factor(y_i)."""
    if len(coeffs) == 0:
        return 0.0
    f = _factors(flat, y, complement)
    zero = f == 0.0
    nzf = np.where(zero, 1.0, f)
    prod = np.multiply.reduceat(nzf, offsets[:-1])
    zc = np.add.reduceat(zero.astype(np.int64), offsets[:-1])
    return float(np.dot(coeffs, np.where(zc == 0, prod, 0.0)))


def poly_grad(coeffs, flat, offsets, y, n, complement):
    """Coordinate differences of the multilinear extension.

    Standard basis: +coeff * prod_{j in A, j != i} y_j for i in A.
    Complement basis: -coeff * prod_{j in A, j != i} (1 - y_j).
    """
    out = np.zeros(n, dtype=np.float64)
    if len(coeffs) == 0:
        return out
    f = _factors(flat, y, complement)
    zero = f == 0.0
    nzf = np.where(zero, 1.0, f)
    prod_nz = np.multiply.reduceat(nzf, offsets[:-1])
    zc = np.add.reduceat(zero.astype(np.int64), offsets[:-1])
    term_of = np.repeat(np.arange(len(coeffs)), np.diff(offsets))
    # Leave-one-out products, robust to zero factors.
    loo = np.where(
        zc[term_of] == 0,
        prod_nz[term_of] / nzf,
        np.where((zc[term_of] == 1) & zero, prod_nz[term_of], 0.0),
    )
    contrib = coeffs[term_of] * loo
    if complement:
        contrib = -contrib
    np.add.at(out, flat, contrib)
    return out


def _alive_matrix(coeffs, flat, offsets, X):
    """alive[l, t] = no variable of term t is selected in sample l."""
    sel = X[:, flat].astype(np.float64)
    counts = np.add.reduceat(sel, offsets[:-1], axis=1)
    return counts == 0.0, sel


def component_values(coeffs, flat, offsets, term_comp, comp_const, x):
    """g_c(x) for binary x, one value per component."""
    g = np.array(comp_const, dtype=np.float64, copy=True)
    if len(coeffs) == 0:
        return g
    sel = x[flat] != 0
    counts = np.add.reduceat(sel.astype(np.int64), offsets[:-1])
    np.add.at(g, term_comp, np.where(counts == 0, coeffs, 0.0))
    return g


def samp_mean_diffs(
    coeffs, flat, offsets, term_comp, comp_const, comp_of_var, link_code, X
):
    """Mean over samples of the coordinate-pinned objective differences.

    For each sample row x of X and each variable i, computes
    f([x]_{+i}) - f([x]_{-i}) where f is the linked sum of the
    component polynomials, and averages over rows.
    """
    N, n = X.shape
    C = len(comp_const)
    T = len(coeffs)
    valid = comp_of_var >= 0
    if T == 0 or N == 0:
        return np.zeros(n, dtype=np.float64)

    alive, sel = _alive_matrix(coeffs, flat, offsets, X)
    wa = np.where(alive, coeffs[None, :], 0.0)

    # Alive-sum per component; reduceat over terms grouped by component,
    # padded so empty/trailing components are handled.
    comp_starts = np.searchsorted(term_comp, np.arange(C))
    wa_pad = np.concatenate([wa, np.zeros((N, 1))], axis=1)
    gsum = np.add.reduceat(wa_pad, comp_starts, axis=1)[:, :C]
    tcount = np.bincount(term_comp, minlength=C)
    gsum[:, tcount == 0] = 0.0

    term_of = np.repeat(np.arange(T), np.diff(offsets))
    rows = np.arange(N)[:, None]
    cols = np.broadcast_to(flat, (N, len(flat)))

    # u[l, i]: alive mass killed by pinning i to 1.
    u = np.zeros((N, n), dtype=np.float64)
    np.add.at(u, (rows, cols), wa[:, term_of])

    # w[l, i]: mass revived by pinning i to 0 (terms whose only selected
    # variable is i itself).
    single = np.add.reduceat(sel, offsets[:-1], axis=1) == 1.0
    w = np.zeros((N, n), dtype=np.float64)
    np.add.at(w, (rows, cols), coeffs[term_of] * single[:, term_of] * sel)

    cmap = np.where(valid, comp_of_var, 0)
    gbase = comp_const[cmap][None, :] + gsum[:, cmap]
    gp = gbase - u
    gm = gbase + w
    if link_code == LINK_LOG1P:
        diffs = np.log1p(gp) - np.log1p(gm)
    elif link_code == LINK_QGAIN:
        diffs = gm / (1.0 - gm) - gp / (1.0 - gp)
    else:
        raise ValueError(f"unknown link code {link_code}")
    diffs[:, ~valid] = 0.0
    return diffs.sum(axis=0) / N
