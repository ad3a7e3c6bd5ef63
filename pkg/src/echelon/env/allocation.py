"""Warehouse-to-store allocation with proportional rationing.

When stores jointly ask for more of a product than the warehouse holds, the
available stock is split proportionally to the (capped) requests using the
largest-remainder method.  All arithmetic is exact integer arithmetic, so
the result is reproducible across platforms and never over-allocates.
"""

from __future__ import annotations

import numpy as np


def allocate(
    requests: np.ndarray,      # (N, K) int, store replenishment requests
    caps: np.ndarray,          # (N, K) int, warehouse per-store allocation caps
    warehouse_stock: np.ndarray,  # (K,) int, on-hand at the warehouse
) -> np.ndarray:
    """Return the accepted store replenishment, shape (N, K) int64.

    Per product: requests are first capped per store, then, if their sum
    exceeds warehouse stock, scaled down to integer shares
    ``capped * stock // total`` with the leftover units handed out one each
    in order of decreasing remainder ``capped * stock % total`` (ties go to
    the lower store index).
    """
    requests = np.asarray(requests, dtype=np.int64)
    caps = np.asarray(caps, dtype=np.int64)
    stock = np.asarray(warehouse_stock, dtype=np.int64)
    n, k = requests.shape

    capped = np.minimum(requests, caps)
    out = capped.copy()
    totals = capped.sum(axis=0)
    cols = np.nonzero(totals > stock)[0]
    if cols.size == 0:
        return out

    sub = capped[:, cols]
    total = totals[cols]
    avail = stock[cols]
    shares = sub * avail // total
    remainders = sub * avail % total
    leftover = avail - shares.sum(axis=0)
    # Stable order per column: biggest remainder first, then lowest store
    # index; each column's first `leftover` ranks get one extra unit.
    order = np.argsort(-remainders, axis=0, kind="stable")
    ranks = np.argsort(order, axis=0, kind="stable")
    shares += ranks < leftover
    out[:, cols] = shares
    return out
