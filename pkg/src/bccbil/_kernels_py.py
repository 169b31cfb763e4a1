"""Pure NumPy kernels; same interface and tie rules as ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np

NAME = "python"

# caps the (batch, m, k) temporaries at roughly 32 MB of float64
_CELL_BUDGET = 4_000_000


def evaluate_candidates(us, v, cands, x_out, y_out, obj_out):
    """Run the two argmax steps for every candidate ``C`` in ``cands``.

    ``us`` is U S (m, r), ``v`` is V (n, r), ``cands`` is (b, r, k). Fills
    ``x_out`` (b, m), ``y_out`` (b, n) with labels and ``obj_out`` (b,) with
    ``Tr(X^T U S V^T Y)``.
    """
    b, r, k = cands.shape
    m, n = us.shape[0], v.shape[0]
    step = max(1, _CELL_BUDGET // max(m * k, n * k, 1))
    ks = np.arange(k)
    for lo in range(0, b, step):
        hi = min(lo + step, b)
        c = cands[lo:hi]
        lmat = np.matmul(us[None, :, :], c)
        x = lmat.argmax(axis=2)
        onehot = (x[:, :, None] == ks).astype(np.float64)
        sums = np.matmul(onehot.transpose(0, 2, 1), us[None, :, :])
        rmat = np.matmul(sums, v.T[None, :, :])
        y = rmat.argmax(axis=1)
        x_out[lo:hi] = x
        y_out[lo:hi] = y
        obj_out[lo:hi] = np.take_along_axis(rmat, y[:, None, :], axis=1)[:, 0, :].sum(axis=1)


def iter_rgs(size, k):
    """Restricted growth strings of length ``size`` with values below ``k``, lexicographic."""
    k = min(k, size)
    a = [0] * size
    pmax = [0] * size
    while True:
        yield tuple(a)
        i = size - 1
        while i > 0 and (a[i] >= k - 1 or a[i] > pmax[i - 1]):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        pmax[i] = max(pmax[i - 1], a[i])
        for j in range(i + 1, size):
            a[j] = 0
            pmax[j] = pmax[i]


def exact_max_trace(w, k):
    """Maximize ``Tr(X^T B Y)`` over all partitions of the m + n vertices into <= k blocks.

    Returns ``(best_trace, labels)`` with labels over U then V; ties keep the
    lexicographically first restricted growth string.
    """
    m, n = w.shape
    wf = np.asarray(w, dtype=np.int64)
    best = None
    best_labels = None
    batch = []

    def flush():
        nonlocal best, best_labels
        arr = np.asarray(batch, dtype=np.int64)
        same = arr[:, :m, None] == arr[:, None, m:]
        vals = (same * wf[None]).sum(axis=(1, 2))
        i = int(vals.argmax())
        if best is None or vals[i] > best:
            best = int(vals[i])
            best_labels = arr[i].copy()
        batch.clear()

    for s in iter_rgs(m + n, k):
        batch.append(s)
        if len(batch) == 4096:
            flush()
    if batch:
        flush()
    return best, best_labels
