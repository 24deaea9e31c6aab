"""Independent brute-force reference implementations used as test oracles.

Everything here is written for obviousness, not speed: plain Python
loops, exact rational arithmetic where the library promises exactness,
and no code shared with the package under test.  Tests freeze expected
values against these, never against the library itself.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def oracle_minmax_mean(planes) -> np.ndarray:
    """Head-average then min-max normalize, elementwise with loops."""
    planes = np.asarray(planes, dtype=np.float64)
    n, h, w = planes.shape
    mean = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for k in range(n):
                acc += planes[k, i, j]
            mean[i, j] = acc / n
    lo = mean.min()
    hi = mean.max()
    if hi == lo:
        return np.zeros((h, w))
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            out[i, j] = (mean[i, j] - lo) / (hi - lo)
    return out


def oracle_otsu_bin(values) -> int:
    """Exhaustive 256-split Otsu search with exact rational scoring.

    Returns the lowest bin index maximizing the between-class variance
    w0*w1*(mu0 - mu1)^2 of the quantized histogram; -1 when fewer than
    two bins are occupied.
    """
    values = np.asarray(values, dtype=np.float64)
    hist = [0] * 256
    for v in values.ravel():
        q = int(v * 256)
        if q > 255:
            q = 255
        hist[q] += 1
    if sum(1 for c in hist if c) < 2:
        return -1
    total = sum(hist)
    total_sum = sum(i * c for i, c in enumerate(hist))
    best_bin = -1
    best_score = Fraction(-1)
    w0 = 0
    s0 = 0
    for t in range(256):
        w0 += hist[t]
        s0 += t * hist[t]
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            continue
        s1 = total_sum - s0
        mu0 = Fraction(s0, w0)
        mu1 = Fraction(s1, w1)
        score = Fraction(w0, total) * Fraction(w1, total) * (mu0 - mu1) ** 2
        if score > best_score:
            best_score = score
            best_bin = t
    return best_bin


def oracle_otsu_mask(values) -> np.ndarray:
    """Binarization at the oracle threshold: quantized bin strictly above."""
    values = np.asarray(values, dtype=np.float64)
    t = oracle_otsu_bin(values)
    out = np.zeros(values.shape, dtype=bool)
    if t < 0:
        return out
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            q = int(values[i, j] * 256)
            if q > 255:
                q = 255
            out[i, j] = q > t
    return out


def oracle_frequency(label_maps, min_pixel_fraction: float) -> dict[int, int]:
    """Image-presence counts per category by exhaustive pixel scans."""
    freq: dict[int, int] = {}
    for labels in label_maps:
        labels = np.asarray(labels)
        h, w = labels.shape
        counts: dict[int, int] = {}
        for i in range(h):
            for j in range(w):
                c = int(labels[i, j])
                counts[c] = counts.get(c, 0) + 1
        for c, n in counts.items():
            if n >= 1 and n >= min_pixel_fraction * h * w:
                freq[c] = freq.get(c, 0) + 1
    return freq


def oracle_top_k(categories, freq: dict[int, int], k: int) -> list[int]:
    """Full stable sort by (frequency desc, id asc), then truncate."""
    ranked = sorted(sorted(categories), key=lambda c: -freq[c])
    return ranked[:k]


def oracle_iou_loss(pred, target, eps: float = 1e-6) -> float:
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    inter = 0.0
    sum_p = 0.0
    sum_t = 0.0
    for a, b in zip(p.ravel(), t.ravel()):
        inter += a * b
        sum_p += a
        sum_t += b
    return 1.0 - (inter + eps) / (sum_p + sum_t - inter + eps)


def oracle_mae(pred, gt) -> float:
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=np.float64)
    acc = 0.0
    for a, b in zip(p.ravel(), g.ravel()):
        acc += abs(a - b)
    return acc / p.size


def oracle_fbeta_max(pred, gt, beta2: float = 0.3) -> float:
    """Exhaustive 256-threshold F-measure sweep with per-pixel counting."""
    p = np.asarray(pred, dtype=np.float64).ravel()
    g = np.asarray(gt, dtype=bool).ravel()
    n_pos = int(g.sum())
    best = 0.0
    found_empty = False
    for k in range(256):
        thr = k / 255
        tp = fp = 0
        for pv, gv in zip(p, g):
            if pv > thr:
                if gv:
                    tp += 1
                else:
                    fp += 1
        if n_pos == 0:
            if tp + fp == 0:
                found_empty = True
            continue
        if tp == 0:
            continue
        precision = tp / (tp + fp)
        recall = tp / n_pos
        f = (1 + beta2) * precision * recall / (beta2 * precision + recall)
        if f > best:
            best = f
    if n_pos == 0:
        return 1.0 if found_empty else 0.0
    return best


def oracle_emeasure_max(pred, gt, eps: float = 0.0) -> float:
    """Exhaustive per-threshold, per-pixel enhanced-alignment sweep."""
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=bool).astype(np.float64)
    n = p.size
    n_pos = g.sum()
    best = -1.0
    for k in range(256):
        thr = k / 255
        s = (p > thr).astype(np.float64)
        if n_pos == 0:
            e = 1.0 - s.mean()
        elif n_pos == n:
            e = s.mean()
        else:
            mu_g = g.mean()
            mu_s = s.mean()
            acc = 0.0
            for gv, sv in zip(g.ravel(), s.ravel()):
                xi_g = gv - mu_g
                xi_s = sv - mu_s
                phi = 2 * xi_g * xi_s / (xi_g * xi_g + xi_s * xi_s + eps)
                acc += (1 + phi) ** 2 / 4
            e = acc / n
        if e > best:
            best = e
    return best


def _oracle_round_half_even(numer: int, denom: int) -> int:
    """Nearest integer to numer/denom, halves to even, via integer compares."""
    q, r = divmod(numer, denom)
    if 2 * r > denom:
        return q + 1
    if 2 * r < denom:
        return q
    return q if q % 2 == 0 else q + 1


def _oracle_ssim(x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if all(v == x[0] for v in x) and all(v == y[0] for v in y):
        return 1.0  # both blocks flat: every moment is zero
    n = x.size
    mx = sum(x) / n
    my = sum(y) / n
    d = n - 1 if n > 1 else 1
    sx = sum((v - mx) ** 2 for v in x) / d
    sy = sum((v - my) ** 2 for v in y) / d
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y)) / d
    alpha = 4 * mx * my * sxy
    beta = (mx * mx + my * my) * (sx + sy)
    if beta != 0:
        return alpha / beta
    return 1.0 if alpha == 0 else 0.0


def _oracle_object_part(values, lam: float) -> float:
    values = np.asarray(values, dtype=np.float64).ravel()
    x = sum(values) / values.size
    var = sum((v - x) ** 2 for v in values) / values.size
    sigma = var ** 0.5
    return 2 * x / (x * x + 1 + 2 * lam * sigma)


def oracle_smeasure(pred, gt, alpha: float = 0.5, lam: float = 1.0) -> float:
    """Straight-line structure measure, organized differently from the
    library: explicit coordinate maths, alpha*obj + (1-alpha)*reg form,
    per-block weights as float fractions."""
    p = np.asarray(pred, dtype=np.float64)
    g = np.asarray(gt, dtype=bool)
    h, w = g.shape
    n_fg = int(g.sum())
    if n_fg == 0:
        return 1.0 - float(p.mean())
    if n_fg == h * w:
        return float(p.mean())

    o_fg = _oracle_object_part(p[g], lam)
    o_bg = _oracle_object_part(1.0 - p[~g], lam)
    mu = n_fg / (h * w)
    obj = mu * o_fg + (1 - mu) * o_bg

    sum_r = 0
    sum_c = 0
    for i in range(h):
        for j in range(w):
            if g[i, j]:
                sum_r += i + 1
                sum_c += j + 1
    cy = _oracle_round_half_even(sum_r, n_fg)
    cx = _oracle_round_half_even(sum_c, n_fg)

    reg = 0.0
    for r0, r1, c0, c1 in (
        (0, cy, 0, cx),
        (0, cy, cx, w),
        (cy, h, 0, cx),
        (cy, h, cx, w),
    ):
        area = (r1 - r0) * (c1 - c0)
        if area == 0:
            continue
        q = _oracle_ssim(p[r0:r1, c0:c1], g[r0:r1, c0:c1].astype(np.float64))
        reg += (area / (h * w)) * q

    s = alpha * obj + (1 - alpha) * reg
    return min(1.0, max(0.0, s))
