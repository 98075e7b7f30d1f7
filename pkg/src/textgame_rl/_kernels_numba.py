"""Numba @njit build of the hot kernels.

Same contracts and array layouts as _kernels_numpy (see that module for the
masking convention); matmuls go through np.dot, gate math is fused into
explicit loops so each sequence batch is a single nopython call.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def gru_seq_forward(X, lengths, Wzr, Wh, Uzr, Uh, bzr, bh):
    T, B, E = X.shape
    H = Wh.shape[1]
    Hs = np.zeros((T + 1, B, H))
    Z = np.zeros((T, B, H))
    R = np.zeros((T, B, H))
    HB = np.zeros((T, B, H))
    for t in range(T):
        h = Hs[t]
        azr = np.dot(X[t], Wzr) + np.dot(h, Uzr)
        for b in range(B):
            if t < lengths[b]:
                for j in range(H):
                    Z[t, b, j] = 1.0 / (1.0 + np.exp(-(azr[b, j] + bzr[j])))
                    R[t, b, j] = 1.0 / (1.0 + np.exp(-(azr[b, H + j] + bzr[H + j])))
        rh = R[t] * h
        ah = np.dot(X[t], Wh) + np.dot(rh, Uh)
        for b in range(B):
            if t < lengths[b]:
                for j in range(H):
                    hb = np.tanh(ah[b, j] + bh[j])
                    HB[t, b, j] = hb
                    Hs[t + 1, b, j] = (1.0 - Z[t, b, j]) * h[b, j] + Z[t, b, j] * hb
            else:
                for j in range(H):
                    Hs[t + 1, b, j] = h[b, j]
    return Hs, Z, R, HB


@njit(cache=True)
def gru_seq_backward(dhlast, X, Hs, Z, R, HB, Wzr, Wh, Uzr, Uh):
    T, B, E = X.shape
    H = Wh.shape[1]
    dX = np.zeros_like(X)
    dWzr = np.zeros_like(Wzr)
    dWh = np.zeros_like(Wh)
    dUzr = np.zeros_like(Uzr)
    dUh = np.zeros_like(Uh)
    dbzr = np.zeros(2 * H)
    dbh = np.zeros(H)
    dh = dhlast.copy()
    dAzr = np.empty((B, 2 * H))
    for t in range(T - 1, -1, -1):
        z = Z[t]
        r = R[t]
        hb = HB[t]
        h = Hs[t]
        dhb = dh * z
        dhbpre = dhb * (1.0 - hb * hb)
        drh = np.dot(dhbpre, Uh.T)
        for b in range(B):
            for j in range(H):
                dzv = dh[b, j] * (hb[b, j] - h[b, j])
                dAzr[b, j] = dzv * z[b, j] * (1.0 - z[b, j])
                drv = drh[b, j] * h[b, j]
                dAzr[b, H + j] = drv * r[b, j] * (1.0 - r[b, j])
        dWzr += np.dot(X[t].T, dAzr)
        dWh += np.dot(X[t].T, dhbpre)
        dUzr += np.dot(h.T, dAzr)
        dUh += np.dot((r * h).T, dhbpre)
        dbzr += np.sum(dAzr, 0)
        dbh += np.sum(dhbpre, 0)
        dX[t] = np.dot(dAzr, Wzr.T) + np.dot(dhbpre, Wh.T)
        dhg = np.dot(dAzr, Uzr.T)
        for b in range(B):
            for j in range(H):
                dh[b, j] = dh[b, j] * (1.0 - z[b, j]) + dhg[b, j] + drh[b, j] * r[b, j]
    return dX, dWzr, dWh, dUzr, dUh, dbzr, dbh, dh


@njit(cache=True)
def gru_decode_forward(emb, targets, lengths, h0, Wzr, Wh, Uzr, Uh, bzr, bh, P, pb, bos):
    T, B = targets.shape
    E = emb.shape[1]
    H = h0.shape[1]
    V = P.shape[1]
    X = np.zeros((T, B, E))
    for t in range(T):
        for b in range(B):
            tok = bos if t == 0 else targets[t - 1, b]
            for e in range(E):
                X[t, b, e] = emb[tok, e]
    Hs = np.zeros((T + 1, B, H))
    Hs[0] = h0
    Z = np.zeros((T, B, H))
    R = np.zeros((T, B, H))
    HB = np.zeros((T, B, H))
    Probs = np.zeros((T, B, V))
    logp = np.zeros(B)
    for t in range(T):
        h = Hs[t]
        azr = np.dot(X[t], Wzr) + np.dot(h, Uzr)
        for b in range(B):
            if t < lengths[b]:
                for j in range(H):
                    Z[t, b, j] = 1.0 / (1.0 + np.exp(-(azr[b, j] + bzr[j])))
                    R[t, b, j] = 1.0 / (1.0 + np.exp(-(azr[b, H + j] + bzr[H + j])))
        rh = R[t] * h
        ah = np.dot(X[t], Wh) + np.dot(rh, Uh)
        for b in range(B):
            if t < lengths[b]:
                for j in range(H):
                    hb = np.tanh(ah[b, j] + bh[j])
                    HB[t, b, j] = hb
                    Hs[t + 1, b, j] = (1.0 - Z[t, b, j]) * h[b, j] + Z[t, b, j] * hb
            else:
                for j in range(H):
                    Hs[t + 1, b, j] = h[b, j]
        logits = np.dot(Hs[t + 1], P) + pb
        for b in range(B):
            if t < lengths[b]:
                mx = logits[b, 0]
                for v in range(1, V):
                    if logits[b, v] > mx:
                        mx = logits[b, v]
                s = 0.0
                for v in range(V):
                    s += np.exp(logits[b, v] - mx)
                for v in range(V):
                    Probs[t, b, v] = np.exp(logits[b, v] - mx) / s
                logp[b] += logits[b, targets[t, b]] - (mx + np.log(s))
    return logp, X, Hs, Z, R, HB, Probs


@njit(cache=True)
def gru_decode_backward(dlogp, targets, lengths, X, Hs, Z, R, HB, Probs,
                        Wzr, Wh, Uzr, Uh, P, demb, bos):
    T, B = targets.shape
    E = X.shape[2]
    H = Hs.shape[2]
    V = P.shape[1]
    dWzr = np.zeros_like(Wzr)
    dWh = np.zeros_like(Wh)
    dUzr = np.zeros_like(Uzr)
    dUh = np.zeros_like(Uh)
    dbzr = np.zeros(2 * H)
    dbh = np.zeros(H)
    dP = np.zeros_like(P)
    dpb = np.zeros(V)
    dh = np.zeros((B, H))
    dlogits = np.empty((B, V))
    dAzr = np.empty((B, 2 * H))
    dXt = np.empty((B, E))
    for t in range(T - 1, -1, -1):
        for b in range(B):
            if t < lengths[b]:
                g = dlogp[b]
                for v in range(V):
                    dlogits[b, v] = -Probs[t, b, v] * g
                dlogits[b, targets[t, b]] += g
            else:
                for v in range(V):
                    dlogits[b, v] = 0.0
        dP += np.dot(Hs[t + 1].T, dlogits)
        dpb += np.sum(dlogits, 0)
        dh = dh + np.dot(dlogits, P.T)
        z = Z[t]
        r = R[t]
        hb = HB[t]
        h = Hs[t]
        dhb = dh * z
        dhbpre = dhb * (1.0 - hb * hb)
        drh = np.dot(dhbpre, Uh.T)
        for b in range(B):
            for j in range(H):
                dzv = dh[b, j] * (hb[b, j] - h[b, j])
                dAzr[b, j] = dzv * z[b, j] * (1.0 - z[b, j])
                drv = drh[b, j] * h[b, j]
                dAzr[b, H + j] = drv * r[b, j] * (1.0 - r[b, j])
        dWzr += np.dot(X[t].T, dAzr)
        dWh += np.dot(X[t].T, dhbpre)
        dUzr += np.dot(h.T, dAzr)
        dUh += np.dot((r * h).T, dhbpre)
        dbzr += np.sum(dAzr, 0)
        dbh += np.sum(dhbpre, 0)
        dXt[:, :] = np.dot(dAzr, Wzr.T) + np.dot(dhbpre, Wh.T)
        for b in range(B):
            tok = bos if t == 0 else targets[t - 1, b]
            for e in range(E):
                demb[tok, e] += dXt[b, e]
        dhg = np.dot(dAzr, Uzr.T)
        for b in range(B):
            for j in range(H):
                dh[b, j] = dh[b, j] * (1.0 - z[b, j]) + dhg[b, j] + drh[b, j] * r[b, j]
    return dh, dWzr, dWh, dUzr, dUh, dbzr, dbh, dP, dpb


@njit(cache=True)
def embed_backward(ids, dX, demb):
    T, B = ids.shape
    E = dX.shape[2]
    for t in range(T):
        for b in range(B):
            tok = ids[t, b]
            for e in range(E):
                demb[tok, e] += dX[t, b, e]
