"""Pure-numpy reference build of the hot kernels.

Array layout is time-major: token sequences come in as (T, B, ...) blocks so
each time slice is contiguous.  Rows whose sequence has ended (t >= length)
keep their hidden state and get zeroed gate caches; the zeroed caches make the
backward pass flow straight through those rows without explicit masks.

GRU gate weights arrive pre-stacked: Wzr (E, 2H) holds the update|reset input
weights, Uzr (H, 2H) the recurrent ones, Wh/Uh the candidate weights.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru_seq_forward(X, lengths, Wzr, Wh, Uzr, Uh, bzr, bh):
    """Run a batch of padded sequences through a GRU from h0 = 0.

    Returns (Hs, Z, R, HB): hidden states (T+1, B, H) and gate caches
    (T, B, H) for the backward pass.  Final states sit in Hs[T].
    """
    T, B, _ = X.shape
    H = Wh.shape[1]
    Hs = np.zeros((T + 1, B, H))
    Z = np.zeros((T, B, H))
    R = np.zeros((T, B, H))
    HB = np.zeros((T, B, H))
    for t in range(T):
        h = Hs[t]
        azr = X[t] @ Wzr + h @ Uzr + bzr
        z = _sigmoid(azr[:, :H])
        r = _sigmoid(azr[:, H:])
        hb = np.tanh(X[t] @ Wh + (r * h) @ Uh + bh)
        hn = (1.0 - z) * h + z * hb
        m = (t < lengths)[:, None]
        Hs[t + 1] = np.where(m, hn, h)
        Z[t] = np.where(m, z, 0.0)
        R[t] = np.where(m, r, 0.0)
        HB[t] = np.where(m, hb, 0.0)
    return Hs, Z, R, HB


def gru_seq_backward(dhlast, X, Hs, Z, R, HB, Wzr, Wh, Uzr, Uh):
    """Backprop dhlast through a recorded gru_seq_forward.

    Returns (dX, dWzr, dWh, dUzr, dUh, dbzr, dbh, dh0).
    """
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
    for t in range(T - 1, -1, -1):
        z = Z[t]
        r = R[t]
        hb = HB[t]
        h = Hs[t]
        dz = dh * (hb - h)
        dhb = dh * z
        dhpass = dh * (1.0 - z)
        dhbpre = dhb * (1.0 - hb * hb)
        dzpre = dz * z * (1.0 - z)
        drh = dhbpre @ Uh.T
        dr = drh * h
        drpre = dr * r * (1.0 - r)
        dAzr = np.concatenate((dzpre, drpre), axis=1)
        dWzr += X[t].T @ dAzr
        dWh += X[t].T @ dhbpre
        dUzr += h.T @ dAzr
        dUh += (r * h).T @ dhbpre
        dbzr += dAzr.sum(axis=0)
        dbh += dhbpre.sum(axis=0)
        dX[t] = dAzr @ Wzr.T + dhbpre @ Wh.T
        dh = dhpass + dAzr @ Uzr.T + drh * r
    return dX, dWzr, dWh, dUzr, dUh, dbzr, dbh, dh


def gru_decode_forward(emb, targets, lengths, h0, Wzr, Wh, Uzr, Uh, bzr, bh, P, pb, bos):
    """Teacher-forced GRU decoding: per-row sum of target-token log-probs.

    targets is (T, B) token ids; step t consumes the embedding of
    targets[t-1] (bos at t = 0) and scores targets[t].  Returns
    (logp, X, Hs, Z, R, HB, Probs) where Probs caches the softmax rows.
    """
    T, B = targets.shape
    E = emb.shape[1]
    H = h0.shape[1]
    V = P.shape[1]
    inputs = np.empty((T, B), dtype=np.int64)
    inputs[0] = bos
    if T > 1:
        inputs[1:] = targets[:-1]
    X = emb[inputs]
    Hs = np.zeros((T + 1, B, H))
    Hs[0] = h0
    Z = np.zeros((T, B, H))
    R = np.zeros((T, B, H))
    HB = np.zeros((T, B, H))
    Probs = np.zeros((T, B, V))
    logp = np.zeros(B)
    rows = np.arange(B)
    for t in range(T):
        h = Hs[t]
        azr = X[t] @ Wzr + h @ Uzr + bzr
        z = _sigmoid(azr[:, :H])
        r = _sigmoid(azr[:, H:])
        hb = np.tanh(X[t] @ Wh + (r * h) @ Uh + bh)
        hn = (1.0 - z) * h + z * hb
        active = t < lengths
        m = active[:, None]
        Hs[t + 1] = np.where(m, hn, h)
        Z[t] = np.where(m, z, 0.0)
        R[t] = np.where(m, r, 0.0)
        HB[t] = np.where(m, hb, 0.0)
        logits = Hs[t + 1] @ P + pb
        mx = logits.max(axis=1)
        ex = np.exp(logits - mx[:, None])
        s = ex.sum(axis=1)
        Probs[t][active] = (ex / s[:, None])[active]
        lp = logits[rows, targets[t]] - (mx + np.log(s))
        logp += np.where(active, lp, 0.0)
    return logp, X, Hs, Z, R, HB, Probs


def gru_decode_backward(dlogp, targets, lengths, X, Hs, Z, R, HB, Probs,
                        Wzr, Wh, Uzr, Uh, P, demb, bos):
    """Backprop per-row log-prob grads through a recorded decode.

    Accumulates embedding grads into demb in place; returns
    (dh0, dWzr, dWh, dUzr, dUh, dbzr, dbh, dP, dpb).
    """
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
    dX = np.zeros_like(X)
    dh = np.zeros((B, H))
    rows = np.arange(B)
    for t in range(T - 1, -1, -1):
        active = t < lengths
        dlogits = -Probs[t] * dlogp[:, None]
        dlogits[rows, targets[t]] += np.where(active, dlogp, 0.0)
        dP += Hs[t + 1].T @ dlogits
        dpb += dlogits.sum(axis=0)
        dh = dh + dlogits @ P.T
        z = Z[t]
        r = R[t]
        hb = HB[t]
        h = Hs[t]
        dz = dh * (hb - h)
        dhb = dh * z
        dhpass = dh * (1.0 - z)
        dhbpre = dhb * (1.0 - hb * hb)
        dzpre = dz * z * (1.0 - z)
        drh = dhbpre @ Uh.T
        dr = drh * h
        drpre = dr * r * (1.0 - r)
        dAzr = np.concatenate((dzpre, drpre), axis=1)
        dWzr += X[t].T @ dAzr
        dWh += X[t].T @ dhbpre
        dUzr += h.T @ dAzr
        dUh += (r * h).T @ dhbpre
        dbzr += dAzr.sum(axis=0)
        dbh += dhbpre.sum(axis=0)
        dX[t] = dAzr @ Wzr.T + dhbpre @ Wh.T
        dh = dhpass + dAzr @ Uzr.T + drh * r
    inputs = np.empty((T, B), dtype=np.int64)
    inputs[0] = bos
    if T > 1:
        inputs[1:] = targets[:-1]
    np.add.at(demb, inputs.ravel(), dX.reshape(T * B, E))
    return dh, dWzr, dWh, dUzr, dUh, dbzr, dbh, dP, dpb


def embed_backward(ids, dX, demb):
    """Scatter-add (T, B, E) grads onto embedding rows picked by ids (T, B)."""
    T, B = ids.shape
    np.add.at(demb, ids.ravel(), dX.reshape(T * B, -1))
