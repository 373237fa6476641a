"""Connectivity graphs from precision matrices and betweenness hubs."""

import heapq
from dataclasses import dataclass

import numpy as np

from .exceptions import InputValidationError

# relative tolerance under which two path lengths count as tied
PATH_RTOL = 1e-12


@dataclass
class HubReport:
    betweenness: np.ndarray
    z_scores: np.ndarray
    hubs: list
    hub_count: int
    z_threshold: float = 2.0

    def to_json(self):
        return {
            "betweenness": [float(b) for b in self.betweenness],
            "z_scores": [float(z) for z in self.z_scores],
            "hubs": [int(h) for h in self.hubs],
            "hub_count": int(self.hub_count),
            "z_threshold": float(self.z_threshold),
        }


def partial_correlation(omega):
    """``rho_ij = -omega_ij / sqrt(omega_ii omega_jj)`` with unit diagonal."""
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise InputValidationError(f"precision must be square, got shape {omega.shape}")
    d = np.diag(omega)
    if np.any(d <= 0):
        raise InputValidationError("precision matrix has a nonpositive diagonal entry")
    s = 1.0 / np.sqrt(d)
    rho = -omega * s[:, None] * s[None, :]
    rho = (rho + rho.T) / 2.0
    np.fill_diagonal(rho, 1.0)
    return rho


def to_graph(rho, sqrt_transform=False):
    """Positive part of the partial correlations as edge weights.

    Negative entries and the diagonal become 0. ``sqrt_transform`` takes
    square roots of the weights; it is meant for visualization export only.
    """
    rho = np.asarray(rho, dtype=float)
    w = np.maximum(rho, 0.0)
    np.fill_diagonal(w, 0.0)
    return np.sqrt(w) if sqrt_transform else w


def _single_source(weights, lengths, s):
    """Dijkstra from ``s`` with shortest-path counts (Brandes 2001)."""
    p = weights.shape[0]
    dist = np.full(p, np.inf)
    sigma = np.zeros(p)
    preds = [[] for _ in range(p)]
    order = []
    dist[s] = 0.0
    sigma[s] = 1.0
    heap = [(0.0, s)]
    done = np.zeros(p, dtype=bool)
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        order.append(v)
        for w in np.flatnonzero(weights[v]):
            if done[w]:
                continue
            alt = d + lengths[v, w]
            tie = abs(alt - dist[w]) <= PATH_RTOL * max(alt, dist[w]) if np.isfinite(dist[w]) else False
            if tie:
                sigma[w] += sigma[v]
                preds[w].append(v)
            elif alt < dist[w]:
                dist[w] = alt
                sigma[w] = sigma[v]
                preds[w] = [v]
                heapq.heappush(heap, (alt, w))
    return order, preds, sigma


def betweenness_weighted(weights):
    """Weighted betweenness centrality of an undirected graph.

    Edge length is ``1 / w_ij`` for ``w_ij > 0``; zero weights are absent
    edges. Tied shortest paths share credit; endpoints are excluded and
    each unordered pair is counted once.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise InputValidationError(f"weights must be square, got shape {weights.shape}")
    if np.any(weights < 0):
        raise InputValidationError("edge weights must be nonnegative")
    weights = weights.copy()
    np.fill_diagonal(weights, 0.0)
    with np.errstate(divide="ignore"):
        lengths = np.where(weights > 0, 1.0 / weights, np.inf)
    p = weights.shape[0]
    bc = np.zeros(p)
    for s in range(p):
        order, preds, sigma = _single_source(weights, lengths, s)
        delta = np.zeros(p)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def hub_report(betweenness, z_threshold=2.0):
    """Standardize betweenness (sample sd) and flag nodes with ``z > z_threshold``."""
    b = np.asarray(betweenness, dtype=float)
    if b.ndim != 1 or b.size < 2:
        raise InputValidationError("need a betweenness vector with at least 2 nodes")
    sd = float(np.std(b, ddof=1))
    if sd == 0.0:
        z = np.zeros_like(b)
    else:
        z = (b - b.mean()) / sd
    hubs = [int(i) for i in np.flatnonzero(z > z_threshold)]
    return HubReport(b, z, hubs, len(hubs), float(z_threshold))


def hub_pipeline(omega, z_threshold=2.0):
    """Precision matrix to hub report (no square-root transform)."""
    g = to_graph(partial_correlation(omega))
    return hub_report(betweenness_weighted(g), z_threshold)


def edge_list(weights):
    """``(i, j, w)`` rows for ``i < j`` with ``w > 0``."""
    weights = np.asarray(weights, dtype=float)
    iu = np.triu_indices(weights.shape[0], 1)
    keep = weights[iu] > 0
    return [(int(i), int(j), float(w)) for i, j, w in zip(iu[0][keep], iu[1][keep], weights[iu][keep])]
