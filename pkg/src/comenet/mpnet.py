"""Deterministic fixed-weight reference network over the tuple featurization.

Not a trainable model: weights are seeded once and frozen.  The update per
layer follows v'_i = g(v_i, sum_j f(v_j, d_ij, theta_ij, phi_ij, tau_ij)) with
f realized as a TBF-gated message and an SBF-gated message, concatenated and
linearly down-projected, and g as a residual sum.  Used to check end-to-end
SE(3)-invariance, permutation behavior, and the tau-ablation discrimination
property at the network level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisConfig, sbf, tbf
from .errors import ShapeMismatch, UnknownSpecies
from .geometry import TupleSet, transform
from .graphs import Graph3D

_MAX_Z = 118


@dataclass(frozen=True)
class NodeState:
    features: np.ndarray  # (n, H)
    layer: int = 0


@dataclass(frozen=True)
class MiniNetConfig:
    basis: BasisConfig
    num_layers: int = 4
    hidden: int = 64
    seed: int = 0
    use_tau: bool = True

    def __post_init__(self):
        if self.num_layers < 1 or self.hidden < 1:
            raise ValueError("num_layers and hidden must be >= 1")


@dataclass(frozen=True)
class _Weights:
    embedding: np.ndarray
    layers: tuple
    self_atom: tuple


def _make_weights(cfg: MiniNetConfig) -> _Weights:
    """All parameters drawn in a fixed order from one seeded generator."""
    rng = np.random.default_rng(cfg.seed)
    h = cfg.hidden

    def mat(rows, cols):
        return rng.normal(size=(rows, cols)) / np.sqrt(cols)

    embedding = rng.normal(size=(_MAX_Z + 1, h)) / np.sqrt(h)
    layers = []
    for _ in range(cfg.num_layers):
        layers.append(
            {
                "basis_local": mat(h, cfg.basis.tbf_size),
                "basis_global": mat(h, cfg.basis.sbf_size),
                "msg_local": mat(h, h),
                "msg_global": mat(h, h),
                "down": mat(h, 2 * h),
                "update": mat(h, h),
            }
        )
    self_atom = (mat(h, h), mat(1, h))
    return _Weights(embedding, tuple(layers), self_atom)


def embed(species, cfg: MiniNetConfig, weights: _Weights | None = None) -> NodeState:
    """Seeded fixed lookup of initial node features by atom type (1..118)."""
    if weights is None:
        weights = _make_weights(cfg)
    rows = []
    for z in species:
        if not 1 <= int(z) <= _MAX_Z:
            raise UnknownSpecies(f"species code {z} outside 1..{_MAX_Z}")
        rows.append(weights.embedding[int(z)])
    return NodeState(np.array(rows), layer=0)


def edge_basis_features(ts: TupleSet, cfg: MiniNetConfig):
    """Per-edge TBF/SBF matrices aligned with ts.tuples; tau zeroed on ablation."""
    local = np.empty((len(ts), cfg.basis.tbf_size))
    glob = np.empty((len(ts), cfg.basis.sbf_size))
    for k, t in enumerate(ts.tuples):
        local[k] = tbf(t.d, t.theta, t.phi, cfg.basis)
        tau = t.tau if cfg.use_tau else 0.0
        glob[k] = sbf(t.d, tau, cfg.basis)
    return local, glob


def interaction_layer(states: NodeState, ts: TupleSet, basis_features, layer_w):
    """One message-passing update; summation runs in sorted-(i, j) edge order."""
    v = states.features
    n, h = v.shape
    local_feats, global_feats = basis_features
    if local_feats.shape[0] != len(ts) or global_feats.shape[0] != len(ts):
        raise ShapeMismatch("basis features do not match the tuple set")

    gate_local = local_feats @ layer_w["basis_local"].T
    gate_global = global_feats @ layer_w["basis_global"].T
    src = np.array([t.j for t in ts.tuples], dtype=np.int64)
    dst = np.array([t.i for t in ts.tuples], dtype=np.int64)

    agg = np.zeros((n, 2 * h))
    if len(ts):
        msg_local = (v[src] @ layer_w["msg_local"].T) * gate_local
        msg_global = (v[src] @ layer_w["msg_global"].T) * gate_global
        msg = np.concatenate([msg_local, msg_global], axis=1)
        np.add.at(agg, dst, msg)

    update = np.tanh(agg @ layer_w["down"].T) @ layer_w["update"].T
    return NodeState(v + update, layer=states.layer + 1)


def forward(g: Graph3D, cfg: MiniNetConfig) -> float:
    """Scalar prediction: embed, interaction layers, 2-layer head, sum pool."""
    weights = _make_weights(cfg)
    ts = transform(g)
    feats = edge_basis_features(ts, cfg)
    state = embed(g.species, cfg, weights)
    for layer_w in weights.layers:
        state = interaction_layer(state, ts, feats, layer_w)
    w1, w2 = weights.self_atom
    per_node = np.tanh(state.features @ w1.T) @ w2.T
    return float(per_node.sum())
