"""NTK / regret-bound analysis driven by an experiment configuration."""

import numpy as np

from .config import ExperimentConfig
from .data import assumption3_embed
from .harness import build_environment
from .ntk import DelayBoundParams, d_plus, effective_dimension, ntk_gram, regret_bound


def analyze_config(cfg: ExperimentConfig) -> dict:
    """Desk-scale theory summary: d_tilde, D_+ and the bound curve.

    Contexts are sampled from the configured environment (first rounds, all
    arms) and passed through the duplicate-and-normalize embedding so they
    satisfy the unit-norm / equal-halves conditions the theory assumes.
    """
    env = build_environment(cfg, cfg.seeds[0])
    wanted = cfg.analysis.n_contexts
    contexts = []
    t = 1
    while len(contexts) < wanted:
        for x in env.round_contexts(t):
            if np.linalg.norm(x) > 0:
                contexts.append(assumption3_embed(x))
        t += 1
    contexts = np.stack(contexts[:wanted])
    gram = ntk_gram(contexts, cfg.network.depth)
    d_tilde = effective_dimension(gram, cfg.policy.lam, cfg.horizon * cfg.arms)
    eigmin = float(np.linalg.eigvalsh(gram)[0])
    params = DelayBoundParams(cfg.horizon, cfg.policy.delta,
                              cfg.environment.expected_delay,
                              cfg.analysis.alpha, cfg.analysis.b)
    dp, d_tau, psi_tau = d_plus(params)
    grid = np.unique(np.linspace(1, cfg.horizon, num=min(cfg.horizon, 50)).astype(int))
    steps = cfg.train.steps if cfg.train.steps_schedule == "fixed" else cfg.horizon
    curve = [
        [int(t), regret_bound(
            d_plus(DelayBoundParams(int(t), cfg.policy.delta,
                                    cfg.environment.expected_delay,
                                    cfg.analysis.alpha, cfg.analysis.b))[0],
            d_tilde, int(t), cfg.arms, cfg.policy.lam, cfg.policy.nu,
            cfg.policy.delta, cfg.policy.norm_s, cfg.train.eta,
            cfg.network.width, steps, cfg.network.depth, cfg.analysis.c4)]
        for t in grid
    ]
    return {
        "n_contexts": int(contexts.shape[0]),
        "d_tilde": d_tilde,
        "gram_min_eigenvalue": eigmin,
        "D_plus": dp,
        "D_tau": d_tau,
        "psi_tau": psi_tau,
        "bound_curve": curve,
    }
