import math
from dataclasses import replace

import numpy as np
import pytest

from delaybandit import (BanditRecord, DelayDistribution, LinearBandit,
                         NetworkShape, NeuralBandit, PolicyConfig, RevealQueue,
                         TrainSpec, gamma_value)
from delaybandit.environment import Environment, SyntheticSource
from delaybandit.errors import ConfigurationError, ProtocolViolationError
from delaybandit import policies as policies_mod


def make_cfg(**overrides):
    base = dict(shape=NetworkShape(2, 4, 4),
                train=TrainSpec(lam=1.0, eta=0.01, steps=3),
                gamma_mode="constant", gamma_const=1.0,
                steps_schedule="fixed")
    base.update(overrides)
    return PolicyConfig(**base)


class TestGamma:
    def test_theoretical_hand_value(self):
        cfg = make_cfg(gamma_mode="theoretical", c1=0.0, c2=0.0, c3=0.0,
                       nu=1.0, lam=1.0, norm_s=1.0, delta=math.exp(-0.5))
        assert gamma_value(cfg, 0, 0.0) == pytest.approx(2.0, abs=1e-12)

    def test_constant_mode(self):
        cfg = make_cfg(gamma_mode="constant", gamma_const=1.5)
        assert gamma_value(cfg, 7, 3.2) == 1.5

    def test_simple_mode(self):
        cfg = make_cfg(gamma_mode="simple", nu=2.0, lam=4.0, norm_s=0.5, delta=0.1)
        expected = 2.0 * math.sqrt(1.0 - 2 * math.log(0.1)) + 2.0 * 0.5
        assert gamma_value(cfg, 0, 1.0) == pytest.approx(expected)

    def test_sqrt_lambda_s_flag(self):
        joint = make_cfg(gamma_mode="simple", nu=0.0, lam=4.0, norm_s=0.25,
                         sqrt_lambda_s="joint")
        assert gamma_value(joint, 0, 0.0) == pytest.approx(1.0)  # sqrt(4*0.25)
        product = make_cfg(gamma_mode="simple", nu=0.0, lam=4.0, norm_s=0.25)
        assert gamma_value(product, 0, 0.0) == pytest.approx(0.5)  # 2*0.25

    def test_theoretical_monotone_grid(self):
        cfg = make_cfg(gamma_mode="theoretical", shape=NetworkShape(2, 16, 4))
        counts = [0, 1, 5, 20, 100]
        logdets = [0.0, 0.5, 2.0, 10.0]
        grid = np.array([[gamma_value(cfg, n, ld) for ld in logdets]
                         for n in counts])
        assert np.all(np.diff(grid, axis=0) >= 0)
        assert np.all(np.diff(grid, axis=1) >= 0)

    def test_invalid_delta_rejected(self):
        with pytest.raises(ConfigurationError):
            make_cfg(delta=1.0)


class TestSelection:
    def _stubbed_policy(self, monkeypatch, means, quads, cfg=None, rng_seed=0):
        cfg = cfg or make_cfg()
        policy = NeuralBandit(cfg, np.random.default_rng(rng_seed))
        p = cfg.shape.param_count

        def fake_gradient_many(theta, shape, xs):
            return np.zeros((len(means), p)), np.array(means, dtype=float)

        monkeypatch.setattr(policies_mod, "gradient_many", fake_gradient_many)
        monkeypatch.setattr(policy.design, "quad_form",
                            lambda u, _it=iter(list(quads) * 100): next(_it))
        return policy

    def test_ucb_argmax(self, monkeypatch):
        # means (0.2, 0.1), bonuses (0.0, 0.3) with gamma = 1 -> arm 2
        policy = self._stubbed_policy(monkeypatch, [0.2, 0.1], [0.0, 0.09])
        action, diag = policy.select_action(np.zeros((2, 4)))
        assert action == 2
        assert diag.scores == pytest.approx([0.2, 0.4])

    def test_tie_breaks_to_lowest_arm(self, monkeypatch):
        policy = self._stubbed_policy(monkeypatch, [0.3, 0.3, 0.3], [0.0, 0.0, 0.0])
        action, _ = policy.select_action(np.zeros((3, 4)))
        assert action == 1

    def test_ts_zero_nu_is_greedy(self, monkeypatch):
        cfg = make_cfg(exploration="ts", nu=0.0)
        policy = self._stubbed_policy(monkeypatch, [0.1, 0.9, 0.4], [1.0, 1.0, 1.0],
                                      cfg=cfg)
        action, _ = policy.select_action(np.zeros((3, 4)))
        assert action == 2

    def test_ts_draws_consume_policy_stream_in_arm_order(self):
        cfg = make_cfg(exploration="ts", nu=1.0)
        rng = np.random.default_rng(5)
        policy = NeuralBandit(cfg, rng)
        contexts = np.tile(np.array([0.5, 0.5, 0.5, 0.5]), (2, 1))
        a1, d1 = policy.select_action(contexts)
        # reproduce: same seed, same arithmetic
        rng2 = np.random.default_rng(5)
        policy2 = NeuralBandit(cfg, rng2)
        a2, d2 = policy2.select_action(contexts)
        assert a1 == a2
        assert d1.scores == pytest.approx(d2.scores)

    def test_dimension_mismatch(self):
        policy = NeuralBandit(make_cfg(), np.random.default_rng(0))
        with pytest.raises(ValueError):
            policy.select_action(np.zeros((2, 3)))


class TestIngest:
    def make_policy(self, **overrides):
        return NeuralBandit(make_cfg(**overrides), np.random.default_rng(1))

    def _play_round(self, policy, rng):
        x = rng.standard_normal((2, 4))
        return policy.select_action(x)

    def test_empty_batch_on_reveal_no_changes(self):
        policy = self.make_policy(retrain_trigger="on-reveal")
        rng = np.random.default_rng(2)
        self._play_round(policy, rng)
        theta_before = policy.theta.copy()
        policy.ingest_revealed([])
        assert policy.design.update_count == 0
        assert np.array_equal(policy.theta, theta_before)
        assert policy.t == 1 and len(policy.pending) == 1

    def test_every_round_retrains_without_new_reveals(self):
        policy = self.make_policy(retrain_trigger="every-round", warm_start=True)
        rng = np.random.default_rng(2)
        self._play_round(policy, rng)
        policy.ingest_revealed([BanditRecord(1, rng.standard_normal(4), 1, 1.0)])
        theta_after_first = policy.theta.copy()
        self._play_round(policy, rng)
        policy.ingest_revealed([])
        # warm start + an extra training pass moves theta despite empty batch
        assert not np.array_equal(policy.theta, theta_after_first)

    def test_counting(self):
        policy = self.make_policy()
        rng = np.random.default_rng(3)
        records = []
        for t in range(1, 4):
            self._play_round(policy, rng)
            x, a = policy.pending[t]
            records.append(BanditRecord(t, x, a, 0.5))
            policy.ingest_revealed([])
        policy.select_action(rng.standard_normal((2, 4)))
        policy.ingest_revealed(records[:2])
        assert policy.design.update_count == 2
        assert policy.revealed_count == 2
        assert len(policy.pending) == policy.t - 2

    def test_unknown_round_rejected(self):
        policy = self.make_policy()
        with pytest.raises(ProtocolViolationError):
            policy.ingest_revealed([BanditRecord(9, np.zeros(4), 1, 0.0)])

    def test_batch_permutation_invariance(self):
        batches = []
        for order in ([0, 1, 2], [2, 0, 1]):
            policy = self.make_policy()
            records = []
            for t in range(1, 4):
                self._play_round(policy, np.random.default_rng(t))
                x, a = policy.pending[t]
                records.append(BanditRecord(t, x, a, 0.3 * t))
                policy.ingest_revealed([])
            policy.select_action(np.random.default_rng(9).standard_normal((2, 4)))
            policy.ingest_revealed([records[i] for i in order])
            batches.append(policy.design._z.copy())
        assert np.max(np.abs(batches[0] - batches[1])) <= 1e-10

    def test_zero_delay_stream_reproduces_undelayed_bookkeeping(self):
        policy = self.make_policy()
        rng = np.random.default_rng(6)
        queue = RevealQueue()
        for t in range(1, 11):
            self._play_round(policy, rng)
            x, a = policy.pending[t]
            queue.schedule(t, 0.0, BanditRecord(t, x, a, 1.0))
            policy.ingest_revealed(queue.pop_revealed(t))
        assert policy.revealed_count == 10
        assert policy.design.update_count == 10
        assert not policy.pending


class TestCausality:
    def test_policy_never_reads_unrevealed_rewards(self):
        """Poisoning unrevealed rewards with NaN must not change any action."""
        def run(poison):
            rng_env = np.random.default_rng(10)
            source = SyntheticSource("linear", 4, 3, rng_env)
            env = Environment(source, DelayDistribution("uniform", upper=6.0), 0.0,
                              np.random.default_rng(11), np.random.default_rng(12))
            policy = NeuralBandit(make_cfg(train=TrainSpec(1.0, 0.01, 2)),
                                  np.random.default_rng(13))
            queue = RevealQueue()
            truth = {}
            actions = []
            for t in range(1, 31):
                contexts = env.round_contexts(t)
                action, _ = policy.select_action(contexts)
                actions.append(action)
                out = env.step(t, action)
                truth[t] = out.reward
                reward = math.nan if poison else out.reward
                queue.schedule(t, out.delay, BanditRecord(t, contexts[action - 1],
                                                          action, reward))
                batch = queue.pop_revealed(t)
                if poison:
                    batch = [replace(rec, reward=truth[rec.round]) for rec in batch]
                policy.ingest_revealed(batch)
            return actions

        assert run(poison=False) == run(poison=True)


class TestLinearBaseline:
    def test_no_data_score_is_alpha_norm(self):
        policy = LinearBandit(3, np.random.default_rng(0), lam=1.0, alpha=2.0)
        x = np.array([[3.0, 0.0, 4.0]])
        _, diag = policy.select_action(x)
        assert diag.means[0] == 0.0
        assert diag.scores[0] == pytest.approx(2.0 * 5.0)

    def test_ridge_closed_form(self):
        policy = LinearBandit(3, np.random.default_rng(0), lam=1.0)
        e1 = np.array([1.0, 0.0, 0.0])
        policy.select_action(np.stack([e1, np.ones(3)]))
        x, a = policy.pending[1]
        policy.ingest_revealed([BanditRecord(1, e1, a, 1.0)])
        assert policy._theta_hat() == pytest.approx([0.5, 0.0, 0.0])

    def test_ts_zero_nu_is_greedy_ridge(self):
        ucb_free = LinearBandit(2, np.random.default_rng(0), nu=0.0,
                                exploration="ts")
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.0, 1.0])
        ucb_free.select_action(np.stack([e1, e2]))
        ucb_free.ingest_revealed([BanditRecord(1, e1, 1, 1.0)])
        action, diag = ucb_free.select_action(np.stack([e1, e2]))
        assert action == 1
        assert diag.scores == pytest.approx(diag.means)

    def test_dimension_mismatch(self):
        policy = LinearBandit(3, np.random.default_rng(0))
        with pytest.raises(ValueError):
            policy.select_action(np.zeros((2, 4)))
