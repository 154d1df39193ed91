"""Vault benchmark rules; the secret oracle is implemented independently."""

from __future__ import annotations

import pytest

from cube.benchmarks.vault import (
    VAULT_TASKS,
    KeyVaultBenchmark,
    VaultService,
    make_vault_debug_agent,
    secret_fragments,
)
from cube.errors import TaskNotFound
from cube.kit.core import RuntimeContext, ToolConfig
from cube.protocol import ActionRequest
from cube.rng import secret_hex

MASK = (1 << 64) - 1


def oracle_secret(seed: int) -> str:
    """Reference derivation written out longhand, separate from cube.rng."""
    state = (seed + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    z = (z ^ (z >> 31)) & MASK
    return f"{z:016x}"


def make_task(task_id: str, seed: int, namespace: str = "ns-test", vault=None):
    bench = KeyVaultBenchmark()
    ctx = RuntimeContext(tool_config=ToolConfig())
    bench.setup(ctx)
    if vault is not None:
        ctx.shared["vault"] = vault
    descriptor = next(d for d in bench.tasks() if d.task_id == task_id)
    return bench.create_task(descriptor, ctx, seed, namespace)


def test_secret_matches_independent_oracle():
    for seed in (0, 1, 7, 11, 42, 987654321):
        assert secret_hex(seed) == oracle_secret(seed)


def test_vault_easy_seed0_known_secret():
    assert oracle_secret(0) == "e220a8397b1dcdaf"
    task = make_task("vault-easy", seed=0)
    task.reset(0)
    fragment = task.apply_tool(ActionRequest("query", {"key": "k0"})).content[0].payload
    assert fragment == "e220a8397b1dcdaf"


def test_fragments_concatenate_to_secret_in_key_order():
    for seed in (0, 5, 11):
        fragments = secret_fragments(seed, ("k0", "k1", "k2"))
        assert "".join(fragments[k] for k in ("k0", "k1", "k2")) == oracle_secret(seed)
        assert len(fragments["k0"]) == 6
        assert len(fragments["k1"]) == 5
        assert len(fragments["k2"]) == 5


def test_wrong_submission_rejected_and_not_terminal():
    task = make_task("vault-easy", seed=0)
    task.reset(0)
    result = task.apply_tool(ActionRequest("submit", {"answer": "wrong"}))
    assert result.content[0].payload == "rejected"
    outcome = task.evaluate()
    assert outcome.reward == 0.0 and not outcome.terminated


def test_correct_submission_terminates_with_reward_one():
    task = make_task("vault-easy", seed=3)
    task.reset(3)
    task.apply_tool(ActionRequest("submit", {"answer": oracle_secret(3)}))
    outcome = task.evaluate()
    assert outcome.reward == 1.0 and outcome.terminated


def test_unknown_key_is_tool_error():
    task = make_task("vault-easy", seed=0)
    task.reset(0)
    result = task.apply_tool(ActionRequest("query", {"key": "k9"}))
    assert result.is_error


def test_sessions_with_different_seeds_stay_isolated():
    vault = VaultService()
    a = make_task("vault-easy", seed=1, namespace="ns-a", vault=vault)
    b = make_task("vault-easy", seed=2, namespace="ns-b", vault=vault)
    a.reset(1)
    b.reset(2)
    frag_a = a.apply_tool(ActionRequest("query", {"key": "k0"})).content[0].payload
    frag_b = b.apply_tool(ActionRequest("query", {"key": "k0"})).content[0].payload
    assert frag_a == oracle_secret(1)
    assert frag_b == oracle_secret(2)
    assert frag_a != frag_b


def test_close_clears_namespace():
    vault = VaultService()
    task = make_task("vault-easy", seed=1, namespace="ns-gone", vault=vault)
    task.reset(1)
    assert vault.read("ns-gone", "k0") is not None
    task.close()
    assert vault.read("ns-gone", "k0") is None


def test_reset_with_new_seed_rewrites_fragments():
    task = make_task("vault-easy", seed=1)
    task.reset(1)
    task.reset(2)
    fragment = task.apply_tool(ActionRequest("query", {"key": "k0"})).content[0].payload
    assert fragment == oracle_secret(2)


def test_privileged_info_contains_secret():
    task = make_task("vault-hard", seed=11)
    task.reset(11)
    assert oracle_secret(11) in task.privileged_info()


@pytest.mark.parametrize("task_id", ["vault-easy", "vault-hard"])
def test_debug_agent_solves(task_id):
    seed = 11
    task = make_task(task_id, seed=seed)
    obs = task.reset(seed).obs
    agent = make_vault_debug_agent(VAULT_TASKS[task_id]["keys"])
    steps = 0
    while True:
        action = agent(obs, task.tools(), None)
        if action is None:
            break
        task.apply_tool(action)
        obs = task.observation()
        steps += 1
        assert steps <= VAULT_TASKS[task_id]["max_steps"]
    outcome = task.evaluate()
    assert outcome.reward == 1.0 and outcome.terminated
    assert steps == len(VAULT_TASKS[task_id]["keys"]) + 1


def test_all_vault_tasks_are_stochastic_and_configs_carry_seeds():
    bench = KeyVaultBenchmark()
    assert all(d.stochastic for d in bench.tasks())
    assert all(cfg.seed is not None for cfg in bench.get_debug_task_configs())


def test_debug_agent_lookup_rejects_unknown():
    with pytest.raises(TaskNotFound):
        KeyVaultBenchmark().make_debug_agent("vault-nope")
