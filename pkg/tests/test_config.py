import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logsplit.config import ConfigError, RunConfig, config_from_dict, emit_config, parse_config
from logsplit.integrators import SplitScheme
from logsplit.regularization import Regularization


def test_empty_object_gives_reference_setup():
    cfg = config_from_dict({})
    assert cfg.domain.lower == (-16.0,) and cfg.domain.upper == (16.0,) and cfg.domain.points == (2048,)
    assert cfg.lam == -1.0
    assert cfg.reg == Regularization("local_energy", 0.025, 2)
    assert cfg.scheme is SplitScheme.STRANG_BAB
    assert (cfg.tau, cfg.T, cfg.steps) == (0.1, 3.0, 30)
    g, = cfg.initial
    assert g.b == pytest.approx(math.pi ** -0.25) and g.v == (1.0,) and g.x0 == (0.0,)
    assert cfg.has_oracle and "errors" in cfg.observers


@pytest.mark.parametrize("raw, message", [
    ({"reg": {"kind": "local_energy", "n": 1}}, "n must be ≥ 2"),
    ({"tau": 0.07, "T": 3.0}, "T/tau not integral"),
    ({"foo": 1, "bar": 2}, "unknown keys in config: bar, foo"),
    ({"reg": {"eps": 0.1}}, "unknown keys in reg: eps"),
    ({"reg": {"epsilon": 2.0}}, "reg.epsilon"),
    ({"reg": {"kind": "cubic"}}, "reg.kind"),
    ({"dim": 3}, "dim"),
    ({"points": 7}, "domain"),
    ({"h": 0.3}, "h:"),
    ({"scheme": "yoshida"}, "scheme"),
    ({"lambda": 0}, "lambda"),
    ({"initial": [{"b": -1.0}]}, "initial[0]"),
    ({"initial": [{"v": [1.0, 2.0]}]}, "initial[0].v"),
    ({"initial": [{"x0": -3.0}, {"x0": 3.0}], "observers": ["errors"]}, "errors"),
    ({"record_every": 0}, "record_every"),
    ({"tau": -0.1}, "tau"),
    ([1, 2], "JSON object"),
])
def test_invalid_configs(raw, message):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(raw)
    assert message in str(exc.value)


def test_two_dimensional_and_multi_gausson():
    cfg = config_from_dict({"dim": 2, "h": 0.25, "initial": [{"x0": [-2, 0], "v": 0}, {"x0": [2, 0], "v": 0}]})
    assert cfg.domain.points == (128, 128)
    assert not cfg.has_oracle and "errors" not in cfg.observers


def test_positive_lambda_uses_gaussian_data():
    cfg = config_from_dict({"lambda": 1.0})
    assert not cfg.has_oracle
    assert cfg.initial[0].lam == -1.0


def test_parse_config_file_and_meta(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"tau": 0.05, "reg": {"kind": "sqrt_shift", "epsilon": 0.01}}))
    cfg = parse_config(p)
    assert cfg.reg.kind == "sqrt_shift" and cfg.steps == 60
    meta = tmp_path / "meta.json"
    meta.write_text(json.dumps({"config": cfg.to_dict(), "conventions": {}, "version": "x"}))
    assert parse_config(meta) == cfg
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "bad.json")


configs = st.fixed_dictionaries({}, optional={
    "dim": st.sampled_from([1, 2]),
    "lambda": st.sampled_from([-1.0, -0.5, 1.0]),
    "reg": st.fixed_dictionaries({}, optional={
        "kind": st.sampled_from(["exact_log", "local_energy", "sqrt_shift", "square_shift"]),
        "n": st.integers(2, 9),
        "epsilon": st.floats(1e-12, 1.0),
    }),
    "scheme": st.sampled_from([s.value for s in SplitScheme]),
    "tau": st.sampled_from([0.1, 0.05, 1e-3]),
    "T": st.sampled_from([0.0, 1.0, 3.0]),
    "record_every": st.integers(1, 50),
})


@given(configs)
def test_emit_round_trip(raw):
    cfg = config_from_dict(raw)
    assert config_from_dict(json.loads(emit_config(cfg))) == cfg


def test_evolve_config_overrides():
    cfg = config_from_dict({})
    ec = cfg.evolve_config(tau=0.05, scheme=SplitScheme.LIE_AB)
    assert ec.steps == 60 and ec.scheme is SplitScheme.LIE_AB and ec.reg == cfg.reg
    assert isinstance(cfg, RunConfig)
