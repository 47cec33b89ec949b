import json

import pytest
from hypothesis import given, settings, strategies as st

from hybridbound import config
from hybridbound.errors import ConfigError


def test_minimal_config_defaults():
    cfg = config.parse_config("")
    assert cfg.circuit.qubits == 3 and cfg.circuit.T == 4
    assert cfg.net.dims == (3, 3, 1)
    assert cfg.data.n_train == (50, 100, 200, 400)
    assert cfg.data.test_size == 20 * 400
    assert cfg.bound.delta == 0.05
    assert cfg.seeds == (0,)


def test_qubit_limit_message():
    with pytest.raises(ConfigError) as err:
        config.parse_config("[circuit]\nqubits = 12\n")
    assert "qubits ≤ 10" in str(err.value)


def test_dims_mismatch_names_both_fields():
    with pytest.raises(ConfigError) as err:
        config.parse_config("[circuit]\nqubits = 3\nmeasured = [0, 1]\n[net]\ndims = [3, 1]\n")
    msg = str(err.value)
    assert "net.dims" in msg and "circuit.measured" in msg


def test_all_violations_reported():
    text = "[circuit]\nqubits = 12\n[net]\nalpha = -1.0\n[data]\nn_train = [100, 50]\n[bound]\ndelta = 2.0\n"
    with pytest.raises(ConfigError) as err:
        config.parse_config(text)
    probs = err.value.problems
    assert len(probs) >= 4
    assert any("net.alpha" in p for p in probs)
    assert any("ascending" in p for p in probs)
    assert any("bound.delta" in p for p in probs)


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError) as err:
        config.parse_config("[circuit]\nqubits = 3\nT = = 4\n")
    assert err.value.line == 3
    assert str(err.value).startswith("line 3:")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError) as err:
        config.parse_config("[circuit]\nqbits = 3\n[extra]\n")
    assert any("qbits" in p for p in err.value.problems)
    assert any("extra" in p for p in err.value.problems)


def test_json_alternate():
    cfg = config.parse_config(json.dumps({"circuit": {"qubits": 2, "T": 1}, "seeds": [3]}))
    assert cfg.circuit.qubits == 2 and cfg.seeds == (3,)
    assert cfg.net.dims == (2, 2, 1)


def test_shared_gates_set_T_and_M_rep():
    cfg = config.parse_config("[circuit]\nqubits = 3\ngates = [[0, 1], [1, 2], [0, 1]]\nslots = [0, 1, 0]\n")
    assert cfg.circuit.T == 2 and cfg.circuit.M_rep == 2
    p = cfg.bound_params()
    assert p.T == 2 and p.M_rep == 2
    with pytest.raises(ConfigError):
        config.parse_config("[circuit]\nqubits = 3\ngates = [[0, 1], [0, 1]]\nslots = [0, 0]\nM_rep = 1\n")
    capped = config.parse_config("[circuit]\nqubits = 3\ngates = [[0, 1]]\nslots = [0]\nM_rep = 3\n")
    assert capped.bound_params().M_rep == 3


def test_bound_params_from_config():
    cfg = config.parse_config("[circuit]\nqubits = 3\nmeasured = [0, 2]\n[net]\ndims = [2, 4, 1]\n")
    p = cfg.bound_params(123)
    assert (p.k, p.m, p.n, p.N) == (2, 4, 4, 123)
    assert p.L_loss == pytest.approx(4.0) and p.M_loss == 4.0


configs = st.fixed_dictionaries({
    "seeds": st.lists(st.integers(0, 1000), min_size=1, max_size=4),
    "circuit": st.fixed_dictionaries({"qubits": st.integers(2, 6), "T": st.integers(1, 8)}),
    "net": st.fixed_dictionaries({"alpha": st.floats(0.1, 5.0),
                                  "activation": st.sampled_from(["relu", "tanh", "identity"])}),
    "data": st.fixed_dictionaries({
        "noise": st.floats(0.0, 1.0),
        "n_train": st.lists(st.integers(1, 1000), min_size=1, max_size=5, unique=True).map(sorted),
    }),
    "training": st.fixed_dictionaries({"steps": st.integers(0, 500), "lr": st.floats(1e-4, 2.0)}),
    "bound": st.fixed_dictionaries({"delta": st.floats(0.001, 1.0)}),
})


@settings(max_examples=100, deadline=None)
@given(configs, st.sampled_from(["toml", "json"]))
def test_round_trip(doc, fmt):
    cfg = config.parse_config(json.dumps(doc))
    again = config.parse_config(config.serialize_config(cfg, fmt))
    assert again == cfg
    assert again.hash() == cfg.hash()
    assert config.parse_config(config.serialize_config(again, fmt)) == again


def test_load_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[circuit]\nqubits = 2\nT = 1\n")
    assert config.load_config(p).circuit.qubits == 2
