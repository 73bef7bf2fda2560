import pytest

from relex.config import ConfigError, RunConfig, dump_config, load_config, parse_assignments


def test_defaults_are_valid_and_within_ranges():
    cfg = RunConfig().validate()
    assert (cfg.lr, cfg.l2, cfg.dropout, cfg.clip, cfg.ss_k, cfg.pretrain_epochs) == \
        (1e-3, 1e-5, 0.3, 10.0, 10.0, 10)
    assert (cfg.word_dim, cfg.pos_dim, cfg.seq_hidden, cfg.tree_hidden) == (200, 25, 100, 100)
    assert (cfg.entity_weight, cfg.relation_weight) == (1.0, 1.0)


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nlr = 0.002  # trailing\nstructure = subtree\npair = false\n\n")
    cfg = load_config(path, ["lr=0.003", "epochs = 7"])
    assert cfg.lr == 0.003 and cfg.epochs == 7 and cfg.structure == "SubTree"
    assert cfg.pair is False


def test_unknown_key_and_bad_values():
    with pytest.raises(ConfigError, match="unknown"):
        parse_assignments(["learning_rate = 0.1"])
    with pytest.raises(ConfigError, match="boolean"):
        parse_assignments(["pair = maybe"])
    with pytest.raises(ConfigError, match="int"):
        parse_assignments(["epochs = 1.5"])
    with pytest.raises(ConfigError, match="key = value"):
        parse_assignments(["epochs"])


def test_range_validation_and_override():
    with pytest.raises(ConfigError, match="tuning range"):
        load_config(overrides=["dropout=0.6"])
    assert load_config(overrides=["dropout=0.6", "strict_ranges=false"]).dropout == 0.6
    with pytest.raises(ConfigError):
        load_config(overrides=["dropout=1.0", "strict_ranges=false"])
    with pytest.raises(ConfigError):
        load_config(overrides=["structure=Path"])


def test_dump_round_trip():
    cfg = RunConfig().replace(lr=0.002, train_path="a.txt", structure="FullTree")
    assert load_config(overrides=dump_config(cfg).splitlines()) == cfg
