"""Config parsing: defaults, exact round trips, and line-precise errors."""

import pytest

from mfsde.analysis import Thresholds
from mfsde.config import load_config, parse_config, serialize_config
from mfsde.errors import ParameterError
from mfsde.noise import GaussianMarks, TwoPointMarks


FULL_TEXT = """\
[model]
name = linear
x0 = 0.5
theta = 1.25
sigma_w = 0.1
sigma_h = 0.9

[noise]
hurst = 0.8
rate = 2.5
marks = gaussian
mark_mean = 0.2
mark_std = 0.7

[grid]
horizon = 2
steps = 512

[frac]
alpha = 0.3
beta = 0.85
lambda = 1.5
eta = 0.1

[mc]
replicas = 64
p_list = 1, 2.5 3
jump_power = 0.5
se_multiplier = 5
stability_se_multiplier = 2.5
holdout_pass_fraction = 0.9
ks_pvalue_min = 0.02
ratio_slack = 0.01

[seed]
root = 7

[output]
directory = results
"""


def test_empty_config_takes_defaults():
    cfg = parse_config("")
    assert cfg.model_name == "additive" and cfg.model_params == {}
    assert cfg.x0 == 1.0
    assert cfg.hurst == 0.75 and cfg.rate == 0.0
    assert cfg.marks == TwoPointMarks()
    assert (cfg.grid.horizon, cfg.grid.steps) == (1.0, 256)
    # alpha defaults to the midpoint of its admissible window
    assert cfg.frac.alpha == 0.375
    assert 0.25 < cfg.frac.beta < 1.0
    assert cfg.lam == 0.0 and cfg.eta is None
    assert cfg.replicas == 400
    assert cfg.p_list == (1.0, 2.0, 4.0, 8.0)
    assert cfg.jump_power == 0.25
    assert cfg.thresholds == Thresholds()
    assert cfg.seed_root == 0 and cfg.out_dir == "out"
    assert cfg.build_coeffs().name == "additive"
    assert cfg.norm_params().alpha == 0.375


def test_full_config_and_exact_round_trip():
    cfg = parse_config(FULL_TEXT)
    assert cfg.model_name == "linear"
    assert cfg.model_params == {"theta": 1.25, "sigma_w": 0.1, "sigma_h": 0.9}
    assert cfg.marks == GaussianMarks(mean=0.2, std=0.7)
    assert cfg.p_list == (1.0, 2.5, 3.0)
    assert cfg.thresholds.se_multiplier == 5.0
    assert cfg.out_dir == "results"

    again = parse_config(serialize_config(cfg))
    assert again == cfg

    # omitting the output section must be the only difference
    echoed = serialize_config(cfg, include_output=False)
    assert "[output]" not in echoed
    stripped = parse_config(echoed)
    assert stripped.out_dir == "out"
    assert serialize_config(stripped, include_output=False) == echoed


def test_default_round_trip():
    cfg = parse_config("")
    assert parse_config(serialize_config(cfg)) == cfg


def test_unknown_section_is_line_precise():
    text = "[model]\nname = zero\n\n[extras]\nfoo = 1\n"
    with pytest.raises(ParameterError) as exc:
        parse_config(text)
    msg = str(exc.value)
    assert "line 4" in msg and "[extras]" in msg and "unknown section" in msg


def test_unknown_key_is_line_precise():
    text = "[model]\nname = zero\n\n[grid]\nstep = 12\n"
    with pytest.raises(ParameterError) as exc:
        parse_config(text)
    msg = str(exc.value)
    assert "line 5" in msg and "[grid] step" in msg and "unknown key" in msg


def test_noise_section_allows_only_mark_prefixed_extras():
    parse_config("[noise]\nmarks = gaussian\nmark_std = 0.5\n")
    with pytest.raises(ParameterError) as exc:
        parse_config("[noise]\nflavor = 3\n")
    assert "mark_*" in str(exc.value)


def test_alpha_range_is_rejected_at_its_line():
    text = "[noise]\nhurst = 0.75\n\n[frac]\nalpha = 0.6\n"
    with pytest.raises(ParameterError) as exc:
        parse_config(text)
    msg = str(exc.value)
    assert "line 5" in msg and "[frac] alpha" in msg and "alpha" in msg
    # below the rough-regularity cutoff 1 - hurst fails too
    with pytest.raises(ParameterError):
        parse_config("[frac]\nalpha = 0.2\n")


def test_bad_model_and_marks_names():
    with pytest.raises(ParameterError) as exc:
        parse_config("[model]\nname = nope\n")
    assert "[model] name" in str(exc.value)
    with pytest.raises(ParameterError) as exc:
        parse_config("[model]\nname = linear\nomega = 2\n")
    assert "omega" in str(exc.value)
    with pytest.raises(ParameterError) as exc:
        parse_config("[noise]\nmarks = weird\n")
    assert "[noise] marks" in str(exc.value)
    with pytest.raises(ParameterError) as exc:
        parse_config("[model]\nx0 = abc\n")
    assert "expected a number" in str(exc.value)


def test_mc_validation():
    with pytest.raises(ParameterError, match="replicas"):
        parse_config("[mc]\nreplicas = 0\n")
    with pytest.raises(ParameterError, match="integer"):
        parse_config("[mc]\nreplicas = 12.5\n")
    with pytest.raises(ParameterError, match="empty"):
        parse_config("[mc]\np_list =\n")
    with pytest.raises(ParameterError, match="positive"):
        parse_config("[mc]\np_list = 1 -2\n")
    with pytest.raises(ParameterError, match="numbers"):
        parse_config("[mc]\np_list = a b\n")


def test_grid_seed_rate_validation():
    with pytest.raises(ParameterError) as exc:
        parse_config("[grid]\nsteps = 0\n")
    assert "[grid]" in str(exc.value)
    with pytest.raises(ParameterError):
        parse_config("[grid]\nhorizon = -1\n")
    with pytest.raises(ParameterError, match="nonnegative"):
        parse_config("[seed]\nroot = -1\n")
    with pytest.raises(ParameterError, match="nonnegative"):
        parse_config("[noise]\nrate = -2\n")


def test_frac_weight_validation():
    with pytest.raises(ParameterError) as exc:
        parse_config("[frac]\nlambda = -1\n")
    assert "[frac] lambda" in str(exc.value)
    with pytest.raises(ParameterError) as exc:
        parse_config("[frac]\nalpha = 0.3\neta = 0.4\n")
    assert "[frac] eta" in str(exc.value)


def test_syntax_error_is_wrapped():
    with pytest.raises(ParameterError, match="config syntax"):
        parse_config("key_without_section = 1\n")


def test_load_config_reads_files(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(FULL_TEXT, encoding="utf-8")
    assert load_config(path) == parse_config(FULL_TEXT)
