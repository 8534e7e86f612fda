import pytest

from vrmtunnel.config import CATALOG, default_config_text, parse_config
from vrmtunnel.errors import ConfigError
from vrmtunnel.potentials import Eckart, ExponentialStep, evaluate


def test_minimal_exponential_document():
    cfg = parse_config("[profile]\nkind = exponential\n")
    assert (cfg.lambda_b, cfg.lambda_b_tilde) == (2.0, 8.0)
    assert cfg.profile == ExponentialStep(0.5, 1.0)
    assert (cfg.a, cfg.b) == (1.0, 8.0)
    assert len(cfg.kappas) == 60


@pytest.mark.parametrize("kind", CATALOG + ("linear_table1",))
def test_bundled_defaults_parse(kind):
    cfg = parse_config(default_config_text(kind))
    assert cfg.energies == tuple(sorted(cfg.energies))
    assert all(E > cfg.v1 and E > cfg.v3 for E in cfg.energies)


@pytest.mark.parametrize(
    "kind, pair", [("linear", (1, 4)), ("exponential", (2, 8)), ("parabolic", (2, 3)), ("bell", (1, 9)), ("eckart", (2, 13))]
)
def test_default_lambda_pairs(kind, pair):
    cfg = parse_config(f"[profile]\nkind = {kind}\n")
    assert (cfg.lambda_b, cfg.lambda_b_tilde) == pair


def test_zero_energy_step_names_field():
    with pytest.raises(ConfigError) as info:
        parse_config("[profile]\nkind = bell\n[energy]\nstart = 1\nstep = 0\nend = 2\n")
    assert info.value.field == "energy.step"
    assert "energy.step" in str(info.value)


def test_eckart_edges_evaluated():
    cfg = parse_config("[profile]\nkind = eckart\n")
    ek = cfg.profile
    assert isinstance(ek, Eckart)
    assert cfg.v1 == evaluate(ek, 2.0) and cfg.v3 == evaluate(ek, 13.0)
    assert cfg.v1_mode == "at-a" and cfg.v3_mode == "at-b"


@pytest.mark.parametrize(
    "text, field",
    [
        ("[profile]\nkind = bell\n[solver]\nlamda_b = 2\n", "solver.lamda_b"),
        ("[profile]\nkind = bell\n[solvr]\nlambda_b = 2\n", "solvr"),
        ("[profile]\nkind = bell\nheight = 2\n", "profile.height"),
        ("[profile]\nkind = bell\n[solver]\nlambda_b = 9\n", "solver.lambda_b_tilde"),
        ("[profile]\nkind = bell\n[setup]\na = 9\nb = 1\n", "setup.b"),
        ("[profile]\nkind = bell\n[energy]\nvalues = 0.5, abc\n", "energy.values"),
        ("[profile]\nkind = exponential\n[setup]\nv1 = 0.3\n[energy]\nvalues = 0.2, 0.4\n", "energy"),
        ("[profile]\nkind = bell\n[basis]\nkappas = 1.0, 1.0\n", "basis"),
        ("[profile]\nkind = tophat\n", "profile.kind"),
        ("[profile]\nkind = bell\nv0 = 2\nx0 = 5\n[oracle]\nenabled = maybe\n", "oracle.enabled"),
        ("[setup]\na = 1\n", "profile.kind"),
    ],
)
def test_validation_errors_name_field(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field


def test_parse_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[profile]\nkind = bell\nthis line is junk\n")
    assert info.value.line == 3


def test_key_outside_section():
    with pytest.raises(ConfigError) as info:
        parse_config("kind = bell\n")
    assert info.value.line == 1


def test_list_overrides_default_grid():
    cfg = parse_config("[profile]\nkind = bell\n[energy]\nvalues = 2.0, 1.0\n[basis]\nkappas = 0.5, 1, 1.5\n")
    assert cfg.energies == (1.0, 2.0)
    assert cfg.kappas == (0.5, 1.0, 1.5)


def test_sampled_profile_document():
    text = (
        "[profile]\nkind = sampled\nknots = 0:0, 1:0.4, 2:0\n"
        "[setup]\na = 0\nb = 2\nv1 = 0\nv3 = 0\n"
        "[basis]\nstart = 0.1\nstep = 0.3\nend = 4\n"
        "[solver]\nlambda_b = 1\nlambda_b_tilde = 3\n"
        "[energy]\nvalues = 0.2, 0.5\n"
    )
    cfg = parse_config(text)
    assert cfg.profile.knots == ((0.0, 0.0), (1.0, 0.4), (2.0, 0.0))
    assert cfg.oracle and cfg.quad_tol == 1e-10


def test_sampled_requires_full_document():
    with pytest.raises(ConfigError) as info:
        parse_config("[profile]\nkind = sampled\nknots = 0:0, 1:1\n")
    assert info.value.field.startswith("setup.")


def test_inline_comments_allowed():
    cfg = parse_config("[profile]\nkind = bell  # bundled defaults\n[solver]\nlambda_b = 1.5  # shifted\n")
    assert cfg.lambda_b == 1.5
