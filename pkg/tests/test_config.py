import pytest

from nonlocalpop import ConfigError, emit_toml, parse_config
from nonlocalpop.presets import preset, preset_names

MINIMAL = """
[grid]
dim = 2

[model]
n_species = 1
diffusion = [1.0]
gamma = [[-1.0]]
kernel = { kind = "cosine", radius = 0.3 }
"""


class TestParsing:
    def test_minimal_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.time.dt_max == 1e-2
        assert cfg.time.dt_min == 1e-12
        assert cfg.time.cfl == 0.25
        assert cfg.limits.linf_ceiling == 1e8
        assert cfg.model.clamp is True
        assert cfg.model.dealias is False
        assert cfg.ic.kind == "perturbed-uniform"
        assert cfg.ic.masses == (1.0,)
        assert cfg.output.formats == ("csv", "grid")
        assert cfg.grid.points == (128, 128)

    def test_gamma_shape_error_names_key(self):
        text = MINIMAL.replace("gamma = [[-1.0]]", "gamma = [[-1.0, 2.0]]")
        with pytest.raises(ConfigError, match="model.gamma"):
            parse_config(text)

    def test_gamma_wrong_rows(self):
        text = """
[grid]
dim = 2

[model]
n_species = 2
diffusion = [1.0, 1.0]
gamma = [[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]]
kernel = { kind = "delta" }
"""
        with pytest.raises(ConfigError, match="model.gamma"):
            parse_config(text)

    def test_kernel_radius_vs_domain(self):
        text = MINIMAL.replace("radius = 0.3", "radius = 0.6")
        with pytest.raises(ConfigError, match=r"model.kernels\[0\]\[0\]"):
            parse_config(text)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="grid.shape"):
            parse_config(MINIMAL + "\n[grid.shape]\nx = 2\n")

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="config.extras"):
            parse_config(MINIMAL + "\n[extras]\nfoo = 1\n")

    def test_bad_scheme(self):
        with pytest.raises(ConfigError, match="time.scheme"):
            parse_config(MINIMAL + '\n[time]\nscheme = "rk4"\n')

    def test_dt_ordering(self):
        with pytest.raises(ConfigError, match="time.dt_min"):
            parse_config(MINIMAL + "\n[time]\ndt_min = 0.1\ndt_max = 0.01\n")

    def test_masses_length(self):
        with pytest.raises(ConfigError, match="ic.masses"):
            parse_config(MINIMAL + "\n[ic]\nmasses = [1.0, 2.0]\n")

    def test_center_range(self):
        with pytest.raises(ConfigError, match="ic.center"):
            parse_config(MINIMAL + "\n[ic]\ncenter = [0.7, 0.0]\n")

    def test_odd_points_rejected(self):
        text = MINIMAL.replace("dim = 2", "dim = 2\npoints = [30, 33]")
        with pytest.raises(ConfigError, match="grid.points"):
            parse_config(text)

    def test_toml_syntax_error(self):
        with pytest.raises(ConfigError, match="TOML"):
            parse_config("= nonsense ][")

    def test_kernels_matrix_form(self):
        text = """
[grid]
dim = 2

[model]
n_species = 2
diffusion = [1.0, 1.0]
gamma = [[0.0, -1.2], [-1.2, 0.0]]
kernels = [[{ kind = "cosine", radius = 0.4 }, { kind = "cosine", radius = 0.4 }], [{ kind = "cosine", radius = 0.1 }, { kind = "delta" }]]
"""
        cfg = parse_config(text)
        assert cfg.model.kernels[0][0].radius == 0.4
        assert cfg.model.kernels[1][0].radius == 0.1
        assert cfg.model.kernels[1][1].kind == "delta"

    def test_kernel_and_kernels_conflict(self):
        text = MINIMAL + '\n'
        text = text.replace(
            'kernel = { kind = "cosine", radius = 0.3 }',
            'kernel = { kind = "cosine", radius = 0.3 }\nkernels = [[{ kind = "delta" }]]',
        )
        with pytest.raises(ConfigError, match="not both"):
            parse_config(text)


class TestBuilders:
    def test_build_objects(self):
        cfg = parse_config(MINIMAL)
        grid = cfg.build_grid()
        params = cfg.build_params()
        fields = cfg.build_initial(grid)
        controller = cfg.build_controller()
        assert grid.volume == 1.0
        assert params.n_species == 1
        assert len(fields) == 1
        assert controller.dt_max == cfg.time.dt_max

    def test_hash_changes_with_seed(self):
        cfg = parse_config(MINIMAL)
        assert cfg.config_hash() != cfg.with_overrides(seed=777).config_hash()
        assert cfg.config_hash() == parse_config(MINIMAL).config_hash()


class TestPresets:
    def test_fig1a_matches_scenario_parameters(self):
        cfg = preset("fig1a")
        assert cfg.model.n_species == 1
        assert cfg.model.diffusion == (1.0,)
        assert cfg.model.gamma == ((-1.0,),)
        assert cfg.model.kernels[0][0].kind == "cosine"
        assert cfg.model.kernels[0][0].radius == 0.3

    def test_fig1b_radius(self):
        assert preset("fig1b").model.kernels[0][0].radius == 0.2

    def test_fig2_couplings(self):
        cfg = preset("fig2a")
        assert cfg.model.gamma == ((-5.0, -1.0), (-1.0, -5.0))
        assert cfg.model.diffusion == (1.0, 1.0)

    def test_fig3_structure(self):
        cfg = preset("fig3b")
        assert cfg.model.gamma == ((0.0, -1.2), (-1.2, 0.0))
        assert cfg.model.kernels[0][0].radius == 0.4
        assert cfg.model.kernels[1][1].radius == 0.1

    def test_fig4_coupling_matrix(self):
        cfg = preset("fig4a")
        assert cfg.model.gamma == (
            (1.0, 1.0, 1.0),
            (1.0, -1.0, -1.0),
            (1.0, -1.0, -1.0),
        )
        assert any("gamma_23" in line or "equals sign" in line for line in cfg.comments)

    def test_case1_blowup_margin(self):
        from nonlocalpop import case1_threshold

        cfg = preset("case1-blowup")
        gamma_star = case1_threshold(sum(cfg.ic.masses), max(cfg.model.diffusion), 1.0)
        assert cfg.model.gamma[0][0] == pytest.approx(gamma_star - 0.5, abs=1e-12)
        assert all(spec.kind == "delta" for row in cfg.model.kernels for spec in row)

    def test_case2_presets_satisfy_structure(self):
        from nonlocalpop import case2_condition

        for name in ("case2-blowup", "case2-safe"):
            cfg = preset(name)
            assert case2_condition(cfg.model.gamma).holds

    def test_unknown_preset(self):
        with pytest.raises(KeyError, match="fig1a"):
            preset("nope")

    def test_all_presets_round_trip(self):
        for name in preset_names():
            cfg = preset(name)
            text = emit_toml(cfg)
            back = parse_config(text)
            assert back == cfg, name

    def test_all_presets_buildable(self):
        for name in preset_names():
            cfg = preset(name)
            grid = cfg.build_grid()
            params = cfg.build_params()
            fields = cfg.build_initial(grid)
            assert len(fields) == params.n_species
