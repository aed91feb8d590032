#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "xxzsim/config.hpp"
#include "xxzsim/errors.hpp"
#include "xxzsim/io.hpp"
#include "xxzsim/scenarios.hpp"

using namespace xxzsim;

TEST_CASE("config text parsing is strict") {
    RunConfig cfg;
    apply_config_key(cfg, "delta", "-0.25");
    CHECK(cfg.delta == doctest::Approx(-0.25));
    apply_config_key(cfg, "enable_hopping", "false");
    CHECK_FALSE(cfg.enable_hopping);
    apply_config_key(cfg, "m_trajectories", "123");
    CHECK(cfg.m_trajectories == 123);

    CHECK_THROWS_AS(apply_config_key(cfg, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_key(cfg, "delta", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_config_key(cfg, "n_steps", "1.5"), ConfigError);
    CHECK_THROWS_AS(apply_config_key(cfg, "echo", "maybe"), ConfigError);
}

TEST_CASE("every preset round-trips through serialize -> parse -> serialize") {
    for (const auto& p : presets()) {
        const std::string text = serialize_config(p.config);
        const RunConfig parsed = parse_config_text(text);
        CHECK(serialize_config(parsed) == text);
    }
}

TEST_CASE("preset catalog carries the published scenario parameters") {
    const auto ideal1d = preset_config("paper-1d-ideal");
    CHECK(ideal1d.lx == 32);
    CHECK(ideal1d.ly == 1);
    CHECK(ideal1d.hole_density == 0.0);
    CHECK(ideal1d.delta == doctest::Approx(-0.18));
    CHECK(ideal1d.dt == doctest::Approx(0.0172));
    CHECK(ideal1d.n_steps == 200);

    const auto holes3d = preset_config("paper-3d-holes");
    CHECK(holes3d.lx == 22);
    CHECK(holes3d.hole_density == doctest::Approx(0.11));
    CHECK(holes3d.hz_over_j == doctest::Approx(-1.1));
    CHECK(holes3d.enable_spin_flip);
    CHECK(holes3d.m_trajectories == 3000);
    CHECK(holes3d.dt == doctest::Approx(0.0176));

    const auto shuffle = preset_config("shuffle-only");
    CHECK(shuffle.hole_density == doctest::Approx(0.11));
    CHECK_FALSE(shuffle.enable_hz_field);
    CHECK_FALSE(shuffle.enable_spin_flip);
    CHECK(shuffle.enable_hopping);

    CHECK_THROWS_AS(preset_config("paper-2d"), ConfigError);
}

TEST_CASE("config file and environment overrides") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "xxzsim_test_config.cfg";
    {
        std::ofstream f(path);
        f << "# comment line\n";
        f << "lx = 8\n";
        f << "delta = -0.5   # trailing comment\n";
        f << "\n";
        f << "echo = true\n";
    }
    RunConfig cfg;
    load_config_file(cfg, path.string());
    CHECK(cfg.lx == 8);
    CHECK(cfg.delta == doctest::Approx(-0.5));
    CHECK(cfg.echo);

    setenv("XXZSIM_SEED", "4242", 1);
    setenv("XXZSIM_THREADS", "3", 1);
    apply_env_overrides(cfg);
    CHECK(cfg.seed == 4242);
    CHECK(cfg.threads == 3);
    unsetenv("XXZSIM_SEED");
    unsetenv("XXZSIM_THREADS");

    {
        std::ofstream f(path);
        f << "lx 8\n";
    }
    RunConfig cfg2;
    CHECK_THROWS_AS(load_config_file(cfg2, path.string()), ConfigError);
    fs::remove(path);
    CHECK_THROWS_AS(load_config_file(cfg2, path.string()), ConfigError);
}

TEST_CASE("params scenario emits the coupling record") {
    RunConfig cfg;
    cfg.t_tunnel = 1.0;
    cfg.u_uu = 4.0;
    cfg.u_dd = 4.0;
    cfg.u_ud = 4.0;
    const std::string json = scenarios::run_params(cfg);
    CHECK(json.find("\"delta\":1.0") != std::string::npos);
    CHECK(json.find("\"hz\":0.0") != std::string::npos);

    const std::string csv = scenarios::run_params(cfg, true);
    CHECK(csv.find("J,Jz,hz,delta") != std::string::npos);

    cfg.j_hz = 38.0;
    const std::string with_unit = scenarios::run_params(cfg);
    CHECK(with_unit.find("time_unit_seconds") != std::string::npos);
}

TEST_CASE("trajectory dump round trip") {
    namespace fs = std::filesystem;
    RunConfig cfg;
    cfg.lx = 6;
    cfg.m_trajectories = 5;
    cfg.n_steps = 4;
    cfg.dt = 0.05;
    cfg.hole_density = 0.2;
    cfg.seed = 9;
    cfg.dump = true;
    cfg.jackknife = false;
    const auto dir = fs::temp_directory_path() / "xxzsim_dump_test";
    fs::remove_all(dir);
    scenarios::run_dtwa(cfg, dir.string());

    const auto dump = io::read_dump_csv((dir / "trajectories.csv").string());
    CHECK(dump.results.size() == 5);
    CHECK(dump.dt == doctest::Approx(0.05));
    CHECK(dump.n_sites == 6);
    for (const auto& r : dump.results) {
        CHECK(r.records.size() == 5);
        CHECK(r.n_atoms == 5); // one hole out of six sites
        CHECK(r.n_a + r.n_b == r.n_atoms);
    }

    // analyze on the dump reproduces the dtwa curve
    const auto curve = scenarios::run_analyze(cfg, (dir / "trajectories.csv").string());
    CHECK(curve.size() == 5);
    CHECK(curve[0].spin_length == doctest::Approx(1.0));
    fs::remove_all(dir);
}

TEST_CASE("engine config mapping validates the region name") {
    RunConfig cfg;
    cfg.region = "sideways";
    CHECK_THROWS_AS(scenarios::curve_options(cfg), ConfigError);
    cfg.region = "diff";
    CHECK(scenarios::curve_options(cfg).variance_region == analysis::Region::diff);
}

#ifdef XXZSIM_CLI_PATH
TEST_CASE("cli exit codes: 0 ok, 2 config error, 3 domain error") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "xxzsim_cli_exit_codes";
    fs::create_directories(dir);
    const std::string cli = XXZSIM_CLI_PATH;
    const std::string quiet = " > /dev/null 2>&1";
    auto exit_code = [&](const std::string& cmd) {
        const int status = std::system((cmd + quiet).c_str());
        return WEXITSTATUS(status);
    };

    CHECK(exit_code(cli + " params --out " + (dir / "ok").string()) == 0);

    {
        std::ofstream bad((dir / "bad.cfg").string());
        bad << "no_such_key = 1\n";
    }
    CHECK(exit_code(cli + " params --config " + (dir / "bad.cfg").string()) == 2);
    CHECK(exit_code(cli + " dtwa --preset no-such-preset") == 2);

    {
        std::ofstream dom((dir / "dom.cfg").string());
        dom << "u_ud = 0\n"; // zero interaction channel
    }
    CHECK(exit_code(cli + " params --config " + (dir / "dom.cfg").string()) == 3);
    {
        std::ofstream one((dir / "one.cfg").string());
        one << "lx = 1\nly = 1\nlz = 1\nm_trajectories = 4\nn_steps = 2\n";
    }
    CHECK(exit_code(cli + " dtwa --config " + (dir / "one.cfg").string() + " --out " +
                    (dir / "out").string()) == 3);
    fs::remove_all(dir);
}
#endif
