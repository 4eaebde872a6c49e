#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qbatt/config.hpp"
#include "qbatt/csv.hpp"
#include "qbatt/error.hpp"
#include "qbatt/scenarios.hpp"

using namespace qbatt;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(std::string_view text)
{
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / ("qbatt_test_" + name))
    {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("empty file gives the defaults")
    {
        const RunConfig c = parse_config("");
        CHECK(c.params.g == 4.0);
        CHECK(c.params.Omega == 10.0);
        CHECK(c.params.eta_sq == 1.0);
        CHECK(c.params.s == 6.0);
        CHECK(c.dt == 2e-4);
        CHECK(c.n_max == 2);
        CHECK(c.explicit_keys.empty());
        CHECK_FALSE(c.t_switch.has_value());
    }

    TEST_CASE("overrides, comments and enums")
    {
        const RunConfig c = parse_config("# coupling\n g = 0.2 \n\nmode = unitary # trailing\nnmax=1\nframe = co_rotating\n");
        CHECK(c.params.g == 0.2);
        CHECK(c.mode == EvolutionMode::unitary);
        CHECK(c.n_max == 1);
        CHECK(c.frame == Frame::co_rotating);
        CHECK(c.is_set("g"));
        CHECK_FALSE(c.is_set("dt"));
        CHECK(c.evolution().frame == Frame::co_rotating);
        CHECK(c.nmqj().n_max == 1);
    }

    TEST_CASE("bad input names the line")
    {
        CHECK(error_of("dt = -1\n").find("dt") != std::string::npos);
        CHECK(error_of("g = 1\nbogus = 3\n").find("line 2") != std::string::npos);
        CHECK(error_of("g = 1\ng = 2\n").find("line 2") != std::string::npos);
        CHECK(error_of("dt = abc\n").find("line 1") != std::string::npos);
        CHECK(error_of("just text\n").find("line 1") != std::string::npos);
        CHECK(error_of("mode = sideways\n").find("mode") != std::string::npos);
        CHECK(error_of("nmax = 3\n").find("nmax") != std::string::npos);
        CHECK_FALSE(error_of("eta2 = 0\n").empty());
        CHECK_THROWS_AS(load_config("/nonexistent/qbatt.cfg"), IoError);
    }

    TEST_CASE("resolved values round-trip")
    {
        const RunConfig c = parse_config("g = 0.2\nt_switch = 1.0\neta2 = 3\ninitial_state = bell\n");
        std::string text;
        for (const auto& [k, v] : c.resolved()) {
            if (!v.empty() && v != "auto") {
                text += k + " = " + v + "\n";
            }
        }
        const RunConfig again = parse_config(text);
        CHECK(again.resolved() == c.resolved());
        CHECK(c.resolved().size() == config_keys().size());
        const RunConfig defaults = parse_config("");
        bool saw_auto = false;
        for (const auto& [k, v] : defaults.resolved()) {
            saw_auto |= k == "t_switch" && v == "auto";
        }
        CHECK(saw_auto);
    }

    TEST_CASE("initial states")
    {
        const StateVector4 bell = parse_initial_state("bell");
        CHECK(std::abs(bell[1]) == doctest::Approx(std::sqrt(0.5)));
        CHECK(std::abs(bell[2]) == doctest::Approx(std::sqrt(0.5)));
        const StateVector4 ud = parse_initial_state("up_z, down_z");
        CHECK(ud[1] == cplx(1.0));
        CHECK_THROWS_AS(parse_initial_state("up_q,down_z"), ValidationError);
        CHECK_THROWS_AS(parse_initial_state("up_z"), ValidationError);
    }

    TEST_CASE("number formatting")
    {
        CHECK(format_number(0.2) == "0.2");
        CHECK(format_number(2e-4) == "2e-04");
        CHECK(format_csv_value(0.1) == "0.10000000000000001");
        CHECK(format_csv_value(1.0) == "1");
        CHECK(format_csv_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
        CHECK(format_csv_value(-std::numeric_limits<double>::infinity()) == "-inf");
        for (double v : {1.0 / 3.0, -2.5e-300, 6.02e23, 0.1 + 0.2}) {
            CHECK(std::stod(format_csv_value(v)) == v);
        }
    }

    TEST_CASE("csv layout")
    {
        Table t;
        t.columns = {"a", "b"};
        t.rows = {{1.0, 0.5}, {2.0, std::numeric_limits<double>::quiet_NaN()}};
        std::ostringstream out;
        write_csv(out, t, {{"g", "4"}, {"mode", "unitary"}});
        CHECK(out.str() == "# g = 4\n# mode = unitary\na,b\n1,0.5\n2,nan\n");
        CHECK_THROWS_AS(t.column("c"), ValidationError);
        CHECK_THROWS_AS(write_csv_file("/nonexistent/dir/x.csv", t, {}), IoError);
    }

    TEST_CASE("single runs carry the resolved configuration")
    {
        RunConfig c = parse_config("t_max = 0.1\nmode = unitary\n");
        const RunOutput r = run_evolve(c);
        CHECK(r.table.rows.size() == 501);
        bool saw_g = false;
        for (const auto& [k, v] : r.header) {
            saw_g |= k == "g" && v == "4";
        }
        CHECK(saw_g);

        c = parse_config("t_max = 0.1\nshots = 30\ncycle_dt = 1e-3\nframe = co_rotating\n");
        const RunOutput circ = run_circuit_command(c);
        REQUIRE(circ.shots.has_value());
        CHECK(circ.shots->rows.size() == 30);
        CHECK(circ.table.column_index("ergotropy_se") > 0);

        c = parse_config("t_max = 4\ndt = 1e-3\n");
        const RunOutput rates = run_rates(c);
        CHECK(rates.table.rows.size() == 4001);
        CHECK(rates.table.column("gamma0")[800] == doctest::Approx(-0.011655064177438038).epsilon(1e-10));
    }

    TEST_CASE("end of the negative segment")
    {
        const double t = end_of_negative_segment(SystemParams{}, 1e-3);
        CHECK(t == doctest::Approx(0.998));
        CHECK(gamma0_of_t(SystemParams{}, t) >= 0.0);
        CHECK(gamma0_of_t(SystemParams{}, t - 1e-3) < 0.0);
        SystemParams flat;
        flat.s = 0.0;
        CHECK_THROWS_AS(end_of_negative_segment(flat, 1e-3), ValidationError);
    }

    TEST_CASE("scenarios write identical files on repeated runs")
    {
        TempDir a("scenario_a");
        TempDir b("scenario_b");
        RunConfig c = parse_config("t_max = 0.2\nshots = 40\njobs = 1\n");
        const ScenarioReport ra = run_scenario("fig5_earlystage", c, a.path.string());
        c.set("jobs", "3");
        const ScenarioReport rb = run_scenario("fig5_earlystage", c, b.path.string());
        REQUIRE(ra.files == rb.files);
        CHECK(ra.files.size() >= 5);
        for (const auto& f : ra.files) {
            const std::string x = slurp(a.path / f);
            CHECK_FALSE(x.empty());
            CHECK(x == slurp(b.path / f));
        }
        const std::string rates = (run_scenario("fig2_rates", parse_config(""), a.path.string()), slurp(a.path / "fig2_rates.csv"));
        CHECK(rates.find("# scenario = fig2_rates\n") == 0);
        CHECK(rates.find("# t_max = 4\n") != std::string::npos);
    }

    TEST_CASE("unknown scenario lists the valid names")
    {
        try {
            run_scenario("fig9", parse_config(""), "/tmp");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("fig4_weights") != std::string::npos);
        }
        CHECK(scenario_names().size() == 6);
    }
}
