#include "phmol/figures.hpp"
#include "phmol/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace phmol;

namespace {

std::string csv(const SweepResult& r) {
    std::ostringstream os;
    emit_csv(r, os);
    return os.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

SweepSpec small_spec() {
    SweepSpec s;
    s.axis1 = {"delta", -22, -18, 3};
    s.axis2 = SweepAxis{"u", 0.01, 0.015, 2};
    s.fixed = Params::symmetric(0, 20, 0, 0.01);
    s.observables = {Observable::g2_plus_zero, Observable::occupations};
    s.n_max = 3;
    return s;
}

} // namespace

TEST_CASE("axis values") {
    CHECK(SweepAxis{"u", -1, 1, 5}.values() == std::vector<double>{-1, -0.5, 0, 0.5, 1});
    const auto v = SweepAxis{"delta", -30, 30, 201}.values();
    CHECK(v[100] == 0.0);
    CHECK(v.front() == -30.0);
    CHECK(v.back() == 30.0);

    const auto a = parse_axis("j:2:40:11");
    CHECK(a.name == "j");
    CHECK(a.min == 2);
    CHECK(a.max == 40);
    CHECK(a.count == 11);
    CHECK_THROWS(parse_axis("j:2:40"));
    CHECK_THROWS(parse_axis("j:2:x:4"));
}

TEST_CASE("parameter names") {
    Params p;
    set_parameter(p, "delta", 3);
    CHECK(p.delta_a == 3);
    CHECK(p.delta_b == 3);
    set_parameter(p, "kappa_b", 2);
    CHECK(p.kappa_b == 2);
    CHECK(is_parameter_name("epsilon"));
    CHECK_FALSE(is_parameter_name("omega"));
    CHECK_THROWS(set_parameter(p, "omega", 1));
}

TEST_CASE("single point at the antibunching optimum") {
    const auto r = run_point(Params::symmetric(-20, 20, 0.0125, 0.01), 5,
                             {Observable::g2_plus_zero, Observable::g2_minus_zero});
    REQUIRE(r.status == PointStatus::ok);
    REQUIRE(r.values.size() == 2);
    CHECK(*r.values[0] < 1e-3);
    CHECK(*r.values[0] == doctest::Approx(5.01272990704394e-07).epsilon(1e-6));
    CHECK(*r.values[1] == doctest::Approx(0.999843649449411).epsilon(1e-6));
}

TEST_CASE("undriven point reports vacuum occupation") {
    const auto r = run_point(Params::symmetric(-20, 20, 0.0125, 0), 5,
                             {Observable::g2_plus_zero, Observable::occupations});
    CHECK(r.status == PointStatus::vacuum_occupation);
    REQUIRE(r.values.size() == 3);
    CHECK_FALSE(r.values[0].has_value());
    CHECK(*r.values[1] == 0.0);
    CHECK(*r.values[2] == 0.0);
}

TEST_CASE("linear point is Poissonian") {
    const auto r = run_point(Params::symmetric(-7, 3, 0, 0.01), 5, {Observable::g2_plus_zero});
    REQUIRE(r.status == PointStatus::ok);
    CHECK(std::abs(*r.values[0] - 1) <= 1e-6);
}

TEST_CASE("unequal detunings use the cavity-mode Hamiltonian") {
    Params p = Params::symmetric(-20, 20, 0.0125, 0.01);
    p.delta_b = -19;
    const auto r = run_point(p, 4, {Observable::g2_plus_zero});
    CHECK(r.status == PointStatus::ok);
}

TEST_CASE("delayed observables") {
    const auto p = Params::symmetric(-5, 5, 0.05, 0.01);
    const auto zero = run_point(p, 5, {Observable::g2_plus_zero, Observable::g2_plus_tau}, Config{}, 0);
    REQUIRE(zero.status == PointStatus::ok);
    CHECK(std::abs(*zero.values[0] - *zero.values[1]) <= 1e-8);
    const auto later = run_point(p, 5, {Observable::g2_plus_tau}, Config{}, 20);
    CHECK(std::abs(*later.values[0] - 1) <= 0.02);
}

TEST_CASE("sweep grid is row-major with one status per point") {
    const auto r = run_sweep(small_spec());
    REQUIRE(r.points.size() == 6);
    CHECK(r.coord_names == std::vector<std::string>{"delta", "u"});
    CHECK(r.value_names == std::vector<std::string>{"g2_plus", "n_plus", "n_minus"});
    CHECK(r.coords[0] == std::vector<double>{-22, 0.01});
    CHECK(r.coords[1] == std::vector<double>{-22, 0.015});
    CHECK(r.coords[2] == std::vector<double>{-20, 0.01});
    CHECK(r.all_ok());
    for (const auto& pt : r.points) {
        REQUIRE(pt.values.size() == 3);
        for (const auto& v : pt.values) CHECK(std::isfinite(*v));
    }
}

TEST_CASE("sweep output does not depend on the thread count") {
    const auto spec = small_spec();
    const auto one = csv(run_sweep(spec, 1));
    CHECK(csv(run_sweep(spec, 2)) == one);
    CHECK(csv(run_sweep(spec, 5)) == one);
}

TEST_CASE("undriven grid is all vacuum") {
    SweepSpec s;
    s.axis1 = {"delta", -1, 1, 2};
    s.axis2 = SweepAxis{"u", 0, 1, 2};
    s.fixed = Params::symmetric(0, 1, 0, 0);
    s.n_max = 2;
    const auto r = run_sweep(s);
    REQUIRE(r.points.size() == 4);
    CHECK_FALSE(r.all_ok());
    for (const auto& pt : r.points) {
        CHECK(pt.status == PointStatus::vacuum_occupation);
        CHECK_FALSE(pt.values[0].has_value());
    }
}

TEST_CASE("locks tie parameters to the coupling") {
    SweepSpec s;
    s.axis1 = {"j", 10, 30, 3};
    s.fixed = Params::symmetric(0, 0, 0, 0.01);
    s.delta_lock = DeltaLock::minus_j;
    s.u_lock = ULock::optimal_plus;
    const auto p = s.params_at(20, std::nullopt);
    CHECK(p.delta_a == -20);
    CHECK(p.delta_b == -20);
    CHECK(p.u_kerr == 0.0125);
    s.delta_lock = DeltaLock::plus_j;
    s.u_lock = ULock::optimal_minus;
    const auto q = s.params_at(10, std::nullopt);
    CHECK(q.delta_a == 10);
    CHECK(q.u_kerr == -0.025);
}

TEST_CASE("sweep specification is validated") {
    auto s = small_spec();
    CHECK_NOTHROW(s.validate());
    s.axis2 = SweepAxis{"delta_a", 0, 1, 2};
    CHECK_THROWS(s.validate());
    s = small_spec();
    s.axis1.count = 1;
    CHECK_THROWS(s.validate());
    s = small_spec();
    s.delta_lock = DeltaLock::minus_j;
    CHECK_THROWS(s.validate());
    s = small_spec();
    s.u_lock = ULock::optimal_plus;
    CHECK_THROWS(s.validate());
    s = small_spec();
    s.observables.clear();
    CHECK_THROWS(s.validate());
    s = small_spec();
    s.axis1.name = "omega";
    CHECK_THROWS(s.validate());
}

TEST_CASE("CSV layout") {
    SweepResult r;
    r.coord_names = {"delta"};
    r.value_names = {"g2_plus"};
    r.coords = {{-20}, {-0.0}, {1e-7}};
    r.points = {{{0.25}, PointStatus::ok, ""},
                {{std::nullopt}, PointStatus::vacuum_occupation, "no photons"},
                {{1.0 / 3}, PointStatus::ok, ""}};
    r.provenance = {{"version", std::string(version)}, {"n_max", "5"}};
    const auto text = csv(r);
    const auto l = lines(text);
    REQUIRE(l.size() == 6);
    CHECK(l[0] == "# version=0.1.0");
    CHECK(l[1] == "# n_max=5");
    CHECK(l[2] == "delta,g2_plus,status");
    CHECK(l[3] == "-20,0.25,ok");
    CHECK(l[4] == "0,,vacuum-occupation");
    CHECK(l[5] == "1e-07,0.333333333333,ok");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(csv(r) == text);
}

TEST_CASE("one data row per grid point") {
    const auto r = run_sweep([] {
        auto s = small_spec();
        s.axis1 = {"delta", -20, -20, 2};
        s.axis2.reset();
        return s;
    }());
    const auto l = lines(csv(r));
    std::size_t data = 0, header = 0;
    for (const auto& s : l) {
        if (s.rfind("# ", 0) == 0) continue;
        if (s.rfind("delta,", 0) == 0) ++header;
        else ++data;
    }
    CHECK(header == 1);
    CHECK(data == 2);
}

TEST_CASE("re-emitting a result gives identical files") {
    const auto r = run_sweep(small_spec());
    const auto dir = std::filesystem::temp_directory_path() / "phmol_test_sweep";
    std::filesystem::create_directories(dir);
    emit_csv(r, dir / "a.csv");
    emit_csv(r, dir / "b.csv");
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "a.csv") == csv(r));
    std::filesystem::remove_all(dir);
}

TEST_CASE("provenance records parameters and tolerances") {
    const auto r = run_sweep(small_spec());
    const auto text = csv(r);
    for (const char* key : {"# version=", "# n_max=3", "# j=20", "# epsilon=0.01", "# rtol=1e-08",
                            "# atol=1e-10", "# axis1=delta:-22:-18:3", "# steady_method="}) {
        CHECK_MESSAGE(text.find(key) != std::string::npos, key);
    }
}

TEST_CASE("figure specifications") {
    CHECK(figure_ids().size() == 7);
    const auto f2 = figure("2");
    REQUIRE(f2.panels.size() == 1);
    CHECK(f2.panels[0].spec.axis1.count == 201);
    CHECK(f2.panels[0].spec.axis2->count == 201);
    CHECK(figure("2", 11).panels[0].spec.axis1.count == 11);
    CHECK(figure("4").panels.size() == 2);
    const auto f7 = figure("7");
    REQUIRE(f7.delay_scan.has_value());
    CHECK(f7.delay_scan->params.j_coupling == 5);
    CHECK(*f7.delay_scan->kappa_hz == doctest::Approx(6.283185307e8));
    CHECK_THROWS(figure("8"));
    for (const auto& id : figure_ids()) {
        for (const auto& panel : figure(id).panels) CHECK_NOTHROW(panel.spec.validate());
    }
}

TEST_CASE("delay scan step resolves the oscillation") {
    const auto p = Params::symmetric(-5, 5, 0.05, 0.01);
    const auto cfg = delay_scan_config(p, Config{});
    CHECK(cfg.time_step <= two_pi / (2 * 5) / 50);
}

TEST_CASE("delay scan output") {
    G2TauSpec spec;
    spec.params = Params::symmetric(-5, 5, 0.05, 0.01);
    spec.tau_max = 1;
    spec.tau_steps = 10;
    spec.kappa_hz = 1e8;
    const auto r = run_g2tau(spec);
    CHECK(r.coord_names == std::vector<std::string>{"tau", "tau_s"});
    CHECK(r.value_names == std::vector<std::string>{"g2_plus"});
    REQUIRE(r.points.size() == 11);
    CHECK(r.coords[10][1] == doctest::Approx(1e-8));
    CHECK(r.all_ok());

    spec.params.epsilon = 0;
    const auto v = run_g2tau(spec);
    CHECK(v.points[3].status == PointStatus::vacuum_occupation);
}
