// Runs the phmol executable end to end.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("phmol_test_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Run run(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + PHMOL_CLI_PATH + "\" " + args + " >\"" +
                            out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

} // namespace

TEST_CASE("point at the antibunching optimum") {
    const auto r = run("point --delta -20 --j 20 --u 0.0125 --epsilon 0.01 --observable g2_plus_zero");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "g2_plus,status\n"));
    CHECK(contains(r.out, "5.012729"));
    CHECK(contains(r.out, ",ok\n"));
}

TEST_CASE("undriven point exits with status 2") {
    const auto r = run("point --epsilon 0");
    CHECK(r.code == 2);
    CHECK(contains(r.out, "vacuum-occupation"));
}

TEST_CASE("bad input exits with status 1") {
    CHECK(run("point --kappa-a -1").code == 1);
    CHECK(run("point --n-max").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("figure 9").code == 1);
    CHECK(run("sweep --axis1 omega:0:1:3").code == 1);
    CHECK(run("--help").code == 0);
}

TEST_CASE("optimal conditions") {
    const auto r = run("optimal --j 20");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "mode,delta_opt,u_opt\nplus,-20,0.0125\nminus,20,-0.0125\n"));
    const auto m = run("optimal --j 5 --mode plus");
    CHECK(contains(m.out, "plus,-5,0.05\n"));
    CHECK_FALSE(contains(m.out, "minus"));
    CHECK(run("optimal --j 0").code == 1);
}

TEST_CASE("sweep writes a file and is thread-count independent") {
    const auto a = scratch() / "a.csv";
    const auto b = scratch() / "b.csv";
    const std::string args =
        "sweep --axis1 delta:-22:-18:3 --axis2 u:0.01:0.015:2 --n-max 3 --observable g2_plus_zero,occupations";
    CHECK(run(args + " --threads 1 --out " + a.string()).code == 0);
    CHECK(run(args + " --threads 3 --out " + b.string()).code == 0);
    const auto text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(contains(text, "delta,u,g2_plus,n_plus,n_minus,status\n"));
    CHECK(contains(text, "# axis2=u:0.01:0.015:2\n"));
}

TEST_CASE("config file supplies values and flags override it") {
    const auto cfg = scratch() / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# parameters\n"
          << "delta = -20\n"
          << "j = 20\n"
          << "u = 0.0125\n"
          << "epsilon = 0\n"
          << "kappa-a = 1\n";
    }
    const auto from_file = run("point --config " + cfg.string());
    CHECK(from_file.code == 2);
    CHECK(contains(from_file.out, "# epsilon=0\n"));

    const auto overridden = run("point --config " + cfg.string() + " --epsilon 0.01");
    CHECK(overridden.code == 0);
    CHECK(contains(overridden.out, "# epsilon=0.01\n"));
    CHECK(contains(overridden.out, "# u=0.0125\n"));
}

TEST_CASE("delay scan with a declared rate") {
    const auto r = run("g2tau --delta -5 --j 5 --u 0.05 --tau-max 1 --tau-steps 4 --kappa-hz 6.283185307e8");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "tau,tau_s,g2_plus,status\n"));
    CHECK(contains(r.out, "# kappa_hz=628318530.7\n"));
}

TEST_CASE("figure writes into the output directory") {
    const auto dir = scratch() / "fig";
    const auto r = run("figure 4 --resolution 5 --out " + dir.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "fig4_plus.csv"));
    CHECK(fs::exists(dir / "fig4_minus.csv"));
    fs::remove_all(scratch());
}
