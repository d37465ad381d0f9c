#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "destab/hopfss.hpp"
#include "destab/modlib.hpp"
#include "json.hpp"

using namespace destab;

namespace {

struct RunResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/* Drive the installed binary through the shell, capturing both streams. */
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int serial = 0;
    auto base = std::filesystem::temp_directory_path() /
                ("destab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(serial++));
    std::string out_p = base.string() + ".out", err_p = base.string() + ".err";
    std::string cmd = env_prefix + DESTAB_CLI " " + args + " >" + out_p + " 2>" + err_p;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_p);
    r.err = slurp(err_p);
    std::filesystem::remove(out_p);
    std::filesystem::remove(err_p);
    return r;
}

bool has(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

/* Row sums of the text grid under a given heading, keyed by the row label. */
std::map<int, long long> grid_row_sums(const std::string& text, const std::string& heading) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line) && line != heading) {}
    REQUIRE(std::getline(in, line)); // the t\s header
    REQUIRE(has(line, "t\\s"));
    std::map<int, long long> sums;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        int t;
        if (!(row >> t)) break; // legend or blank line ends the grid
        long long total = 0, v;
        while (row >> v) total += v;
        sums[t] = total;
    }
    return sums;
}

} // namespace

TEST_CASE("the documented invocations behave as documented") {
    auto v = run_cli("validate builtin:rp:4");
    CHECK(v.code == 0);
    CHECK(has(v.out, "ok: rp:4"));
    CHECK(v.err.empty());

    auto d = run_cli("derived builtin:cp2-desusp --s 0 --max-degree 10");
    CHECK(d.code == 0);
    CHECK(has(d.out, "degree 1 (dim 1): x"));

    auto s = run_cli("ss builtin:rp4-ext --max-s 4 --max-degree 8 --format text");
    CHECK(s.code == 0);
    CHECK(has(s.out, "(-1,2)  a1"));
    CHECK(has(s.out, "(-2,4)  a1^2"));
    CHECK(has(s.out, "(-3,6)  a1^3"));
    CHECK(has(s.out, "(-4,8)  a1^4"));
    CHECK(has(s.out, "no differential")); // unstable input collapses
}

TEST_CASE("exit codes separate bad input from honest truncation") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("validate --help").code == 0);
    CHECK(run_cli("frobnicate builtin:rp:2").code == 1);
    CHECK(run_cli("validate builtin:torus").code == 1);
    CHECK(run_cli("rs builtin:rp:3 --s 1").code == 1); // --max-degree is required
    CHECK(run_cli("ss builtin:rp:3 --max-s 1 --max-degree 6 --page 3").code == 1);
    CHECK(run_cli("ss builtin:rp:3 --max-s 1 --max-degree 6 --page 2").code == 0);

    auto missing = run_cli("validate /no/such/file.json");
    CHECK(missing.code == 1);
    CHECK(missing.out.empty());
    CHECK(has(missing.err, "error:"));

    // a file module keeps its stated bound, so a wider window is refused
    auto tmp = std::filesystem::temp_directory_path() / "destab_cli_rp3.json";
    CHECK(run_cli("builtin rp:3 --out " + tmp.string()).code == 0);
    auto trunc = run_cli("ss " + tmp.string() + " --max-s 2 --max-degree 9");
    CHECK(trunc.code == 2);
    CHECK(has(trunc.err, "error:"));
    CHECK(run_cli("validate " + tmp.string()).code == 0);
    std::filesystem::remove(tmp);

    auto bad = std::filesystem::temp_directory_path() / "destab_cli_bad.json";
    std::ofstream(bad) << "{\"name\": \"oops\"";
    CHECK(run_cli("validate " + bad.string()).code == 1);
    std::filesystem::remove(bad);
}

TEST_CASE("json charts re-ingest to the table the library computes") {
    auto r = run_cli("chart builtin:rp4-ext --max-s 4 --max-degree 8 --format json");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    std::map<std::pair<int, int>, long long> seen;
    for (const auto& e : j.at("entries"))
        seen[{e.at("col").get<int>(), e.at("row").get<int>()}] = e.at("dim").get<long long>();

    auto run = hss::run_ss(modlib::builtin("rp4-ext", 8), 4, 8);
    std::map<std::pair<int, int>, long long> want;
    for (const auto& [key, val] : run.einf.table)
        if (val != 0) want[key] = val;
    CHECK(seen == want);
    CHECK(j.at("max_row").get<int>() == 8);
}

TEST_CASE("text chart row sums equal the series totals") {
    auto r = run_cli("ss builtin:rp4-ext --max-s 4 --max-degree 8");
    REQUIRE(r.code == 0);
    auto sums = grid_row_sums(r.out, "stable chart");

    auto run = hss::run_ss(modlib::builtin("rp4-ext", 8), 4, 8);
    std::map<int, long long> want;
    for (const auto& [key, val] : run.einf.table)
        if (key != std::make_pair(0, 0) && val != 0) want[key.second] += val;
    for (const auto& [t, total] : sums) {
        auto it = want.find(t);
        CHECK(total == (it == want.end() ? 0 : it->second));
        want.erase(t);
    }
    CHECK(want.empty()); // nothing nonzero outside the printed rows
}

TEST_CASE("csv output quotes labels that contain commas") {
    auto r = run_cli("rs builtin:sphere:0 --s 2 --max-degree 4 --format csv");
    REQUIRE(r.code == 0);
    CHECK(has(r.out, "deg,class"));
    CHECK(has(r.out, "0,\"Q[0,0]x0\""));
    CHECK(has(r.out, "4,\"Q[0,2]x0\""));

    auto c = run_cli("chart builtin:sphere:0 --max-s 2 --max-degree 7 --format csv");
    REQUIRE(c.code == 0);
    CHECK(has(c.out, "col,row,dim,names"));
    CHECK(has(c.out, "-2,3,1,Q[1]x0"));          // no comma in the name, no quotes
    CHECK(has(c.out, "-4,7,3,\"Q[1,1]x0\"")); // comma-bearing name gets quoted
}

TEST_CASE("degenerate charts print sensibly") {
    // nothing survives in the window: header-only grid
    auto empty = run_cli("chart builtin:sphere:3 --max-s 1 --max-degree 2");
    REQUIRE(empty.code == 0);
    CHECK(empty.out == " t\\s\n"); // header-only grid, no legend

    // one class of degree d and weight one sits at (-1, d + 1)
    auto single = run_cli("chart builtin:sphere:2 --max-s 1 --max-degree 3 --format json");
    REQUIRE(single.code == 0);
    auto j = nlohmann::json::parse(single.out);
    int cells = 0;
    for (const auto& e : j.at("entries")) {
        if (e.at("col").get<int>() == 0) continue; // the unit
        ++cells;
        CHECK(e.at("col").get<int>() == -1);
        CHECK(e.at("row").get<int>() == 3);
        CHECK(e.at("dim").get<int>() == 1);
        CHECK(e.at("names") == nlohmann::json::array({"x2"}));
    }
    CHECK(cells == 1);
}

TEST_CASE("unstable and ls commands expose the library results") {
    auto u = run_cli("unstable builtin:dual-steenrod:8");
    CHECK(u.code == 0);
    CHECK(has(u.out, "(1 of 20 classes)"));
    CHECK(has(u.out, "degree 0 (dim 1): 1*"));

    auto l = run_cli("ls builtin:rp:4 --s 1 --max-degree 6 --format json");
    REQUIRE(l.code == 0);
    auto j = nlohmann::json::parse(l.out);
    auto lib = singer::l_functor(modlib::builtin("rp:4", 7), 1, 6);
    long long total = 0;
    for (const auto& deg : j.at("degrees")) total += deg.at("dim").get<long long>();
    CHECK(total == lib.module.total_dim());
}

TEST_CASE("builtin subcommand materializes catalogue modules") {
    auto list = run_cli("builtin --list");
    CHECK(list.code == 0);
    CHECK(has(list.out, "rp4-ext"));
    CHECK(has(list.out, "hz-mod4:D"));

    auto tmp = std::filesystem::temp_directory_path() / "destab_cli_hz6.json";
    CHECK(run_cli("builtin hz:6 --out " + tmp.string()).code == 0);
    auto loaded = modlib::load(tmp.string());
    CHECK(amod::modules_equal(loaded, modlib::builtin("hz:6")));
    std::filesystem::remove(tmp);

    auto to_stdout = run_cli("builtin sphere:1 --max-degree 5");
    CHECK(to_stdout.code == 0);
    auto m = modlib::parse_module(to_stdout.out, "stdout");
    CHECK(m.max_deg == 5);
    CHECK(m.dim(1) == 1);

    CHECK(run_cli("builtin").code == 1);
    CHECK(run_cli("builtin nonsense").code == 1);
}

TEST_CASE("the thread cap changes nothing observable") {
    const std::string args = "ss builtin:rp:4 --max-s 2 --max-degree 8 --format json";
    auto base = run_cli(args);
    auto capped = run_cli(args, "DESTAB_THREADS=1 ");
    CHECK(base.code == 0);
    CHECK(capped.code == 0);
    CHECK(base.out == capped.out);
}
