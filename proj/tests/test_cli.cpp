#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "settol/cli.hpp"
#include "support/fixtures.hpp"

using namespace settol;
using settol::testing::fixture_path;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("single on the fixture graph prints all tolerance pairs", "[cli]") {
    const auto r = cli({"single", "--graph", fixture_path("appendixE.txt"), "--no-banner"});
    REQUIRE(r.code == 0);
    REQUIRE(count_lines(r.out) == 14); // header + 13 edges
    REQUIRE(r.out.find("v2-v5") != std::string::npos);

    const auto csv = cli({"single", "--graph", fixture_path("appendixE.txt"), "--no-banner",
                          "--format", "csv"});
    REQUIRE(csv.code == 0);
    REQUIRE(csv.out.find("element,upper,lower\n") == 0);
    REQUIRE(csv.out.find("v2-v5,inf,7\n") != std::string::npos);
    REQUIRE(csv.out.find("v1-v2,1,0\n") != std::string::npos);
    REQUIRE(csv.out.find("v3-v4,inf,2\n") != std::string::npos);
    REQUIRE(csv.out.find("v1-v5,0,0\n") != std::string::npos);
}

TEST_CASE("single with selected elements and verification", "[cli]") {
    const auto r = cli({"single", "--csp", fixture_path("triangle.json"), "--elements", "c",
                        "--no-banner", "--format", "csv", "--verify"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "element,upper,lower\nc,inf,2\n");

    const auto all = cli({"single", "--csp", fixture_path("triangle.json"), "--no-banner",
                          "--format", "csv"});
    REQUIRE(count_lines(all.out) == 4); // empty selection means every element

    const auto gv = cli({"single", "--graph", fixture_path("appendixE.txt"), "--no-banner",
                         "--verify"});
    REQUIRE(gv.code == 0);
}

TEST_CASE("set command on the fixture sets", "[cli]") {
    const auto upper = cli({"set", "--graph", fixture_path("appendixE.txt"), "--kind", "upper",
                            "--set", "v1-v6,v1-v7,v5-v6,v6-v7,v1-v4,v4-v5,v1-v5,v2-v3",
                            "--method", "eul", "--no-banner"});
    REQUIRE(upper.code == 0);
    REQUIRE(upper.out.find("value: 26") != std::string::npos);
    REQUIRE(upper.out.find("method: eul") != std::string::npos);

    const auto lower = cli({"set", "--graph", fixture_path("appendixE.txt"), "--kind", "lower",
                            "--set", "v2-v3,v3-v4,v5-v7", "--method", "mst-exact",
                            "--no-banner"});
    REQUIRE(lower.code == 0);
    REQUIRE(lower.out.find("value: 6") != std::string::npos);

    const auto tll = cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "lower",
                          "--set", "a,c", "--method", "tll", "--no-banner"});
    REQUIRE(tll.code == 0);
    REQUIRE(tll.out.find("value: 2") != std::string::npos);
    REQUIRE(tll.out.find("witness: a=0;c=2") != std::string::npos);
}

TEST_CASE("set json output round-trips its values", "[cli]") {
    const auto r = cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "upper",
                        "--set", "a,b", "--method", "eul", "--no-banner", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(ExtendedValue::parse(j.at("value").get<std::string>()) == ExtendedValue(5));
    REQUIRE(j.at("witness").at("a").get<std::string>() == "3");
    REQUIRE(j.at("witness").at("b").get<std::string>() == "2");

    const auto inf = cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "upper",
                          "--set", "a,c", "--method", "eul", "--no-banner", "--format", "json"});
    const auto ji = nlohmann::json::parse(inf.out);
    REQUIRE(ExtendedValue::parse(ji.at("value").get<std::string>()).is_infinite());
}

TEST_CASE("invalid requests exit with code 2, missing files with 1", "[cli]") {
    REQUIRE(cli({"single", "--csp", "/nonexistent.json", "--no-banner"}).code == 1);
    REQUIRE(cli({"single", "--csp", fixture_path("triangle.json"), "--elements", "zz",
                 "--no-banner"})
                .code == 2);
    REQUIRE(cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "lower", "--set",
                 "a,b,c", "--method", "closed", "--no-banner"})
                .code == 0);
    REQUIRE(cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "lower", "--set", "a",
                 "--method", "mst-exact", "--no-banner"})
                .code == 2);
    REQUIRE(cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "upper", "--set",
                 "a,b", "--method", "ell", "--no-banner"})
                .code == 2);
    REQUIRE(cli({"nonsense"}).code == 2);
    REQUIRE(cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "upper", "--set",
                 "a,a", "--method", "eul", "--no-banner"})
                .code == 2);

    // closed with |E| > 3
    const ExplicitCsp big({"a", "b", "c", "d"},
                          {Rational(1), Rational(1), Rational(1), Rational(1)},
                          {Subset::of({0, 1, 2, 3})});
    // write it to a temp file
    const std::string path = "/tmp/settol_test_big.json";
    {
        std::ofstream f(path);
        f << big.to_json().dump();
    }
    REQUIRE(cli({"set", "--csp", path, "--kind", "lower", "--set", "a,b,c,d", "--method",
                 "closed", "--no-banner"})
                .code == 2);
}

TEST_CASE("all-lower table, footer, and csv header", "[cli]") {
    const auto r = cli({"all-lower", "--csp", fixture_path("triangle.json"), "--method", "tll",
                        "--no-banner"});
    REQUIRE(r.code == 0);
    REQUIRE(count_lines(r.out) == 9); // header + 7 rows + footer
    REQUIRE(r.out.find("solves: 8") != std::string::npos);

    const auto naive = cli({"all-lower", "--csp", fixture_path("triangle.json"), "--method",
                            "ell-naive", "--no-banner"});
    REQUIRE(naive.out.find("solves: 27") != std::string::npos);

    const auto csv = cli({"all-lower", "--csp", fixture_path("triangle.json"), "--method", "tll",
                          "--no-banner", "--format", "csv"});
    REQUIRE(csv.out.find("set,cardinality,value,method,solves\n") == 0);
    REQUIRE(csv.out.find("\"{a,c}\",2,2,tll,1\n") != std::string::npos);

    const auto capped = cli({"all-lower", "--csp", fixture_path("triangle.json"), "--cap", "2",
                             "--no-banner"});
    REQUIRE(capped.code == 2);
    REQUIRE(capped.err.find("8") != std::string::npos); // the required solve count
}

TEST_CASE("all-lower rows come out by cardinality then mask", "[cli]") {
    const auto r = cli({"all-lower", "--csp", fixture_path("triangle.json"), "--method", "tll",
                        "--no-banner", "--format", "csv"});
    const std::vector<std::string> expect = {"{a}", "{b}", "{c}", "\"{a,b}\"",
                                             "\"{a,c}\"", "\"{b,c}\"", "\"{a,b,c}\""};
    std::size_t pos = 0;
    for (const auto& label : expect) {
        const auto found = r.out.find(label + ",");
        REQUIRE(found != std::string::npos);
        REQUIRE(found >= pos);
        pos = found;
    }
}

TEST_CASE("identical requests produce byte-identical output", "[cli]") {
    const std::vector<std::string> req{"all-lower", "--csp", fixture_path("triangle.json"),
                                       "--method", "tll", "--no-banner"};
    const auto a = cli(req);
    const auto b = cli(req);
    REQUIRE(a.out == b.out);
    REQUIRE(a.err.empty());

    // stratum parallelism must not change a byte
    auto req_jobs = req;
    req_jobs.push_back("--jobs");
    req_jobs.push_back("3");
    REQUIRE(cli(req_jobs).out == a.out);

    // the banner goes to stderr, never stdout
    std::vector<std::string> with_banner{"all-lower", "--csp", fixture_path("triangle.json"),
                                         "--method", "tll"};
    const auto c = cli(with_banner);
    REQUIRE(c.out == a.out);
    REQUIRE(c.err.find("# settol all-lower") == 0);
}

TEST_CASE("bounds command emits the bound suite", "[cli]") {
    const auto r = cli({"bounds", "--csp", fixture_path("triangle.json"), "--set", "a,b,c",
                        "--s", "2", "--partition", "a|b,c", "--no-banner", "--format", "csv"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("max-single-lower,2\n") != std::string::npos);
    REQUIRE(r.out.find("sum-single-lower,2\n") != std::string::npos);
    REQUIRE(r.out.find("min-cost,inf\n") != std::string::npos);
    REQUIRE(r.out.find("binomial(s=2),2\n") != std::string::npos);
    REQUIRE(r.out.find("partition,2\n") != std::string::npos);
    REQUIRE(r.out.find("max-single-upper,inf\n") != std::string::npos);

    REQUIRE(cli({"bounds", "--csp", fixture_path("triangle.json"), "--set", "a,b,c", "--s", "7",
                 "--no-banner"})
                .code == 2);
}

TEST_CASE("verify runs instance and random modes", "[cli]") {
    const auto inst = cli({"verify", "--csp", fixture_path("triangle.json"), "--no-banner"});
    REQUIRE(inst.code == 0);
    REQUIRE(inst.out.find("verify: OK (7 checks)") != std::string::npos);

    const auto rnd = cli({"verify", "--random", "--trials", "6", "--seed", "3", "--no-banner"});
    REQUIRE(rnd.code == 0);
    REQUIRE(rnd.out.find("verify: OK (6 checks)") != std::string::npos);

    const auto graph = cli({"verify", "--graph", fixture_path("appendixE.txt"), "--max-k", "1",
                            "--max-ground", "13", "--no-banner"});
    REQUIRE(graph.code == 0);
    REQUIRE(graph.out.find("verify: OK (13 checks)") != std::string::npos);
}

TEST_CASE("decimal display marks approximations", "[cli]") {
    const auto r = cli({"bounds", "--csp", fixture_path("triangle.json"), "--set", "a,b,c",
                        "--s", "1", "--no-banner", "--decimal", "3"});
    REQUIRE(r.code == 0);
    // the binomial bound at s=1 sums the singles: (0+0+2)/1 = 2 exactly
    REQUIRE(r.out.find("2.000") != std::string::npos);
}

TEST_CASE("lp trace flag dumps tableaus to stderr", "[cli]") {
    const auto r = cli({"set", "--csp", fixture_path("triangle.json"), "--kind", "lower",
                        "--set", "a,c", "--method", "ell", "--no-banner", "--trace-lp"});
    REQUIRE(r.code == 0);
    REQUIRE(r.err.find("[lp]") != std::string::npos);
}
