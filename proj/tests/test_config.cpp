#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lognls/config.hpp"

using namespace lognls;

namespace {
const char* kMinimal = R"(
# minimal config
seed = 7
[problem]
N = 3
alpha = 1
mu = 1
p = 4
c = 1
[grid]
R = 16
M = 2048
)";
}

TEST_CASE("minimal config accepted with defaults") {
    RunConfig cfg = parse_config(kMinimal);
    CHECK(cfg.problem.N == 3);
    CHECK(cfg.problem.p == 4.0);
    CHECK(cfg.grid.M == 2048);
    CHECK(cfg.seed == 7);
    CHECK(cfg.solver.tol_grad == 1e-8);
    CHECK(cfg.output.csv);
    CHECK(cfg.output.structured_text);
}

TEST_CASE("p = 2 rejected") {
    std::string text = kMinimal;
    text.replace(text.find("p = 4"), 5, "p = 2");
    CHECK_THROWS_WITH_AS(parse_config(text), "p must exceed 2", config_error);
}

TEST_CASE("p beyond the critical exponent rejected") {
    std::string text = kMinimal;
    text.replace(text.find("p = 4"), 5, "p = 7");
    CHECK_THROWS_AS(parse_config(text), config_error);
}

TEST_CASE("unknown key carries its line number") {
    std::string text = kMinimal;
    text += "typo_key = 3\n";
    try {
        parse_config(text);
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(e.line == 13);
        CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
    }
}

TEST_CASE("unknown section and malformed lines rejected") {
    CHECK_THROWS_AS(parse_config("[nope]\n"), config_error);
    CHECK_THROWS_AS(parse_config("[problem]\nN 3\n"), config_error);
    CHECK_THROWS_AS(parse_config("[problem]\nN =\n"), config_error);
    CHECK_THROWS_AS(parse_config("[problem]\nN = abc\n"), config_error);
    CHECK_THROWS_AS(parse_config(""), config_error); // missing [problem]
}

TEST_CASE("serialize/parse round trip is lossless") {
    RunConfig cfg = parse_config(kMinimal);
    cfg.solver.tol_grad = 3.25e-9;
    cfg.solver.max_iter = 12345;
    cfg.solver.backtrack = 0.625;
    cfg.output.csv = true;
    cfg.output.structured_text = false;
    cfg.output.directory = "outdir";
    RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back.problem.N == cfg.problem.N);
    CHECK(back.problem.alpha == cfg.problem.alpha);
    CHECK(back.problem.mu == cfg.problem.mu);
    CHECK(back.problem.p == cfg.problem.p);
    CHECK(back.problem.c == cfg.problem.c);
    CHECK(back.grid.R == cfg.grid.R);
    CHECK(back.grid.M == cfg.grid.M);
    CHECK(back.solver.tol_grad == cfg.solver.tol_grad);
    CHECK(back.solver.tol_P == cfg.solver.tol_P);
    CHECK(back.solver.max_iter == cfg.solver.max_iter);
    CHECK(back.solver.step0 == cfg.solver.step0);
    CHECK(back.solver.backtrack == cfg.solver.backtrack);
    CHECK(back.solver.seed == cfg.solver.seed);
    CHECK(back.output.directory == cfg.output.directory);
    CHECK(back.output.csv == cfg.output.csv);
    CHECK(back.output.structured_text == cfg.output.structured_text);
    CHECK(back.seed == cfg.seed);
}
