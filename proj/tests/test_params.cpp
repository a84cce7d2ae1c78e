#include <doctest.h>

#include "qscale/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace qscale;

namespace {

bool has_error(const Validation& v, const std::string& field)
{
    return std::any_of(v.errors.begin(), v.errors.end(), [&](const ParamIssue& i) { return i.field == field; });
}

}  // namespace

TEST_CASE("presets carry the evaluation parameters")
{
    auto p = preset("psync-eval-49");
    CHECK(p.n == 500);
    CHECK(p.q == 49);
    CHECK(p.p_sample == doctest::Approx(3.0 / std::sqrt(500.0)));
    CHECK(p.p_vote == doctest::Approx(1.45 * 49 / 500));
    CHECK(p.p_prop == doctest::Approx(6.0 / 500));
    CHECK(p.model == NetworkModel::partially_synchronous);

    auto s = preset("sync-eval");
    CHECK(s.p_vote == doctest::Approx(1.9 * 49 / 500));
    CHECK(s.p_prop == doctest::Approx(10.0 / 500));
    CHECK(s.model == NetworkModel::synchronous);

    for (const auto& name : preset_names()) CHECK(validate(preset(name)).ok());
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("with_epsilon rounds f")
{
    auto p = preset("psync-eval-74");
    p.with_epsilon(0.15);
    CHECK(p.f == 75);
    CHECK(p.epsilon() == doctest::Approx(0.15));
    CHECK(p.correct() == 425);
}

TEST_CASE("validation names the offending field")
{
    auto p = preset("psync-eval-49");
    p.with_epsilon(0.34);
    CHECK(has_error(validate(p), "epsilon"));

    auto s = preset("sync-eval");
    s.with_epsilon(0.4);
    CHECK(validate(s).ok());
    s.with_epsilon(0.5);
    CHECK(has_error(validate(s), "epsilon"));

    auto b = preset("sync-eval");
    b.p_vote = 1.5;
    b.p_prop = -0.1;
    b.q = 0;
    b.kappa = 0;
    auto v = validate(b);
    CHECK(has_error(v, "p_vote"));
    CHECK(has_error(v, "p_prop"));
    CHECK(has_error(v, "q"));
    CHECK(has_error(v, "kappa"));
    CHECK_THROWS_AS(require_valid(b), std::invalid_argument);

    ProtocolParams zero;
    zero.n = 0;
    CHECK(has_error(validate(zero), "n"));
}

TEST_CASE("q <= f and kappa = 1 are warnings, not errors")
{
    auto p = preset("sync-eval");
    p.with_epsilon(0.2);
    p.q = 50;
    auto v = validate(p);
    CHECK(v.ok());
    CHECK(std::any_of(v.warnings.begin(), v.warnings.end(), [](const ParamIssue& i) { return i.field == "q"; }));

    p.q = 49;
    p.kappa = 1;
    v = validate(p);
    CHECK(v.ok());
    CHECK(std::any_of(v.warnings.begin(), v.warnings.end(), [](const ParamIssue& i) { return i.field == "kappa"; }));
}

TEST_CASE("config text round trips")
{
    auto p = preset("psync-eval-98");
    p.with_epsilon(0.1);
    p.vote_forwarding = true;
    p.lock_rule = LockRule::strict;
    CHECK(parse_params(serialize(p)) == p);

    auto q = parse_params("# comment\n n = 40 \nq=7\np_vote = 0.25 # trailing\n\nmodel = psync\n");
    CHECK(q.n == 40);
    CHECK(q.q == 7);
    CHECK(q.p_vote == 0.25);
    CHECK(q.model == NetworkModel::partially_synchronous);

    CHECK_THROWS_AS(parse_params("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_params("n = -3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_params("p_vote = x\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_params("n 5\n"), std::invalid_argument);
}
