#include <doctest.h>

#include <cmath>
#include <numbers>

#include "foliage/errors.hpp"
#include "foliage/lsystem.hpp"
#include "foliage/serialize.hpp"

using namespace foliage;

namespace {

/// Independent expander: depth-first per-symbol substitution, no shared code
/// with the library's breadth-first parallel rewrite.
std::string naive_symbol(char c, const std::map<char, std::string>& rules, int depth) {
    if (depth == 0) return std::string(1, c);
    const auto it = rules.find(c);
    if (it == rules.end()) return std::string(1, c);
    std::string out;
    for (char b : it->second) out += naive_symbol(b, rules, depth - 1);
    return out;
}

std::string naive_expand(const std::string& s, const std::map<char, std::string>& rules, int depth) {
    std::string out;
    for (char c : s) out += naive_symbol(c, rules, depth);
    return out;
}

} // namespace

TEST_CASE("algae system grows with Fibonacci lengths") {
    LSystemSpec spec;
    spec.axiom = "A";
    spec.rules = {{'A', "AB"}, {'B', "A"}};
    const std::size_t expected[] = {1, 2, 3, 5, 8, 13};
    for (int it = 0; it <= 5; ++it) {
        spec.iterations = it;
        CHECK(expand(spec).size() == expected[it]);
    }
}

TEST_CASE("expansion matches an independent recursive expander") {
    LSystemSpec spec;
    spec.axiom = "FX";
    spec.rules = {{'F', "F+F"}, {'X', "[FX]X"}};
    for (int it = 0; it <= 6; ++it) {
        spec.iterations = it;
        CHECK(expand(spec) == naive_expand(spec.axiom, spec.rules, it));
    }
}

TEST_CASE("unknown symbols are rejected") {
    LSystemSpec spec;
    spec.axiom = "FQ";
    spec.iterations = 1;
    CHECK_THROWS_AS(validate(spec), ValidationError);

    spec.axiom = "F";
    spec.rules = {{'F', "Fz"}};
    CHECK_THROWS_AS(validate(spec), ValidationError);
}

TEST_CASE("negative iterations are rejected") {
    LSystemSpec spec;
    spec.axiom = "F";
    spec.iterations = -1;
    CHECK_THROWS_AS(validate(spec), ValidationError);
}

TEST_CASE("runaway expansions hit the size guard") {
    LSystemSpec spec;
    spec.axiom = "F";
    spec.rules = {{'F', "FFFF"}};
    spec.iterations = 40;
    CHECK_THROWS_AS(expand(spec), ValidationError);
}

TEST_CASE("unbalanced brackets fail with the offending index") {
    TurtleParams turtle;
    CHECK_THROWS_AS(interpret_trunk("F]", turtle), ParseError);
    CHECK_THROWS_AS(interpret_trunk("F[X", turtle), ParseError);
    CHECK_NOTHROW(interpret_trunk("F[X]", turtle));
}

TEST_CASE("default spec places one attachment per growth step up the trunk") {
    const LSystemSpec spec = default_branching_spec();
    const std::string expanded = expand(spec);
    const auto attachments = interpret_trunk(expanded, spec.turtle);

    REQUIRE(attachments.size() == 6);
    const double theta = spec.turtle.branching_angle_deg * std::numbers::pi / 180.0;
    for (std::size_t k = 0; k < attachments.size(); ++k) {
        CHECK(attachments[k].position.x == 0.0);
        CHECK(attachments[k].position.y == 0.0);
        CHECK(attachments[k].position.z ==
              doctest::Approx(spec.turtle.step_m * static_cast<double>(k + 1)).epsilon(1e-12));

        const double phi = static_cast<double>(k) * 137.5 * std::numbers::pi / 180.0;
        CHECK(attachments[k].direction.x == doctest::Approx(std::sin(theta) * std::cos(phi)).epsilon(1e-12));
        CHECK(attachments[k].direction.y == doctest::Approx(std::sin(theta) * std::sin(phi)).epsilon(1e-12));
        CHECK(attachments[k].direction.z == doctest::Approx(std::cos(theta)).epsilon(1e-12));
        CHECK(attachments[k].depth == 1);
    }
    CHECK(trunk_height(expanded, spec.turtle) == doctest::Approx(2.1).epsilon(1e-12));
}

TEST_CASE("turtle twist sets the azimuth when golden angles are off") {
    TurtleParams turtle;
    turtle.golden_azimuth = false;
    turtle.branching_angle_deg = 30.0;
    const auto attachments = interpret_trunk("F+[X]F-[X]", turtle);

    REQUIRE(attachments.size() == 2);
    const double theta = 30.0 * std::numbers::pi / 180.0;
    // First spawn after one +: azimuth = +30 deg; second after + and -: back to 0.
    CHECK(attachments[0].direction.x == doctest::Approx(std::sin(theta) * std::cos(theta)));
    CHECK(attachments[0].direction.y == doctest::Approx(std::sin(theta) * std::sin(theta)));
    CHECK(attachments[1].direction.x == doctest::Approx(std::sin(theta)));
    CHECK(attachments[1].direction.y == doctest::Approx(0.0));
}

TEST_CASE("bracketed growth does not advance the trunk") {
    TurtleParams turtle;
    const auto attachments = interpret_trunk("F[FFX]X", turtle);
    REQUIRE(attachments.size() == 2);
    // Both attachments sit at the height reached before the bracket.
    CHECK(attachments[0].position.z == doctest::Approx(turtle.step_m));
    CHECK(attachments[1].position.z == doctest::Approx(turtle.step_m));
    CHECK(attachments[0].depth == 1);
    CHECK(attachments[1].depth == 0);
}

TEST_CASE("spec round-trips through its JSON form") {
    LSystemSpec spec = default_branching_spec();
    spec.turtle.branching_angle_deg = 33.0;
    spec.turtle.golden_azimuth = false;

    nlohmann::json j = spec;
    const LSystemSpec back = j.get<LSystemSpec>();

    CHECK(back.axiom == spec.axiom);
    CHECK(back.rules == spec.rules);
    CHECK(back.turtle.step_m == spec.turtle.step_m);
    CHECK(back.turtle.branching_angle_deg == spec.turtle.branching_angle_deg);
    CHECK(back.turtle.golden_azimuth == spec.turtle.golden_azimuth);
    for (int it = 0; it <= 8; ++it) {
        LSystemSpec a = spec, b = back;
        a.iterations = b.iterations = it;
        CHECK(expand(a) == expand(b));
    }
}

TEST_CASE("json rule keys must be single symbols") {
    nlohmann::json j = {{"axiom", "A"}, {"rules", {{"AB", "A"}}}, {"iterations", 1}};
    CHECK_THROWS_AS(j.get<LSystemSpec>(), ValidationError);
}
