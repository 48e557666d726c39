#include "foliage/lsystem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "foliage/errors.hpp"

namespace foliage {

namespace {

constexpr std::size_t kMaxExpansionChars = std::size_t{1} << 26;
constexpr double kGoldenAngleDeg = 137.5;

bool known_symbol(char c, const LSystemSpec& spec) {
    return spec.rules.contains(c) || spec.alphabet.find(c) != std::string::npos;
}

void check_symbols(const std::string& s, const LSystemSpec& spec, const char* where) {
    for (char c : s) {
        if (!known_symbol(c, spec)) {
            throw ValidationError(std::string("l-system: unknown symbol '") + c + "' in " + where);
        }
    }
}

} // namespace

void validate(const LSystemSpec& spec) {
    if (spec.iterations < 0) throw ValidationError("l-system: iterations must be >= 0");
    if (!(spec.turtle.step_m > 0.0)) throw ValidationError("l-system: step length must be > 0");
    check_symbols(spec.axiom, spec, "axiom");
    for (const auto& [sym, body] : spec.rules) {
        check_symbols(body, spec, "rule body");
        (void)sym;
    }
}

std::string expand(const LSystemSpec& spec) {
    validate(spec);
    std::string current = spec.axiom;
    for (int it = 0; it < spec.iterations; ++it) {
        std::string next;
        next.reserve(current.size() * 2);
        for (char c : current) {
            auto rule = spec.rules.find(c);
            if (rule != spec.rules.end()) {
                next += rule->second;
            } else {
                next += c;
            }
            if (next.size() > kMaxExpansionChars) {
                throw ValidationError("l-system: expansion exceeds size guard");
            }
        }
        current = std::move(next);
    }
    return current;
}

namespace {

struct TurtleState {
    double height = 0.0;
    double twist = 0.0;
};

std::vector<BranchAttachment> scan(const std::string& expanded, const TurtleParams& params, double* height_out) {
    const double deg = std::numbers::pi / 180.0;
    const double yaw_step = params.branching_angle_deg * deg;
    const double tilt = params.branching_angle_deg * deg;

    std::vector<BranchAttachment> out;
    std::vector<TurtleState> stack;
    std::vector<std::size_t> open_brackets;
    TurtleState t;
    double trunk_top = 0.0;
    std::size_t spawned = 0;

    for (std::size_t i = 0; i < expanded.size(); ++i) {
        switch (expanded[i]) {
        case 'F':
            if (stack.empty()) {
                t.height += params.step_m;
                trunk_top = std::max(trunk_top, t.height);
            }
            break;
        case '+':
            t.twist += yaw_step;
            break;
        case '-':
            t.twist -= yaw_step;
            break;
        case '[':
            stack.push_back(t);
            open_brackets.push_back(i);
            break;
        case ']':
            if (stack.empty()) {
                throw ParseError("l-system: unmatched ']' at index " + std::to_string(i));
            }
            t = stack.back();
            stack.pop_back();
            open_brackets.pop_back();
            break;
        case 'X': {
            const double az = params.golden_azimuth ? static_cast<double>(spawned) * kGoldenAngleDeg * deg
                                                    : t.twist;
            BranchAttachment a;
            a.position = {0.0, 0.0, t.height};
            a.direction = {std::sin(tilt) * std::cos(az), std::sin(tilt) * std::sin(az), std::cos(tilt)};
            a.depth = static_cast<int>(stack.size());
            out.push_back(a);
            ++spawned;
            break;
        }
        default:
            break; // structural symbols are no-ops for the turtle
        }
    }
    if (!stack.empty()) {
        throw ParseError("l-system: unmatched '[' at index " + std::to_string(open_brackets.back()));
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const BranchAttachment& a, const BranchAttachment& b) { return a.position.z < b.position.z; });
    if (height_out) *height_out = trunk_top;
    return out;
}

} // namespace

std::vector<BranchAttachment> interpret_trunk(const std::string& expanded, const TurtleParams& params) {
    return scan(expanded, params, nullptr);
}

double trunk_height(const std::string& expanded, const TurtleParams& params) {
    double h = 0.0;
    scan(expanded, params, &h);
    return h;
}

LSystemSpec default_branching_spec() {
    LSystemSpec spec;
    spec.axiom = "A";
    spec.rules = {{'A', "F+[X]A"}};
    spec.iterations = 6;
    spec.turtle = TurtleParams{};
    return spec;
}

} // namespace foliage
