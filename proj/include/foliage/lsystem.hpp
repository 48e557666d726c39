#pragma once

#include <map>
#include <string>
#include <vector>

#include "foliage/vec3.hpp"

namespace foliage {

/// Turtle parameters for trunk interpretation.
struct TurtleParams {
    double step_m = 0.35;                ///< trunk advance per F
    double branching_angle_deg = 40.0;   ///< tilt of spawned branches from the trunk axis; also the yaw step
    bool golden_azimuth = true;          ///< assign branch azimuths as k * 137.5 deg instead of the turtle twist
};

/// A parallel string-rewriting system plus the turtle parameters used to
/// read its expansion as trunk geometry.
///
/// Turtle alphabet: F advances up the trunk, + / - yaw about the trunk axis,
/// [ ] push/pop turtle state, X marks a branch attachment. Any symbol that is
/// a rule key but not a turtle symbol is a structural no-op when interpreted.
struct LSystemSpec {
    std::string axiom;
    std::map<char, std::string> rules;
    int iterations = 0;
    TurtleParams turtle;
    std::string alphabet = "F+-[]X"; ///< terminal/turtle symbols accepted without a rule
};

/// A point on the trunk where a first-level branch assembly attaches.
struct BranchAttachment {
    Vec3 position;  ///< on the trunk axis
    Vec3 direction; ///< unit growth direction of the branch
    int depth = 0;  ///< bracket depth at the spawn point
};

/// Checks that iterations >= 0 and that every symbol reachable from the axiom
/// or a rule body is either a rule key or in the declared alphabet.
void validate(const LSystemSpec& spec);

/// Applies all rules simultaneously `iterations` times. Symbols without a
/// rule map to themselves. Throws ValidationError for symbols outside the
/// rule map and alphabet, or if the expansion exceeds the size guard.
std::string expand(const LSystemSpec& spec);

/// Reads an expanded string as trunk geometry and returns the branch
/// attachments ordered by height. F advances the trunk only at bracket depth
/// zero; bracketed content scopes yaw state and marks attachment depth.
/// Throws ParseError (with the offending index) on unbalanced brackets.
std::vector<BranchAttachment> interpret_trunk(const std::string& expanded, const TurtleParams& params);

/// Total trunk extent reached by the same scan interpret_trunk performs.
double trunk_height(const std::string& expanded, const TurtleParams& params);

/// The branching system shipped with the library: a yawing marker chain that
/// places one attachment per growth step. The rules are a generic default,
/// not a reconstruction of any particular species; override them in the
/// config file to taste.
LSystemSpec default_branching_spec();

} // namespace foliage
