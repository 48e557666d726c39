#pragma once

#include <json.hpp>

#include "foliage/lsystem.hpp"
#include "foliage/scene.hpp"
#include "foliage/treegen.hpp"

namespace foliage {

// nlohmann ADL hooks. from_json rejects unknown keys so config typos fail
// loudly instead of silently falling back to defaults.

void to_json(nlohmann::json& j, const LSystemSpec& spec);
void from_json(const nlohmann::json& j, LSystemSpec& spec);

void to_json(nlohmann::json& j, const RandomizationParams& p);
void from_json(const nlohmann::json& j, RandomizationParams& p);

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);

/// Error if `j` holds keys outside `allowed`; `where` names the JSON path in messages.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

} // namespace foliage
