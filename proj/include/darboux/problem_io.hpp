#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "darboux/congruence.hpp"
#include "darboux/poisson.hpp"
#include "darboux/verify.hpp"

namespace darboux {

/// Malformed or inconsistent problem/result files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct Problem {
    std::string name;
    StructureMatrix J;
    /// Values used for simulation; verification samples parameters instead.
    Env parameter_values;
    std::vector<Expr> known_casimirs;
};

Problem problem_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json problem_to_json(const Problem& p);
Problem load_problem(const std::filesystem::path& path);

nlohmann::ordered_json result_to_json(const DarbouxResult& r, const Problem& p, std::uint64_t seed,
                                      const std::optional<VerificationReport>& report);
/// Rebuilds a result from its file; expressions are re-parsed against the problem's domain.
DarbouxResult result_from_json(const nlohmann::ordered_json& doc, const Problem& p);

nlohmann::ordered_json report_to_json(const VerificationReport& r);

nlohmann::ordered_json read_json(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& doc);

}  // namespace darboux
