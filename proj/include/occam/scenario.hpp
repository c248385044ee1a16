#pragma once

#include "occam/evidence.hpp"
#include "occam/model.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace occam {

/// A model space plus the data it is judged on, as read from a scenario file.
///
/// Grammar (one directive per line, '#' starts a comment, tokens separated
/// by whitespace, numbers are decimal literals with optional exponent):
///
///     format 1                                   (optional, first if present)
///     scenario "<name>"
///     pattern <id> <v1> ... <vn>
///     model <id> weight <w>
///       likelihood null noise_sd <s>
///       likelihood signal pattern <pattern-id> noise_sd <s> prior normal mean <m> sd <t>
///       likelihood location noise_sd <s> prior normal mean <m> sd <t> [constraint observed <w> noise_sd <s2>]...
///       likelihood point mean <mu> noise_sd <s>
///     data vector <y1> ... <yn>
///     data scalar <y>
///
/// Each `likelihood` line belongs to the `model` line before it.
struct ScenarioSpec {
    std::string name;
    /// Pattern definitions in declaration order.
    std::vector<std::pair<std::string, std::vector<double>>> patterns;
    std::vector<CompositeModel> models;
    /// model id -> pattern id for signal models.
    std::map<std::string, std::string> pattern_refs;
    Observation data;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind {
        Lexical,             ///< malformed number, unterminated string
        Syntax,              ///< tokens in the wrong place or missing
        UnknownDirective,
        DuplicateId,
        UnresolvedPattern,
        Structural,          ///< model/data combination not allowed
        InvalidValue,        ///< well-formed number outside its domain
        MissingDeclaration,  ///< no scenario, no models, no data, ...
    };

    ParseError(Kind kind, std::size_t line, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    Kind kind_;
    std::size_t line_;
    std::string message_;
};

const char* to_string(ParseError::Kind kind) noexcept;

/// Parses and fully validates a scenario. Throws ParseError.
ScenarioSpec parse_scenario(std::string_view text);

/// Canonical scenario text; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

struct ScenarioEvaluation {
    std::string name;
    std::vector<LogEvidence> evidence;
    /// Every ordered pair (i, j) with i < j in declaration order.
    std::vector<BayesFactorRow> bayes_factors;
    ModelPosterior posterior;
    EliminationReport elimination;
};

ScenarioEvaluation evaluate_scenario(const ScenarioSpec& spec, double epsilon = kDefaultEliminationEpsilon);

}  // namespace occam
