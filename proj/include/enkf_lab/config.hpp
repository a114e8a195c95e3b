#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "enkf_lab/experiments.hpp"

namespace enkf_lab {

/// Config document rejected. `line` is 1-based, 0 when the problem is not
/// tied to a line (e.g. a cross-field invariant on a defaulted key).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string key, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// Parses the flat `key = value` format: one key per line, `#` starts a
/// comment, lists are comma separated. Missing keys keep their defaults;
/// unknown or repeated keys are errors. The result is validated.
TwinExperimentConfig parse_config(std::string_view text);

/// Writes every key in canonical order, numbers with 17 significant digits,
/// so that parse_config(serialize_config(c)) == c.
std::string serialize_config(const TwinExperimentConfig& config);

/// Key reference with default values, for --help.
std::string config_help();

}  // namespace enkf_lab
