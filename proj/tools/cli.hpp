#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace isac::cli {

/**
 * Config reader for JSON (first non-blank character '{') or TOML files.
 * Objects are subcommand sections. Writing always produces JSON.
 */
class JsonOrTomlConfig : public CLI::Config {
public:
    /// Top-level subcommand named on the command line; only its section activates a subcommand.
    std::string selected;

    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

/// Runs the toolkit with the given arguments; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isac::cli
