#pragma once

#include <string>

#include "spinotto/cycle.hpp"
#include "spinotto/sweep.hpp"

namespace spinotto {

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name); // "csv" | "json"

// Pinned sweep CSV schema.  Numbers carry 12 significant digits; undefined
// observables (eta, eta_int, fano on a zero-heat point) are left empty.
extern const char* const sweep_csv_header;

std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);

std::string cycle_to_json(const CycleRecord& record);

// Format a double with 12 significant digits (shortest %g form).
std::string format_number(double v);

// Runtime configuration file.  JSON (nlohmann) when the file starts with
// '{' or has a .json extension; otherwise a small INI dialect with
// [section] headers, key = value lines, comma-separated lists and #/;
// comments.  Unknown sections or keys are rejected.
struct Config {
    SweepSpec sweep{}; // sweep.base doubles as the single-cycle spec
};

Config default_config();
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text, bool prefer_json);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Gnuplot script that plots a sweep CSV produced by to_csv (power, efficiency
// and fluctuation panels against cycle time).  Never executed here.
std::string emit_plot_script(const std::string& csv_path);

} // namespace spinotto
