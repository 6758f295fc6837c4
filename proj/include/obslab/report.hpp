#pragma once

#include "obslab/lognum.hpp"
#include "obslab/tower.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace obslab {

using ordered_json = nlohmann::ordered_json;

// One experiment's output: a CSV table plus a JSON summary.
struct Report {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    ordered_json summary = ordered_json::object();
    std::size_t violations = 0;

    void add_row(std::vector<std::string> row);
};

// Shortest round-trip decimal ("%.17g"), with inf, -inf and nan spelled out.
std::string cell(double x);
std::string cell(long long x);
std::string cell(std::size_t x);
std::string cell(int x);
std::string cell(bool x);
std::string cell(const std::string& s);

// JSON-safe number: non-finite values become strings.
ordered_json num(double x);
// {"ln": ln|x|, "sign": s, "value": x or null when out of double range}.
ordered_json lognum_json(const LogNum& x);
// {"tower": "...", "height": h, "value": x or null}.
ordered_json tower_json(const Tower& t);

// RFC 4180: fields with comma, quote or newline are quoted, quotes doubled.
std::string csv_text(const Report& r);
// config, seed, summary and violation count, two-space indented, trailing newline.
std::string json_text(const ordered_json& config, const Report& r);

// Writes <prefix>.csv and <prefix>.json, creating parent directories.
void write_report(const std::string& prefix, const ordered_json& config, const Report& r);

}  // namespace obslab
