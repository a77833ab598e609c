#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "supercube/rng.hpp"

namespace supercube {

/// Locale-independent, deterministic number formatting for reports.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}
inline std::string format_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
    return buf;
}

/// One verification record. `anchor` names the identity being checked in
/// plain words so the log reads on its own; `values` preserves insertion
/// order so serialization is reproducible.
struct ReportRecord {
    std::string name;
    std::string anchor;
    bool pass = false;
    std::vector<std::pair<std::string, std::string>> values;
    std::uint64_t seed = 0;
    std::string budget;
    long long time_ms = 0;

    void add(std::string key, std::string value) { values.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), format_double(value)); }
    void add(std::string key, std::uint64_t value) { add(std::move(key), format_u64(value)); }
    void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
};

struct ReportDocument {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<std::string> suites;
    std::vector<ReportRecord> records;

    int passed() const {
        int n = 0;
        for (const auto& r : records) n += r.pass;
        return n;
    }
    int failed() const { return static_cast<int>(records.size()) - passed(); }
    bool all_pass() const { return failed() == 0; }

    /// Deterministic text serialization. With `include_timing` off the output
    /// is byte-identical across repeated and reordered (parallel) runs.
    std::string to_text(bool include_timing = true) const {
        std::string out;
        out += "supercube verification report\n";
        out += "config-digest = " + config_digest + "\n";
        out += "seed = " + format_u64(seed) + "\n";
        out += "suites =";
        for (const std::string& s : suites) out += " " + s;
        out += "\n";
        for (const ReportRecord& r : records) {
            out += "\n[check " + r.name + "]\n";
            out += "anchor = " + r.anchor + "\n";
            out += std::string("status = ") + (r.pass ? "pass" : "FAIL") + "\n";
            for (const auto& [k, v] : r.values) out += k + " = " + v + "\n";
            out += "seed = " + format_u64(r.seed) + "\n";
            if (!r.budget.empty()) out += "budget = " + r.budget + "\n";
            if (include_timing) out += "time-ms = " + std::to_string(r.time_ms) + "\n";
        }
        out += "\nsummary = " + std::to_string(passed()) + " pass, " + std::to_string(failed()) +
               " fail\n";
        return out;
    }
};

inline std::string config_digest_hex(const std::string& raw) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(raw));
    return buf;
}

}  // namespace supercube
