#pragma once

#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>

#include "hbs/borel.hpp"
#include "hbs/quantum.hpp"
#include "hbs/solver.hpp"

namespace hbs {

// Wire encodings: a field element is the integer code sum coeffs[i] p^i; a
// vector is its list of codes; a matrix is its row-major list of codes; a
// flag is the list of its members, each a list of basis vectors.

inline nlohmann::json vec_to_json(const VecFq& v) {
    nlohmann::json out = nlohmann::json::array();
    for (std::uint32_t c : v.encode()) out.push_back(c);
    return out;
}

inline nlohmann::json flag_to_json(const Flag& flag) {
    nlohmann::json members = nlohmann::json::array();
    for (const Subspace& u : flag.members) {
        nlohmann::json basis = nlohmann::json::array();
        for (const VecFq& b : u.basis()) basis.push_back(vec_to_json(b));
        members.push_back(basis);
    }
    return members;
}

struct InstanceMeta {
    int n;
    std::uint32_t p, r;
    OracleMode mode;
    std::uint64_t seed;
};

inline const char* mode_name(OracleMode m) { return m == OracleMode::GL ? "gl" : "sl"; }

// Deterministic per-instance record; wall time is intentionally left out so
// equal seeds serialize byte-identically.
inline nlohmann::json report_to_json(const SolveReport& report, const InstanceMeta& meta) {
    nlohmann::json j;
    j["degree"] = meta.n;
    j["p"] = meta.p;
    j["r"] = meta.r;
    j["mode"] = mode_name(meta.mode);
    j["seed"] = meta.seed;
    j["success"] = true;
    j["flag"] = flag_to_json(report.flag);
    j["rounds_per_level"] = report.rounds_per_level;
    j["verify_attempts_per_level"] = report.verify_attempts_per_level;
    j["oracle_queries"] = report.oracle_queries;
    j["prep_failures"] = report.prep_failures;
    j["verify_failures"] = report.verify_failures;
    j["check_queries"] = report.check_queries;
    return j;
}

inline nlohmann::json failure_to_json(const std::string& error, const InstanceMeta& meta) {
    nlohmann::json j;
    j["degree"] = meta.n;
    j["p"] = meta.p;
    j["r"] = meta.r;
    j["mode"] = mode_name(meta.mode);
    j["seed"] = meta.seed;
    j["success"] = false;
    j["error"] = error;
    return j;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string rational_to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "," + std::to_string(r.denominator());
}

// Row-major matrix codes joined by ':' (CSV-safe single cell).
inline std::string matrix_key(const MatFq& m) {
    std::string out;
    for (std::uint32_t c : m.encode()) {
        if (!out.empty()) out.push_back(':');
        out += std::to_string(c);
    }
    return out;
}

}  // namespace hbs
