#pragma once

// Machine-readable verdicts. One LemmaReport per verifier run, serialized as
// {schema_version, lemma_id, parameters, status, witnesses, margin, elapsed_ms}.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "lucasphi/arith.hpp"

namespace lucasphi {

using json = nlohmann::json;

enum class Status { Pass, Fail, Skipped };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Skipped: return "skipped";
    }
    return "?";
}

inline Status status_from_string(const std::string& s) {
    if (s == "pass") return Status::Pass;
    if (s == "fail") return Status::Fail;
    if (s == "skipped") return Status::Skipped;
    throw DomainError("unknown status: " + s);
}

struct LemmaReport {
    std::string lemma_id;
    json parameters = json::object();
    Status status = Status::Pass;
    std::string skip_reason;
    json witnesses = json::array();
    std::optional<double> margin;
    int64_t elapsed_ms = 0;

    bool passed() const { return status == Status::Pass; }

    /// A witness that refutes the lemma's claim; forces status Fail.
    void add_counterexample(json w) {
        w["kind"] = "counterexample";
        witnesses.push_back(std::move(w));
        status = Status::Fail;
    }

    /// Informational witness (attaining points, observed sets, skip records).
    void add_info(json w) {
        w["kind"] = "info";
        witnesses.push_back(std::move(w));
    }

    void add_skipped_entry(json w, const std::string& why) {
        w["kind"] = "skipped_entry";
        w["reason"] = why;
        witnesses.push_back(std::move(w));
        if (status == Status::Pass) {
            status = Status::Skipped;
            skip_reason = why;
        }
    }

    bool has_counterexample() const {
        for (const auto& w : witnesses)
            if (w.contains("kind") && w["kind"] == "counterexample") return true;
        return false;
    }

    size_t skipped_entries() const {
        size_t k = 0;
        for (const auto& w : witnesses)
            if (w.contains("kind") && w["kind"] == "skipped_entry") ++k;
        return k;
    }

    json to_json() const {
        json j;
        j["schema_version"] = 1;
        j["lemma_id"] = lemma_id;
        j["parameters"] = parameters;
        j["status"] = to_string(status);
        if (status == Status::Skipped) j["parameters"]["skip_reason"] = skip_reason;
        j["witnesses"] = witnesses;
        if (margin)
            j["margin"] = *margin;
        else
            j["margin"] = nullptr;
        j["elapsed_ms"] = elapsed_ms;
        return j;
    }

    static LemmaReport from_json(const json& j) {
        LemmaReport r;
        r.lemma_id = j.at("lemma_id").get<std::string>();
        r.parameters = j.at("parameters");
        r.status = status_from_string(j.at("status").get<std::string>());
        if (r.parameters.contains("skip_reason"))
            r.skip_reason = r.parameters["skip_reason"].get<std::string>();
        r.witnesses = j.at("witnesses");
        if (!j.at("margin").is_null()) r.margin = j.at("margin").get<double>();
        r.elapsed_ms = j.at("elapsed_ms").get<int64_t>();
        return r;
    }
};

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Transcendental inequality checking with an escalation rule: verdicts whose
// relative slack in double precision falls below 1e-6 are recomputed in long
// double before being trusted.
// ---------------------------------------------------------------------------

constexpr double kRelativeSlackFloor = 1e-6;

struct IneqVerdict {
    bool holds = false;
    double margin = 0.0; // bound - value for "<" claims, value - bound for ">"
    bool escalated = false;
};

/// claim: value < bound, where eval<T>() -> pair{value, bound}.
template <typename Eval> IneqVerdict check_strictly_below(Eval&& eval) {
    auto [value, bound] = eval.template operator()<double>();
    IneqVerdict v;
    v.margin = bound - value;
    v.holds = value < bound;
    double scale = std::max({std::fabs(value), std::fabs(bound), 1.0});
    if (std::fabs(v.margin) < kRelativeSlackFloor * scale) {
        auto [lv, lb] = eval.template operator()<long double>();
        v.holds = lv < lb;
        v.margin = static_cast<double>(lb - lv);
        v.escalated = true;
    }
    return v;
}

/// claim: value > bound.
template <typename Eval> IneqVerdict check_strictly_above(Eval&& eval) {
    auto flipped = [&]<typename T>() {
        auto [value, bound] = eval.template operator()<T>();
        return std::pair<T, T>{bound, value};
    };
    return check_strictly_below(flipped);
}

} // namespace lucasphi
