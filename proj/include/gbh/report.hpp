#pragma once

#include <json.hpp>
#include <string>

#include "gbh/bound.hpp"
#include "gbh/simulator.hpp"
#include "gbh/verify.hpp"

namespace gbh {

using Json = nlohmann::ordered_json;

Json to_json(const BoundBreakdown& b);
Json to_json(const SimConfig& c);
Json to_json(const SimSummary& s);
Json to_json(const VerifyReport& r);

inline constexpr const char* kSimLogHeader =
    "procedure,m,rho,lambda,alpha,reps,fdr_hat,fdr_se,power_hat,power_se,bound";

/// One CSV log row (no trailing newline); absent values are written as NA.
std::string sim_log_row(const SimSummary& s);

}  // namespace gbh
