// config.hpp
// Declarative JSON configs and report serialization.
#pragma once

#include <json.hpp>

#include "slecg/verify.hpp"

namespace slecg {

using json = nlohmann::json;

// Divisor <-> config record: entries {re, im, at_infinity, side, charge_re,
// charge_im}, b as a top-level field; round-trips exactly.
json divisor_to_json(const Divisor& d);
Divisor divisor_from_json(const json& j);

json log_correlation_to_json(const LogCorrelation& lc);

json sle_params_to_json(const SleParams& p);
SleParams sle_params_from_json(const json& j);

json martingale_report_to_json(const MartingaleReport& rep);
json exponent_report_to_json(const ExponentReport& rep);
json restriction_report_to_json(const RestrictionReport& rep);

// Rejects unknown keys; `where` names the record in error messages.
void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where);

DrivingConfig driving_config_from_json(const json& j);

}  // namespace slecg
