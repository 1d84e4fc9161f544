#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "windowbench/ehr/types.hpp"

namespace wb::text {

// Which categorical (table, field) pairs are rendered as tokens. "*" as the
// field matches every key of a key->value table (admission_info).
struct StructuredTextSchema {
    std::vector<std::pair<std::string, std::string>> categorical;

    static StructuredTextSchema defaults();
};

// Default: every table except admission keeps encounter-date order.
const std::set<std::string>& default_time_sensitive_tables();

// Renders each categorical value as "«table».«field».«value»" (value
// lowercased, spaces -> underscores). Tokens from time-sensitive tables are
// emitted in encounter order; the rest form a trailing sorted block. The
// result is appended to a surgery's Document on the text-representation path.
std::vector<std::string> structured_to_text(std::span<const ehr::Encounter> encounters,
                                            const StructuredTextSchema& schema,
                                            const std::set<std::string>& time_sensitive_tables);
std::vector<std::string> structured_to_text(std::span<const ehr::Encounter> encounters);

}  // namespace wb::text
