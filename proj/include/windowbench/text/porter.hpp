#pragma once

#include <string>
#include <string_view>

namespace wb::text {

// Porter (1980) stemming algorithm, matching the reference implementation
// (including its two documented revisions to step 2: bli->ble and logi->log).
// Expects a lowercase ASCII word; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace wb::text
