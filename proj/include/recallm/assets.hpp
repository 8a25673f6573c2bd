#pragma once

#include <string_view>
#include <vector>

namespace recallm {

// Text assets compiled in from data/: lexicons, prompt templates and the
// temporal benchmark fixture. Names are paths relative to data/.
std::string_view asset(std::string_view name);
std::vector<std::string_view> asset_names();

}  // namespace recallm
