#pragma once

#include <string_view>

namespace scenecode {

std::string_view toolkit_version();

}  // namespace scenecode
