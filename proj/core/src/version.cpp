#include "scenecode/version.hpp"

namespace scenecode {

std::string_view toolkit_version() { return SCENECODE_VERSION; }

}  // namespace scenecode
