#include "floqsmat/version.hpp"

namespace floqsmat {

const char* library_version() noexcept { return FLOQSMAT_VERSION; }

}  // namespace floqsmat
