#pragma once

namespace floqsmat {

const char* library_version() noexcept;

}  // namespace floqsmat
