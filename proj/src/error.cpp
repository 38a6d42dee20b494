#include "cfrit/error.hpp"

#include <utility>

namespace cfrit {

Error::Error(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

}  // namespace cfrit
